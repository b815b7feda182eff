"""Exact construction and mechanical verification of root-graded Lie algebras."""

__version__ = "0.1.0"
