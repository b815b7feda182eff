"""Exact rational sparse linear algebra over based vector spaces.

Everything downstream (root systems, matrix Lie algebras, coordinate
algebras, graded models) is built on the types here.  Scalars are
``fractions.Fraction`` throughout; there is no floating point anywhere.
All values are immutable after construction and all operations are pure,
so they can be shared freely between concurrent verification tasks.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Q = Fraction

QZERO = Q(0)
QONE = Q(1)


class ShapeError(ValueError):
    """Operands live in incompatible based spaces."""


def q_str(x: Fraction) -> str:
    """Serialize a rational as "p/q", or "p" when the denominator is 1."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def q_parse(s: str) -> Fraction:
    return Fraction(s)


class BasedSpace:
    """A finite-dimensional vector space with a fixed ordered basis.

    Basis labels are opaque strings; the canonical order used for pivot
    selection and serialization is the construction order of ``labels``.
    """

    __slots__ = ("labels", "_pos")

    def __init__(self, labels: Sequence[str]):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            raise ValueError("basis labels must be distinct")
        self.labels = labels
        self._pos = {lab: i for i, lab in enumerate(labels)}

    @property
    def dim(self) -> int:
        return len(self.labels)

    def pos(self, label: str) -> int:
        try:
            return self._pos[label]
        except KeyError:
            raise ShapeError(f"label {label!r} not in space") from None

    def __contains__(self, label: str) -> bool:
        return label in self._pos

    def __eq__(self, other) -> bool:
        return isinstance(other, BasedSpace) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"BasedSpace(dim={self.dim})"

    def basis_vector(self, label: str) -> "SparseVector":
        self.pos(label)
        return SparseVector(self, {label: QONE})

    def zero(self) -> "SparseVector":
        return SparseVector(self, {})


def tensor_space(u: BasedSpace, v: BasedSpace) -> BasedSpace:
    """Tensor product realized concretely with pair labels "a⊗b"."""
    return BasedSpace([f"{a}⊗{b}" for a in u.labels for b in v.labels])


def tensor_label(a: str, b: str) -> str:
    return f"{a}⊗{b}"


def split_tensor_label(lab: str) -> tuple[str, str]:
    a, b = lab.split("⊗", 1)
    return a, b


class SparseVector:
    """Finitely supported label -> Fraction mapping; no explicit zeros."""

    __slots__ = ("space", "entries")

    def __init__(self, space: BasedSpace, entries: Mapping[str, Fraction]):
        clean = {}
        for lab, val in entries.items():
            if lab not in space:
                raise ShapeError(f"label {lab!r} not in space")
            v = Q(val)
            if v != 0:
                clean[lab] = v
        self.space = space
        self.entries = clean

    def get(self, label: str) -> Fraction:
        return self.entries.get(label, QZERO)

    def is_zero(self) -> bool:
        return not self.entries

    def __add__(self, other: "SparseVector") -> "SparseVector":
        if self.space != other.space:
            raise ShapeError("vector spaces differ")
        out = dict(self.entries)
        for lab, val in other.entries.items():
            s = out.get(lab, QZERO) + val
            if s:
                out[lab] = s
            else:
                out.pop(lab, None)
        return SparseVector(self.space, out)

    def __sub__(self, other: "SparseVector") -> "SparseVector":
        return self + other.scale(Q(-1))

    def scale(self, c: Fraction) -> "SparseVector":
        c = Q(c)
        if c == 0:
            return SparseVector(self.space, {})
        return SparseVector(self.space, {lab: c * v for lab, v in self.entries.items()})

    def __neg__(self) -> "SparseVector":
        return self.scale(Q(-1))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseVector)
            and self.space == other.space
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.space, frozenset(self.entries.items())))

    def items_sorted(self):
        return sorted(self.entries.items(), key=lambda kv: self.space.pos(kv[0]))

    def __repr__(self):
        parts = [f"{q_str(v)}*{lab}" for lab, v in self.items_sorted()]
        return " + ".join(parts) if parts else "0"


def vec_sum(space: BasedSpace, terms: Iterable[SparseVector]) -> SparseVector:
    out: dict[str, Fraction] = {}
    for t in terms:
        if t.space != space:
            raise ShapeError("vector spaces differ")
        for lab, val in t.entries.items():
            s = out.get(lab, QZERO) + val
            if s:
                out[lab] = s
            else:
                out.pop(lab, None)
    return SparseVector(space, out)


class SparseMatrix:
    """Finitely supported linear map; entries keyed by (row, col) labels.

    Rows are labels of the codomain, columns labels of the domain, so
    ``(m @ v)[r] = sum_c m[r, c] * v[c]``.
    """

    __slots__ = ("domain", "codomain", "entries")

    def __init__(
        self,
        domain: BasedSpace,
        codomain: BasedSpace,
        entries: Mapping[tuple[str, str], Fraction],
    ):
        clean = {}
        for (r, c), val in entries.items():
            if r not in codomain or c not in domain:
                raise ShapeError(f"entry ({r!r}, {c!r}) outside matrix shape")
            v = Q(val)
            if v != 0:
                clean[(r, c)] = v
        self.domain = domain
        self.codomain = codomain
        self.entries = clean

    @staticmethod
    def zero(domain: BasedSpace, codomain: BasedSpace) -> "SparseMatrix":
        return SparseMatrix(domain, codomain, {})

    @staticmethod
    def identity(space: BasedSpace) -> "SparseMatrix":
        return SparseMatrix(space, space, {(lab, lab): QONE for lab in space.labels})

    def get(self, r: str, c: str) -> Fraction:
        return self.entries.get((r, c), QZERO)

    def is_zero(self) -> bool:
        return not self.entries

    def apply(self, v: SparseVector) -> SparseVector:
        if v.space != self.domain:
            raise ShapeError("matrix domain does not match vector space")
        out: dict[str, Fraction] = {}
        for (r, c), m in self.entries.items():
            coeff = v.entries.get(c)
            if coeff is None:
                continue
            s = out.get(r, QZERO) + m * coeff
            if s:
                out[r] = s
            else:
                out.pop(r, None)
        return SparseVector(self.codomain, out)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if other.codomain != self.domain:
            raise ShapeError("composition shapes disagree")
        cols: dict[str, list[tuple[str, Fraction]]] = {}
        for (r, c), v in other.entries.items():
            cols.setdefault(r, []).append((c, v))
        out: dict[tuple[str, str], Fraction] = {}
        for (r, mid), v in self.entries.items():
            for c, w in cols.get(mid, ()):
                key = (r, c)
                s = out.get(key, QZERO) + v * w
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return SparseMatrix(other.domain, self.codomain, out)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.domain != other.domain or self.codomain != other.codomain:
            raise ShapeError("matrix shapes differ")
        out = dict(self.entries)
        for key, val in other.entries.items():
            s = out.get(key, QZERO) + val
            if s:
                out[key] = s
            else:
                out.pop(key, None)
        return SparseMatrix(self.domain, self.codomain, out)

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + other.scale(Q(-1))

    def scale(self, c: Fraction) -> "SparseMatrix":
        c = Q(c)
        if c == 0:
            return SparseMatrix.zero(self.domain, self.codomain)
        return SparseMatrix(
            self.domain, self.codomain, {k: c * v for k, v in self.entries.items()}
        )

    def __neg__(self) -> "SparseMatrix":
        return self.scale(Q(-1))

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(
            self.codomain, self.domain, {(c, r): v for (r, c), v in self.entries.items()}
        )

    def trace(self) -> Fraction:
        if self.domain != self.codomain:
            raise ShapeError("trace needs domain = codomain")
        return sum((v for (r, c), v in self.entries.items() if r == c), QZERO)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SparseMatrix)
            and self.domain == other.domain
            and self.codomain == other.codomain
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.domain, self.codomain, frozenset(self.entries.items())))

    def __repr__(self):
        n = len(self.entries)
        return f"SparseMatrix({self.codomain.dim}x{self.domain.dim}, nnz={n})"


def commutator(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    return (a @ b) - (b @ a)


def anticommutator(a: SparseMatrix, b: SparseMatrix) -> SparseMatrix:
    return (a @ b) + (b @ a)


class Subspace:
    """Span of vectors, stored as a reduced row-echelon basis.

    The RREF is canonical given the ambient label order, so two subspaces
    are equal iff their ``rows`` lists are equal.
    """

    __slots__ = ("ambient", "rows", "pivots", "_pivot_of_row")

    def __init__(self, ambient: BasedSpace, rows: Sequence[SparseVector], pivots: Sequence[int]):
        self.ambient = ambient
        self.rows = tuple(rows)
        self.pivots = tuple(pivots)
        self._pivot_of_row = {p: i for i, p in enumerate(pivots)}

    @property
    def dim(self) -> int:
        return len(self.rows)

    def reduce(self, v: SparseVector) -> SparseVector:
        """Subtract the projection onto the span; residual has no pivot support."""
        if v.space != self.ambient:
            raise ShapeError("vector not in ambient space")
        out = dict(v.entries)
        labels = self.ambient.labels
        for p, i in self._pivot_of_row.items():
            coeff = out.get(labels[p])
            if not coeff:
                continue
            for lab, val in self.rows[i].entries.items():
                s = out.get(lab, QZERO) - coeff * val
                if s:
                    out[lab] = s
                else:
                    out.pop(lab, None)
        return SparseVector(self.ambient, out)

    def contains(self, v: SparseVector) -> bool:
        return self.reduce(v).is_zero()

    def coordinates(self, v: SparseVector) -> list[Fraction]:
        """Coefficients of v over the rref basis rows; raises if v is outside."""
        if v.space != self.ambient:
            raise ShapeError("vector not in ambient space")
        out = dict(v.entries)
        labels = self.ambient.labels
        coords = [QZERO] * len(self.rows)
        for p, i in self._pivot_of_row.items():
            coeff = out.get(labels[p])
            if not coeff:
                continue
            coords[i] = coeff
            for lab, val in self.rows[i].entries.items():
                s = out.get(lab, QZERO) - coeff * val
                if s:
                    out[lab] = s
                else:
                    out.pop(lab, None)
        if out:
            raise ShapeError("vector not in subspace")
        return coords

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient == other.ambient
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.ambient, self.rows))

    def __repr__(self):
        return f"Subspace(dim={self.dim} of {self.ambient.dim})"

    def is_subspace_of(self, other: "Subspace") -> bool:
        return all(other.contains(r) for r in self.rows)


def rref(vectors: Sequence[SparseVector], space: BasedSpace | None = None) -> Subspace:
    """Reduced row-echelon basis of the span, pivots in ambient label order."""
    if space is None:
        if not vectors:
            raise ShapeError("empty vector list needs an explicit ambient space")
        space = vectors[0].space
    rows: list[dict[str, Fraction]] = []
    pivots: list[int] = []
    labels = space.labels
    for v in vectors:
        if v.space != space:
            raise ShapeError("mixed ambient spaces")
        cur = dict(v.entries)
        for p, row in zip(pivots, rows):
            coeff = cur.get(labels[p])
            if not coeff:
                continue
            for lab, val in row.items():
                s = cur.get(lab, QZERO) - coeff * val
                if s:
                    cur[lab] = s
                else:
                    cur.pop(lab, None)
        if not cur:
            continue
        p = min(space.pos(lab) for lab in cur)
        inv = QONE / cur[labels[p]]
        cur = {lab: inv * val for lab, val in cur.items()}
        # eliminate the new pivot from existing rows
        for i, row in enumerate(rows):
            coeff = row.get(labels[p])
            if not coeff:
                continue
            new = dict(row)
            for lab, val in cur.items():
                s = new.get(lab, QZERO) - coeff * val
                if s:
                    new[lab] = s
                else:
                    new.pop(lab, None)
            rows[i] = new
        rows.append(cur)
        pivots.append(p)
    order = sorted(range(len(pivots)), key=lambda i: pivots[i])
    return Subspace(
        space,
        [SparseVector(space, rows[i]) for i in order],
        [pivots[i] for i in order],
    )


def kernel(m: SparseMatrix) -> Subspace:
    """Exact nullspace basis of a sparse matrix, via RREF on the rows."""
    # Row space of m as vectors over the domain.
    rows_by_label: dict[str, dict[str, Fraction]] = {}
    for (r, c), v in m.entries.items():
        rows_by_label.setdefault(r, {})[c] = v
    row_vecs = [
        SparseVector(m.domain, rows_by_label[r])
        for r in m.codomain.labels
        if r in rows_by_label
    ]
    rs = rref(row_vecs, m.domain)
    labels = m.domain.labels
    pivot_set = set(rs.pivots)
    basis = []
    for j, lab in enumerate(labels):
        if j in pivot_set:
            continue
        entries = {lab: QONE}
        for p, row in zip(rs.pivots, rs.rows):
            coeff = row.get(lab)
            if coeff:
                entries[labels[p]] = -coeff
        basis.append(SparseVector(m.domain, entries))
    return rref(basis, m.domain)


def kernel_of_rows(rows: Sequence[SparseVector], space: BasedSpace) -> Subspace:
    """Common nullspace of a family of linear functionals given as row vectors."""
    rs = rref(list(rows), space)
    labels = space.labels
    pivot_set = set(rs.pivots)
    basis = []
    for j, lab in enumerate(labels):
        if j in pivot_set:
            continue
        entries = {lab: QONE}
        for p, row in zip(rs.pivots, rs.rows):
            coeff = row.get(lab)
            if coeff:
                entries[labels[p]] = -coeff
        basis.append(SparseVector(space, entries))
    return rref(basis, space)


class QuotientSpace:
    """Ambient space modulo a subspace of relations.

    Coset coordinates are taken over the non-pivot labels of the relation
    RREF; projection is exact and canonical.
    """

    __slots__ = ("ambient", "relations", "coset_labels", "coset_space")

    def __init__(self, ambient: BasedSpace, relations: Subspace):
        if relations.ambient != ambient:
            raise ShapeError("relations not in ambient space")
        self.ambient = ambient
        self.relations = relations
        pivot_set = set(relations.pivots)
        self.coset_labels = tuple(
            lab for j, lab in enumerate(ambient.labels) if j not in pivot_set
        )
        self.coset_space = BasedSpace(self.coset_labels)

    @property
    def dim(self) -> int:
        return len(self.coset_labels)

    def project(self, v: SparseVector) -> SparseVector:
        """Canonical coset representative, as a vector over the coset space."""
        red = self.relations.reduce(v)
        return SparseVector(self.coset_space, dict(red.entries))

    def lift(self, w: SparseVector) -> SparseVector:
        """The canonical ambient representative of a coset vector."""
        if w.space != self.coset_space:
            raise ShapeError("vector not in coset space")
        return SparseVector(self.ambient, dict(w.entries))


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    return rref(list(a.rows) + list(b.rows), a.ambient)
