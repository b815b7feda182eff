"""Coordinate quadruples (a, *, C, f) and the Lie algebra {b, b}_ell.

A quadruple is stored by structure constants over fixed bases of the
star algebra and the module.  The derived algebra b = a + C carries the
structured product; the relation space K, the derivations d^{ell,b}, the
quotient {b,b}_ell with its bracket, the full skew-dihedral homology and
the uniform property are all computed exactly.

Every claim the construction depends on (associativity, the involution
laws, well-definedness of the bracket on the quotient, centrality of the
homology) is checked mechanically rather than assumed; failures raise
``InternalConsistencyError`` with a witness.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Sequence

from .exactla import (
    BasedSpace,
    Q,
    QONE,
    QZERO,
    QuotientSpace,
    SparseMatrix,
    SparseVector,
    Subspace,
    kernel_of_rows,
    q_parse,
    q_str,
    rref,
    split_tensor_label,
    tensor_label,
    tensor_space,
)

QUADRUPLE_TYPES = ("A", "B", "C", "D", "BC")


class InternalConsistencyError(RuntimeError):
    """A structural identity the construction relies on failed to verify."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class CoordinateQuadruple:
    """(a, *, C, f) with structure constants over explicit bases."""

    __slots__ = (
        "qtype",
        "name",
        "a_space",
        "mult",
        "unit",
        "star",
        "c_space",
        "action",
        "f_table",
        "b_space",
        "a_part_sub",
        "b_part_sub",
    )

    def __init__(
        self,
        qtype: str,
        a_labels: Sequence[str],
        mult: dict[tuple[str, str], dict[str, Fraction]],
        unit: dict[str, Fraction],
        star: dict[tuple[str, str], Fraction],
        c_labels: Sequence[str] = (),
        action: dict[tuple[str, str], dict[str, Fraction]] | None = None,
        f_table: dict[tuple[str, str], dict[str, Fraction]] | None = None,
        name: str = "",
    ):
        if qtype not in QUADRUPLE_TYPES:
            raise ValueError(f"unknown quadruple type {qtype!r}")
        self.qtype = qtype
        self.name = name or qtype
        self.a_space = BasedSpace(a_labels)
        self.mult = {
            key: SparseVector(self.a_space, val) for key, val in mult.items()
        }
        self.unit = SparseVector(self.a_space, unit)
        self.star = SparseMatrix(self.a_space, self.a_space, star)
        self.c_space = BasedSpace(c_labels)
        self.action = {
            key: SparseVector(self.c_space, val) for key, val in (action or {}).items()
        }
        self.f_table = {
            key: SparseVector(self.a_space, val) for key, val in (f_table or {}).items()
        }
        self.b_space = BasedSpace(list(a_labels) + list(c_labels))
        ident = SparseMatrix.identity(self.a_space)
        self.a_part_sub = _eigenspace(self.star - ident)
        self.b_part_sub = _eigenspace(self.star + ident)

    # -- products ---------------------------------------------------------

    def a_mul(self, x: SparseVector, y: SparseVector) -> SparseVector:
        out = self.a_space.zero()
        for i, ci in x.entries.items():
            for j, cj in y.entries.items():
                term = self.mult.get((i, j))
                if term is not None:
                    out = out + term.scale(ci * cj)
        return out

    def a_star(self, x: SparseVector) -> SparseVector:
        return self.star.apply(x)

    def c_act(self, a: SparseVector, c: SparseVector) -> SparseVector:
        out = self.c_space.zero()
        for i, ci in a.entries.items():
            for j, cj in c.entries.items():
                term = self.action.get((i, j))
                if term is not None:
                    out = out + term.scale(ci * cj)
        return out

    def f_val(self, c: SparseVector, cp: SparseVector) -> SparseVector:
        out = self.a_space.zero()
        for i, ci in c.entries.items():
            for j, cj in cp.entries.items():
                term = self.f_table.get((i, j))
                if term is not None:
                    out = out + term.scale(ci * cj)
        return out

    # -- b = a (+) C ------------------------------------------------------

    def split_b(self, x: SparseVector) -> tuple[SparseVector, SparseVector]:
        a = {l: v for l, v in x.entries.items() if l in self.a_space}
        c = {l: v for l, v in x.entries.items() if l in self.c_space}
        return SparseVector(self.a_space, a), SparseVector(self.c_space, c)

    def join_b(self, a: SparseVector, c: SparseVector) -> SparseVector:
        return SparseVector(self.b_space, {**a.entries, **c.entries})

    def proj_a_part(self, x: SparseVector) -> SparseVector:
        """Projection of an a-element onto the *-fixed points."""
        return (x + self.a_star(x)).scale(Q(1, 2))

    def proj_b_part(self, x: SparseVector) -> SparseVector:
        return (x - self.a_star(x)).scale(Q(1, 2))

    @property
    def a_dim(self) -> int:
        return self.a_space.dim

    @property
    def c_dim(self) -> int:
        return self.c_space.dim

    def __repr__(self):
        return f"CoordinateQuadruple({self.name}, type {self.qtype})"


def _eigenspace(shifted: SparseMatrix) -> Subspace:
    from .exactla import kernel

    return kernel(shifted)


# ---------------------------------------------------------------------------
# operations on b


def b_mul(q: CoordinateQuadruple, x: SparseVector, y: SparseVector) -> SparseVector:
    """(a1 + c1).(a2 + c2) = a1 a2 + f(c1, c2) + a1.c2 + a2*.c1."""
    a1, c1 = q.split_b(x)
    a2, c2 = q.split_b(y)
    a_out = q.a_mul(a1, a2) + q.f_val(c1, c2)
    c_out = q.c_act(a1, c2) + q.c_act(q.a_star(a2), c1)
    return q.join_b(a_out, c_out)


def b_circ_brk(q, x, y) -> tuple[SparseVector, SparseVector]:
    xy = b_mul(q, x, y)
    yx = b_mul(q, y, x)
    return xy + yx, xy - yx


def diamond_heart(q, c: SparseVector, cp: SparseVector) -> tuple[SparseVector, SparseVector]:
    """diamond = antisymmetric part of f (lands in the *-fixed points),
    heart = symmetric part (lands in the *-skew points)."""
    if q.c_dim == 0:
        raise ValueError(f"type {q.qtype} quadruple has no module part")
    f1 = q.f_val(c, cp)
    f2 = q.f_val(cp, c)
    half = Q(1, 2)
    return (f1 - f2).scale(half), (f1 + f2).scale(half)


def beta_star(q, x: SparseVector, y: SparseVector) -> SparseVector:
    """[a1, a2] + [b1, b2] - c1 heart c2, split through the involution."""
    a1g, c1 = q.split_b(x)
    a2g, c2 = q.split_b(y)
    a1, b1 = q.proj_a_part(a1g), q.proj_b_part(a1g)
    a2, b2 = q.proj_a_part(a2g), q.proj_b_part(a2g)
    out = (
        q.a_mul(a1, a2)
        - q.a_mul(a2, a1)
        + q.a_mul(b1, b2)
        - q.a_mul(b2, b1)
    )
    if q.c_dim:
        heart = (q.f_val(c1, c2) + q.f_val(c2, c1)).scale(Q(1, 2))
        out = out - heart
    return out


def derivation(q, ell: int, x: SparseVector, y: SparseVector) -> SparseMatrix:
    """The type-dispatched inner-derivation endomorphism d^{ell,b}_{x,y} of b."""
    if ell < 1:
        raise ValueError("ell must be a positive integer")
    a1, c1 = q.split_b(x)
    a2, c2 = q.split_b(y)
    cols: dict[tuple[str, str], Fraction] = {}

    def add_col(lab: str, vec: SparseVector):
        for r, v in vec.entries.items():
            key = (r, lab)
            s = cols.get(key, QZERO) + v
            if s:
                cols[key] = s
            else:
                cols.pop(key, None)

    t = q.qtype
    if t != "D" and not (a1.is_zero() or a2.is_zero()):
        if t == "A":
            comm = q.a_mul(a1, a2) - q.a_mul(a2, a1)
            scale = Q(1, ell + 1)
            for lab in q.a_space.labels:
                beta = q.a_space.basis_vector(lab)
                add_col(lab, (q.a_mul(comm, beta) - q.a_mul(beta, comm)).scale(scale))
        elif t == "B":
            for lab in q.a_space.labels:
                beta = q.a_space.basis_vector(lab)
                add_col(lab, q.a_mul(a2, q.a_mul(a1, beta)) - q.a_mul(a1, q.a_mul(a2, beta)))
        else:  # C and BC
            s1, s2 = q.a_star(a1), q.a_star(a2)
            comm = (
                q.a_mul(a1, a2)
                - q.a_mul(a2, a1)
                + q.a_mul(s1, s2)
                - q.a_mul(s2, s1)
            )
            scale = Q(1, 4 * ell)
            for lab in q.a_space.labels:
                beta = q.a_space.basis_vector(lab)
                add_col(lab, (q.a_mul(comm, beta) - q.a_mul(beta, comm)).scale(scale))
            for lab in q.c_space.labels:
                beta = q.c_space.basis_vector(lab)
                add_col(lab, q.c_act(comm, beta).scale(scale))
    if t == "BC" and not (c1.is_zero() or c2.is_zero()):
        heart = (q.f_val(c1, c2) + q.f_val(c2, c1)).scale(Q(1, 2))
        scale = Q(-1, 2 * ell)
        for lab in q.a_space.labels:
            beta = q.a_space.basis_vector(lab)
            add_col(lab, (q.a_mul(heart, beta) - q.a_mul(beta, heart)).scale(scale))
        half = Q(1, 2)
        for lab in q.c_space.labels:
            beta = q.c_space.basis_vector(lab)
            term = q.c_act(heart, beta).scale(scale)
            term = term - q.c_act(q.f_val(beta, c2), c1).scale(half)
            term = term - q.c_act(q.f_val(beta, c1), c2).scale(half)
            add_col(lab, term)
    return SparseMatrix(q.b_space, q.b_space, cols)


# ---------------------------------------------------------------------------
# validation


def validate_quadruple(q: CoordinateQuadruple) -> dict:
    """Check every defining law on basis tuples; returns a report dict."""
    checks = []

    def record(law: str, failures: list):
        checks.append(
            {
                "law": law,
                "status": "pass" if not failures else "fail",
                "witnesses": failures[:3],
            }
        )

    alabs = q.a_space.labels
    avecs = {l: q.a_space.basis_vector(l) for l in alabs}
    fails = []
    for i in alabs:
        for j in alabs:
            for k in alabs:
                lhs = q.a_mul(q.a_mul(avecs[i], avecs[j]), avecs[k])
                rhs = q.a_mul(avecs[i], q.a_mul(avecs[j], avecs[k]))
                if lhs != rhs:
                    fails.append(f"({i}.{j}).{k} != {i}.({j}.{k})")
    if q.qtype == "B":
        # the type-B star algebra is a Clifford Jordan algebra: commutative
        # with unit, not associative in general
        record("a commutative (Jordan)", [
            f"{i}.{j} != {j}.{i}"
            for i in alabs
            for j in alabs
            if q.a_mul(avecs[i], avecs[j]) != q.a_mul(avecs[j], avecs[i])
        ])
        # Clifford structure: associativity on triples with at most one
        # skew factor (A associative, A-module law on B, form A-bilinear)
        apart = [SparseVector(q.a_space, dict(r.entries)) for r in q.a_part_sub.rows]
        bpart = [SparseVector(q.a_space, dict(r.entries)) for r in q.b_part_sub.rows]
        cj_fails = []
        for tag, pool in (("AAA", (apart, apart, apart)),
                          ("AAB", (apart, apart, bpart)),
                          ("ABB", (apart, bpart, bpart))):
            for x in pool[0]:
                for y in pool[1]:
                    for z in pool[2]:
                        if q.a_mul(q.a_mul(x, y), z) != q.a_mul(x, q.a_mul(y, z)):
                            cj_fails.append(f"associator nonzero on {tag} triple")
        record("Clifford Jordan structure", cj_fails)
    else:
        record("a associative", fails)
    record(
        "unit law",
        [
            lab
            for lab in alabs
            if q.a_mul(q.unit, avecs[lab]) != avecs[lab]
            or q.a_mul(avecs[lab], q.unit) != avecs[lab]
        ],
    )
    record(
        "star is an involution (star^2 = id)",
        [
            lab
            for lab in alabs
            if q.a_star(q.a_star(avecs[lab])) != avecs[lab]
        ],
    )
    if q.qtype in ("C", "BC", "B"):
        record(
            "star antiautomorphism ((xy)* = y*x*)",
            [
                f"({i}.{j})*"
                for i in alabs
                for j in alabs
                if q.a_star(q.a_mul(avecs[i], avecs[j]))
                != q.a_mul(q.a_star(avecs[j]), q.a_star(avecs[i]))
            ],
        )
    if q.qtype in ("A", "D"):
        ident = SparseMatrix.identity(q.a_space)
        record("star = id", [] if q.star == ident else ["star differs from identity"])
    if q.qtype in ("D",):
        record(
            "a commutative",
            [
                f"{i}.{j}"
                for i in alabs
                for j in alabs
                if q.a_mul(avecs[i], avecs[j]) != q.a_mul(avecs[j], avecs[i])
            ],
        )
    if q.qtype in ("A", "B", "C", "D"):
        record("module part trivial", [] if q.c_dim == 0 else ["C is nonzero"])
    if q.qtype == "BC":
        clabs = q.c_space.labels
        cvecs = {l: q.c_space.basis_vector(l) for l in clabs}
        record(
            "module unital",
            [l for l in clabs if q.c_act(q.unit, cvecs[l]) != cvecs[l]],
        )
        record(
            "module associative ((xy).c = x.(y.c))",
            [
                f"({i}.{j}).{l}"
                for i in alabs
                for j in alabs
                for l in clabs
                if q.c_act(q.a_mul(avecs[i], avecs[j]), cvecs[l])
                != q.c_act(avecs[i], q.c_act(avecs[j], cvecs[l]))
            ],
        )
        record(
            "f skew-hermitian (f(c,c')* = -f(c',c))",
            [
                f"f({l},{m})"
                for l in clabs
                for m in clabs
                if q.a_star(q.f_val(cvecs[l], cvecs[m]))
                != q.f_val(cvecs[m], cvecs[l]).scale(Q(-1))
            ],
        )
        record(
            "f left semilinear (f(x.c, c') = x f(c, c'))",
            [
                f"f({i}.{l},{m})"
                for i in alabs
                for l in clabs
                for m in clabs
                if q.f_val(q.c_act(avecs[i], cvecs[l]), cvecs[m])
                != q.a_mul(avecs[i], q.f_val(cvecs[l], cvecs[m]))
            ],
        )
    record(
        "a = A (+) B eigenspace split",
        []
        if q.a_part_sub.dim + q.b_part_sub.dim == q.a_dim
        else [f"dim A + dim B = {q.a_part_sub.dim}+{q.b_part_sub.dim} != {q.a_dim}"],
    )
    ok = all(c["status"] == "pass" for c in checks)
    return {"quadruple": q.name, "type": q.qtype, "valid": ok, "checks": checks}


# ---------------------------------------------------------------------------
# the relation space K and the quotient {b,b}_ell


def relation_generators(q: CoordinateQuadruple) -> list[SparseVector]:
    """The seven generator families of K, instantiated over basis tuples."""
    tsp = tensor_space(q.b_space, q.b_space)
    gens: list[SparseVector] = []

    def tens(x: SparseVector, y: SparseVector) -> SparseVector:
        entries = {}
        for lx, vx in x.entries.items():
            for ly, vy in y.entries.items():
                entries[tensor_label(lx, ly)] = vx * vy
        return SparseVector(tsp, entries)

    avecs = [q.b_space.basis_vector(l) for l in q.a_space.labels]
    cvecs = [q.b_space.basis_vector(l) for l in q.c_space.labels]
    apart = [
        SparseVector(q.b_space, dict(r.entries)) for r in q.a_part_sub.rows
    ]
    bpart = [
        SparseVector(q.b_space, dict(r.entries)) for r in q.b_part_sub.rows
    ]
    for al in avecs:
        for c in cvecs:
            gens.append(tens(al, c))
            gens.append(tens(c, al))
    for a in apart:
        for b in bpart:
            gens.append(tens(a, b))
    for x in avecs:
        for y in avecs:
            gens.append(tens(x, y) + tens(y, x))
    for i, c in enumerate(cvecs):
        for cp in cvecs[i + 1 :]:
            gens.append(tens(c, cp) - tens(cp, c))
    for x in avecs:
        for y in avecs:
            for z in avecs:
                xy = _lift_a(q, q.a_mul(_drop(q, x), _drop(q, y)))
                zx = _lift_a(q, q.a_mul(_drop(q, z), _drop(q, x)))
                yz = _lift_a(q, q.a_mul(_drop(q, y), _drop(q, z)))
                gens.append(tens(xy, z) + tens(zx, y) + tens(yz, x))
    for c in cvecs:
        for cp in cvecs:
            for al in avecs:
                a_only = _drop(q, al)
                f_ccp = _lift_a(q, q.f_val(_dropc(q, c), _dropc(q, cp)))
                sc = _lift_c(q, q.c_act(q.a_star(a_only), _dropc(q, cp)))
                ac = _lift_c(q, q.c_act(a_only, _dropc(q, c)))
                gens.append(tens(f_ccp, al) + tens(sc, c) - tens(ac, cp))
    return gens


def _drop(q, v: SparseVector) -> SparseVector:
    return SparseVector(q.a_space, {l: c for l, c in v.entries.items() if l in q.a_space})


def _dropc(q, v: SparseVector) -> SparseVector:
    return SparseVector(q.c_space, {l: c for l, c in v.entries.items() if l in q.c_space})


def _lift_a(q, v: SparseVector) -> SparseVector:
    return SparseVector(q.b_space, dict(v.entries))


def _lift_c(q, v: SparseVector) -> SparseVector:
    return SparseVector(q.b_space, dict(v.entries))


class BBQuotient:
    """{b, b}_ell = (b (x) b)/K with the derivation-induced bracket."""

    __slots__ = (
        "q",
        "ell",
        "tensor",
        "relations",
        "quotient",
        "pair_derivations",
        "_deriv_cache",
    )

    def __init__(self, q: CoordinateQuadruple, ell: int, check: bool = True):
        self.q = q
        self.ell = ell
        self.tensor = tensor_space(q.b_space, q.b_space)
        gens = relation_generators(q)
        self.relations = rref(gens, self.tensor)
        self.quotient = QuotientSpace(self.tensor, self.relations)
        self._deriv_cache: dict[str, SparseMatrix] = {}
        if check:
            self._verify_well_defined(gens)

    # derivation attached to a tensor vector, by bilinearity
    def derivation_of(self, t: SparseVector) -> SparseMatrix:
        acc = SparseMatrix.zero(self.q.b_space, self.q.b_space)
        for lab, coeff in t.entries.items():
            acc = acc + self._pair_derivation(lab).scale(coeff)
        return acc

    def _pair_derivation(self, lab: str) -> SparseMatrix:
        d = self._deriv_cache.get(lab)
        if d is None:
            l1, l2 = split_tensor_label(lab)
            d = derivation(
                self.q,
                self.ell,
                self.q.b_space.basis_vector(l1),
                self.q.b_space.basis_vector(l2),
            )
            self._deriv_cache[lab] = d
        return d

    def apply_pair_action(self, d: SparseMatrix, t: SparseVector) -> SparseVector:
        """(d (x) 1 + 1 (x) d) applied to a tensor vector."""
        out: dict[str, Fraction] = {}
        for lab, coeff in t.entries.items():
            l1, l2 = split_tensor_label(lab)
            img1 = d.apply(self.q.b_space.basis_vector(l1))
            for r, v in img1.entries.items():
                key = tensor_label(r, l2)
                s = out.get(key, QZERO) + coeff * v
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
            img2 = d.apply(self.q.b_space.basis_vector(l2))
            for r, v in img2.entries.items():
                key = tensor_label(l1, r)
                s = out.get(key, QZERO) + coeff * v
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return SparseVector(self.tensor, out)

    def _verify_well_defined(self, gens: list[SparseVector]):
        for g in self.relations.rows:
            if not self.derivation_of(g).is_zero():
                raise InternalConsistencyError(
                    "total derivation of a relation vector is nonzero", witness=g
                )
        for lab in self.quotient.coset_labels:
            d = self._pair_derivation(lab)
            if d.is_zero():
                continue
            for g in self.relations.rows:
                img = self.apply_pair_action(d, g)
                if not self.relations.contains(img):
                    raise InternalConsistencyError(
                        "bracket does not preserve the relation space",
                        witness=(lab, g),
                    )

    @property
    def dim(self) -> int:
        return self.quotient.dim

    def project_pair(self, x: SparseVector, y: SparseVector) -> SparseVector:
        """{x, y}_ell as a coset vector, for x, y in b."""
        entries = {}
        for lx, vx in x.entries.items():
            for ly, vy in y.entries.items():
                key = tensor_label(lx, ly)
                entries[key] = entries.get(key, QZERO) + vx * vy
        return self.quotient.project(SparseVector(self.tensor, entries))

    def bracket_cosets(self, u: SparseVector, v: SparseVector) -> SparseVector:
        """Bracket of two coset vectors (coset-space coordinates)."""
        d = self.derivation_of(self.quotient.lift(u))
        img = self.apply_pair_action(d, self.quotient.lift(v))
        return self.quotient.project(img)

    def derivation_of_coset(self, u: SparseVector) -> SparseMatrix:
        return self.derivation_of(self.quotient.lift(u))


def build_bb(q: CoordinateQuadruple, ell: int) -> BBQuotient:
    return BBQuotient(q, ell)


class HomologySubspace:
    __slots__ = ("parent", "basis", "uniform_checked")

    def __init__(self, parent: BBQuotient, basis: Subspace):
        self.parent = parent
        self.basis = basis
        self.uniform_checked = None

    @property
    def dim(self) -> int:
        return self.basis.dim


def full_homology(bb: BBQuotient) -> HomologySubspace:
    """Kernel of coset -> total derivation; verified central in {b,b}_ell."""
    csp = bb.quotient.coset_space
    b_space = bb.q.b_space
    end_labels = [f"D:{r}|{c}" for r in b_space.labels for c in b_space.labels]
    end_space = BasedSpace(end_labels)
    rows_by_pos: dict[str, dict[str, Fraction]] = {}
    for lab in csp.labels:
        d = bb.derivation_of_coset(csp.basis_vector(lab))
        for (r, c), v in d.entries.items():
            rows_by_pos.setdefault(f"D:{r}|{c}", {})[lab] = v
    rows = [SparseVector(csp, entries) for entries in rows_by_pos.values()]
    fh = kernel_of_rows(rows, csp)
    for f in fh.rows:
        if not bb.derivation_of_coset(f).is_zero():
            raise InternalConsistencyError("homology vector has nonzero derivation", f)
        for lab in csp.labels:
            if not bb.bracket_cosets(csp.basis_vector(lab), f).is_zero():
                raise InternalConsistencyError(
                    "homology element is not central", witness=(lab, f)
                )
    hs = HomologySubspace(bb, fh)
    return hs


def beta_star_map_rows(q: CoordinateQuadruple) -> dict[str, SparseVector]:
    """The linear map b(x)b -> a sending x(x)y to beta*_{x,y}, as rows."""
    tsp = tensor_space(q.b_space, q.b_space)
    rows: dict[str, dict[str, Fraction]] = {}
    for l1 in q.b_space.labels:
        for l2 in q.b_space.labels:
            val = beta_star(q, q.b_space.basis_vector(l1), q.b_space.basis_vector(l2))
            for r, v in val.entries.items():
                rows.setdefault(r, {})[tensor_label(l1, l2)] = v
    return {r: SparseVector(tsp, entries) for r, entries in rows.items()}


def check_uniform(
    bb: BBQuotient,
    k_span: Sequence[SparseVector],
    fh: HomologySubspace | None = None,
    cross_check_ell: int | None = None,
) -> dict:
    """Decide the uniform property for span(k_span) inside FH; exact.

    The condition collapses to: the beta* map vanishes on the preimage
    K + lift(span(k_span)) of the span.  The optional cross-check re-runs
    the verdict at a second ell value (the claim is that it cannot change).
    """
    if fh is None:
        fh = full_homology(bb)
    for v in k_span:
        if not fh.basis.contains(v):
            raise ValueError("spanning vector lies outside the full homology group")
    verdict, witness = _uniform_verdict(bb, k_span)
    report = {
        "ell": bb.ell,
        "k_dim": rref(list(k_span), bb.quotient.coset_space).dim if k_span else 0,
        "uniform": verdict,
        "witness": witness,
    }
    if cross_check_ell is not None and cross_check_ell != bb.ell:
        bb2 = BBQuotient(bb.q, cross_check_ell, check=False)
        fh2 = full_homology(bb2)
        k2 = list(k_span)
        for v in k2:
            if not fh2.basis.contains(v):
                raise InternalConsistencyError(
                    "homology membership changed with ell", witness=v
                )
        verdict2, _ = _uniform_verdict(bb2, k2)
        report["cross_check"] = {"ell": cross_check_ell, "uniform": verdict2}
        if verdict2 != verdict:
            raise InternalConsistencyError(
                "uniform verdict changed between ell values", witness=report
            )
    fh.uniform_checked = verdict
    return report


def _uniform_verdict(bb: BBQuotient, k_span: Sequence[SparseVector]):
    preimage = list(bb.relations.rows) + [bb.quotient.lift(v) for v in k_span]
    bsm = beta_star_map_rows(bb.q)
    for t in preimage:
        total = bb.q.a_space.zero()
        for r, row in bsm.items():
            val = sum(
                (row.get(lab) * c for lab, c in t.entries.items() if row.get(lab)),
                QZERO,
            )
            if val:
                total = total + bb.q.a_space.basis_vector(r).scale(val)
        if not total.is_zero():
            return False, repr(t)
    return True, None


# ---------------------------------------------------------------------------
# presets and JSON files


def _matrix_algebra_tables(k: int):
    labels = [f"m:{i},{j}" for i in range(k) for j in range(k)]
    mult = {}
    for i in range(k):
        for j in range(k):
            for r in range(k):
                for s in range(k):
                    if j == r:
                        mult[(f"m:{i},{j}", f"m:{r},{s}")] = {f"m:{i},{s}": QONE}
    unit = {f"m:{i},{i}": QONE for i in range(k)}
    return labels, mult, unit


def _standard_skew(m: int) -> list[list[Fraction]]:
    g = [[QZERO] * m for _ in range(m)]
    for b in range(m // 2):
        g[2 * b][2 * b + 1] = QONE
        g[2 * b + 1][2 * b] = -QONE
    return g


def preset_quadruple(name: str, **params) -> CoordinateQuadruple:
    """The named minimal faithful instances of the five quadruple types."""
    if name == "matrix":
        k = int(params.get("k", 2))
        labels, mult, unit = _matrix_algebra_tables(k)
        star = {(l, l): QONE for l in labels}
        return CoordinateQuadruple(
            "A", labels, mult, unit, star, name=f"matrix:k={k}"
        )
    if name == "group_ring":
        m = int(params.get("m", 3))
        labels = [f"g:{i}" for i in range(m)]
        mult = {
            (f"g:{i}", f"g:{j}"): {f"g:{(i + j) % m}": QONE}
            for i in range(m)
            for j in range(m)
        }
        star = {(l, l): QONE for l in labels}
        return CoordinateQuadruple(
            "D", labels, mult, unit={"g:0": QONE}, star=star, name=f"group_ring:m={m}"
        )
    if name == "clifford":
        d = int(params.get("d", 2))
        labels = ["one"] + [f"w:{i}" for i in range(1, d + 1)]
        mult = {}
        for l in labels:
            mult[("one", l)] = {l: QONE}
            mult[(l, "one")] = {l: QONE}
        for i in range(1, d + 1):
            for j in range(1, d + 1):
                mult[(f"w:{i}", f"w:{j}")] = {"one": QONE} if i == j else {}
        mult[("one", "one")] = {"one": QONE}
        star = {("one", "one"): QONE}
        for i in range(1, d + 1):
            star[(f"w:{i}", f"w:{i}")] = -QONE
        return CoordinateQuadruple(
            "B", labels, mult, unit={"one": QONE}, star=star, name=f"clifford:d={d}"
        )
    if name == "matrix_transpose":
        k = int(params.get("k", 2))
        labels, mult, unit = _matrix_algebra_tables(k)
        star = {(f"m:{j},{i}", f"m:{i},{j}"): QONE for i in range(k) for j in range(k)}
        return CoordinateQuadruple(
            "C", labels, mult, unit, star, name=f"matrix_transpose:k={k}"
        )
    if name == "symplectic":
        m = int(params.get("m", 2))
        if m % 2:
            raise ValueError("symplectic preset needs even m")
        a_labels = ["one"]
        mult = {("one", "one"): {"one": QONE}}
        star = {("one", "one"): QONE}
        c_labels = [f"c:{i}" for i in range(m)]
        action = {("one", c): {c: QONE} for c in c_labels}
        g = _standard_skew(m)
        f_table = {
            (f"c:{i}", f"c:{j}"): ({"one": g[i][j]} if g[i][j] else {})
            for i in range(m)
            for j in range(m)
        }
        return CoordinateQuadruple(
            "BC",
            a_labels,
            mult,
            {"one": QONE},
            star,
            c_labels,
            action,
            f_table,
            name=f"symplectic:m={m}",
        )
    if name == "matrix_hermitian":
        k = int(params.get("k", 2))
        m = int(params.get("m", 2))
        if m % 2:
            raise ValueError("matrix_hermitian preset needs even m")
        a_labels, mult, unit = _matrix_algebra_tables(k)
        star = {(f"m:{j},{i}", f"m:{i},{j}"): QONE for i in range(k) for j in range(k)}
        c_labels = [f"c:{i},{j}" for i in range(k) for j in range(m)]
        action = {}
        for i in range(k):
            for j in range(k):
                for r in range(k):
                    for s in range(m):
                        if j == r:
                            action[(f"m:{i},{j}", f"c:{r},{s}")] = {f"c:{i},{s}": QONE}
        g = _standard_skew(m)
        f_table = {}
        for i in range(k):
            for j in range(m):
                for r in range(k):
                    for s in range(m):
                        # f(c, c') = c G c'^T: entry (i, r) gets G[j][s]
                        if g[j][s]:
                            f_table[(f"c:{i},{j}", f"c:{r},{s}")] = {
                                f"m:{i},{r}": g[j][s]
                            }
        return CoordinateQuadruple(
            "BC",
            a_labels,
            mult,
            unit,
            star,
            c_labels,
            action,
            f_table,
            name=f"matrix_hermitian:k={k},m={m}",
        )
    raise ValueError(f"unknown preset {name!r}")


PRESET_NAMES = (
    "matrix",
    "group_ring",
    "clifford",
    "matrix_transpose",
    "symplectic",
    "matrix_hermitian",
)


def parse_preset_spec(spec: str) -> CoordinateQuadruple:
    """Parse "name" or "name:k=2,m=4" into a validated preset quadruple."""
    name, _, rest = spec.partition(":")
    params = {}
    if rest:
        for piece in rest.split(","):
            key, _, val = piece.partition("=")
            params[key.strip()] = int(val)
    q = preset_quadruple(name.strip(), **params)
    report = validate_quadruple(q)
    if not report["valid"]:
        raise InternalConsistencyError(f"preset {spec} failed validation", report)
    return q


def quadruple_to_json(q: CoordinateQuadruple) -> dict:
    """File form: all tables indexed over integer basis positions."""
    apos = {lab: i for i, lab in enumerate(q.a_space.labels)}
    cpos = {lab: i for i, lab in enumerate(q.c_space.labels)}

    def table3(tab, left, right, out_pos):
        out = []
        for (i, j), vec in tab.items():
            for lab, val in vec.items_sorted():
                out.append([left[i], right[j], out_pos[lab], q_str(val)])
        out.sort(key=lambda row: row[:3])
        return out

    star_entries = sorted(
        [apos[r], apos[c], q_str(v)] for (r, c), v in q.star.entries.items()
    )
    return {
        "type": q.qtype,
        "name": q.name,
        "a_dim": q.a_dim,
        "structure_constants": table3(q.mult, apos, apos, apos),
        "unit": sorted([apos[lab], q_str(v)] for lab, v in q.unit.entries.items()),
        "star": star_entries,
        "c_dim": q.c_dim,
        "action": table3(q.action, apos, cpos, cpos),
        "f": table3(q.f_table, cpos, cpos, apos),
    }


def quadruple_from_json(data: dict) -> CoordinateQuadruple:
    a_labels = [f"a:{i}" for i in range(int(data["a_dim"]))]
    c_labels = [f"c:{i}" for i in range(int(data.get("c_dim", 0)))]

    def untable(rows, left, right, out):
        table: dict[tuple[str, str], dict[str, Fraction]] = {}
        for i, j, k, val in rows:
            table.setdefault((left[i], right[j]), {})[out[k]] = q_parse(val)
        return table

    return CoordinateQuadruple(
        data["type"],
        a_labels,
        untable(data["structure_constants"], a_labels, a_labels, a_labels),
        {a_labels[i]: q_parse(v) for i, v in data["unit"]},
        {(a_labels[r], a_labels[c]): q_parse(v) for r, c, v in data["star"]},
        c_labels,
        untable(data.get("action", []), a_labels, c_labels, c_labels),
        untable(data.get("f", []), c_labels, c_labels, a_labels),
        name=data.get("name", data["type"]),
    )


def load_quadruple_file(path: str) -> CoordinateQuadruple:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return quadruple_from_json(data)
