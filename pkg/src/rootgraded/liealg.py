"""Finite truncations of the classical split simple Lie algebras.

sl, o_B, o_D and sp are constructed as exact kernels of their defining
linear conditions (trace zero, or skew-adjointness for the family's
bilinear form), then split into simultaneous ad-eigenspaces of the
standard Cartan.  The classical spanning-vector formulas are used as
cross-checks in the test suite, not as the construction; the eigenvalue
equation [h, x] = alpha(h) x is the ground truth for every root space.

The bilinear forms keep their factor 2 verbatim; the bracket tables of
the graded construction depend on those constants.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .exactla import (
    BasedSpace,
    Q,
    QONE,
    QZERO,
    ShapeError,
    SparseMatrix,
    SparseVector,
    Subspace,
    anticommutator,
    commutator,
    kernel_of_rows,
    rref,
)
from .rootsys import Root, generate, reflect

ALGEBRA_FAMILIES = ("A", "B", "C", "D")


class DegenerateInputError(ValueError):
    """Truncation too small to host the family's nonzero roots."""


# ---------------------------------------------------------------------------
# based spaces, forms and gl coordinates


def natural_labels(family: str, n: int) -> list[str]:
    if family == "A":
        return [f"v:{i}" for i in range(1, n + 1)]
    labels = []
    if family == "B":
        labels.append("v:0")
    labels += [f"v:{i}" for i in range(1, n + 1)]
    labels += [f"vb:{i}" for i in range(1, n + 1)]
    return labels


def label_weight(lab: str) -> Root:
    kind, _, num = lab.partition(":")
    i = int(num)
    if i == 0:
        return Root.zero()
    return Root.eps(i) if kind == "v" else Root.eps(i, -1)


class FormedSpace:
    """A based space carrying the family's distinguished bilinear form."""

    __slots__ = ("family", "n", "space", "gram", "symmetry")

    def __init__(self, family: str, n: int):
        self.family = family
        self.n = n
        self.space = BasedSpace(natural_labels(family, n))
        entries: dict[tuple[str, str], Fraction] = {}
        if family == "A":
            self.gram = None
            self.symmetry = None
            return
        two = Q(2)
        for i in range(1, n + 1):
            vi, vbi = f"v:{i}", f"vb:{i}"
            if family in ("B", "D"):
                entries[(vi, vbi)] = two
                entries[(vbi, vi)] = two
            else:  # C and the BC construction share the symplectic form
                entries[(vi, vbi)] = two
                entries[(vbi, vi)] = -two
        if family == "B":
            entries[("v:0", "v:0")] = two
        self.gram = SparseMatrix(self.space, self.space, entries)
        self.symmetry = "skew" if family == "C" else "symmetric"

    def form(self, u: SparseVector, w: SparseVector) -> Fraction:
        if self.gram is None:
            raise ShapeError("type A space carries no form")
        gw = self.gram.apply(w)
        return sum((c * gw.get(lab) for lab, c in u.entries.items()), QZERO)


def gl_space(space: BasedSpace) -> BasedSpace:
    return BasedSpace([f"E:{r}|{c}" for r in space.labels for c in space.labels])


def gl_label(r: str, c: str) -> str:
    return f"E:{r}|{c}"


def split_gl_label(lab: str) -> tuple[str, str]:
    r, c = lab[2:].split("|", 1)
    return r, c


def mat_to_vec(m: SparseMatrix, glsp: BasedSpace) -> SparseVector:
    return SparseVector(glsp, {gl_label(r, c): v for (r, c), v in m.entries.items()})


def vec_to_mat(v: SparseVector, space: BasedSpace) -> SparseMatrix:
    entries = {}
    for lab, val in v.entries.items():
        r, c = split_gl_label(lab)
        entries[(r, c)] = val
    return SparseMatrix(space, space, entries)


def matrix_unit(j: str, k: str, space: BasedSpace) -> SparseMatrix:
    """e_{j,k}: v_i -> delta_{k,i} v_j."""
    space.pos(j), space.pos(k)
    return SparseMatrix(space, space, {(j, k): QONE})


def gl_coord_weight(lab: str) -> Root:
    r, c = split_gl_label(lab)
    return label_weight(r) - label_weight(c)


# ---------------------------------------------------------------------------
# weight-adapted subspace machinery


class WeightedBasis:
    """A subspace of gl coordinates organized by ad-weights of the Cartan.

    Basis order: the weight-zero block first, then nonzero weights in
    sorted order.  Used for both the algebras and the symmetric module.
    """

    __slots__ = (
        "glsp",
        "space",
        "weight_subspaces",
        "basis_vecs",
        "basis_mats",
        "weight_of_basis",
        "zero_block",
        "root_space_index",
        "full",
    )

    def __init__(self, glsp: BasedSpace, space: BasedSpace, rows: Sequence[SparseVector]):
        self.glsp = glsp
        self.space = space
        buckets: dict[Root, list[SparseVector]] = {}
        for row in rows:
            parts: dict[Root, dict[str, Fraction]] = {}
            for lab, val in row.entries.items():
                parts.setdefault(gl_coord_weight(lab), {})[lab] = val
            for w, entries in parts.items():
                buckets.setdefault(w, []).append(SparseVector(glsp, entries))
        self.weight_subspaces = {
            w: rref(vecs, glsp) for w, vecs in buckets.items()
        }
        zero = Root.zero()
        self.basis_vecs: list[SparseVector] = []
        self.weight_of_basis: list[Root] = []
        self.root_space_index: dict[Root, list[int]] = {}
        ordered = ([zero] if zero in self.weight_subspaces else []) + sorted(
            w for w in self.weight_subspaces if not w.is_zero()
        )
        for w in ordered:
            positions = []
            for r in self.weight_subspaces[w].rows:
                positions.append(len(self.basis_vecs))
                self.basis_vecs.append(r)
                self.weight_of_basis.append(w)
            if not w.is_zero():
                self.root_space_index[w] = positions
        zero_sub = self.weight_subspaces.get(zero)
        self.zero_block = zero_sub.dim if zero_sub is not None else 0
        self.basis_mats = [vec_to_mat(v, space) for v in self.basis_vecs]
        self.full = rref(self.basis_vecs, glsp)

    @property
    def dim(self) -> int:
        return len(self.basis_vecs)

    def coords_of_vec(self, v: SparseVector) -> dict[int, Fraction]:
        """Coefficients over the weight-adapted basis; raises if outside."""
        parts: dict[Root, dict[str, Fraction]] = {}
        for lab, val in v.entries.items():
            parts.setdefault(gl_coord_weight(lab), {})[lab] = val
        out: dict[int, Fraction] = {}
        for w, entries in parts.items():
            sub = self.weight_subspaces.get(w)
            if sub is None:
                raise ShapeError(f"component of weight {w} lies outside the span")
            coords = sub.coordinates(SparseVector(self.glsp, entries))
            base = self._block_start(w)
            for k, c in enumerate(coords):
                if c:
                    out[base + k] = c
        return out

    def _block_start(self, w: Root) -> int:
        if w.is_zero():
            return 0
        return self.root_space_index[w][0]

    def coords_of_mat(self, m: SparseMatrix) -> dict[int, Fraction]:
        return self.coords_of_vec(mat_to_vec(m, self.glsp))

    def contains_mat(self, m: SparseMatrix) -> bool:
        return self.full.contains(mat_to_vec(m, self.glsp))


# ---------------------------------------------------------------------------
# the classical algebras


class MatrixLieAlgebra:
    __slots__ = ("family", "n", "nat", "glsp", "wb", "cartan", "roots")

    def __init__(self, family: str, n: int):
        if family not in ALGEBRA_FAMILIES:
            raise ValueError(f"unknown family {family!r}")
        min_n = 1 if family == "B" else 2
        if n < min_n:
            raise DegenerateInputError(
                f"family {family} needs truncation size >= {min_n} to host nonzero roots"
            )
        self.family = family
        self.n = n
        self.nat = FormedSpace(family, n)
        space = self.nat.space
        self.glsp = gl_space(space)
        rows = defining_condition_rows(self.nat)
        ker = kernel_of_rows(rows, self.glsp)
        self.wb = WeightedBasis(self.glsp, space, ker.rows)
        if family == "A":
            self.cartan = [
                matrix_unit(f"v:{i}", f"v:{i}", space)
                - matrix_unit(f"v:{i+1}", f"v:{i+1}", space)
                for i in range(1, n)
            ]
        else:
            self.cartan = [
                matrix_unit(f"v:{i}", f"v:{i}", space)
                - matrix_unit(f"vb:{i}", f"vb:{i}", space)
                for i in range(1, n + 1)
            ]
        self.roots = generate(family, n)

    @property
    def dim(self) -> int:
        return self.wb.dim

    @property
    def space(self) -> BasedSpace:
        return self.nat.space

    @property
    def basis_mats(self) -> list[SparseMatrix]:
        return self.wb.basis_mats

    @property
    def basis_vecs(self) -> list[SparseVector]:
        return self.wb.basis_vecs

    @property
    def cartan_dim(self) -> int:
        return self.wb.zero_block

    @property
    def root_space_index(self) -> dict[Root, list[int]]:
        return self.wb.root_space_index

    def coords_of_mat(self, m: SparseMatrix) -> dict[int, Fraction]:
        return self.wb.coords_of_mat(m)

    def contains_mat(self, m: SparseMatrix) -> bool:
        return self.wb.contains_mat(m)

    def root_vector(self, alpha: Root) -> SparseMatrix:
        positions = self.wb.root_space_index[alpha]
        if len(positions) != 1:
            raise ShapeError(f"root space of {alpha} is not one dimensional")
        return self.wb.basis_mats[positions[0]]


def defining_condition_rows(nat: FormedSpace) -> list[SparseVector]:
    """Linear conditions cutting the algebra out of gl, as rows over gl coords."""
    glsp = gl_space(nat.space)
    labels = nat.space.labels
    if nat.family == "A":
        return [SparseVector(glsp, {gl_label(l, l): QONE for l in labels})]
    gram = nat.gram
    cols: dict[str, list[tuple[str, Fraction]]] = {}
    rows_g: dict[str, list[tuple[str, Fraction]]] = {}
    for (r, c), v in gram.entries.items():
        rows_g.setdefault(r, []).append((c, v))
        cols.setdefault(c, []).append((r, v))
    out = []
    for u in labels:
        for w in labels:
            # (phi^T G + G phi)[u, w] = sum_t phi[t,u] G[t,w] + sum_t G[u,t] phi[t,w]
            entries: dict[str, Fraction] = {}
            for t, val in cols.get(w, ()):
                key = gl_label(t, u)
                entries[key] = entries.get(key, QZERO) + val
            for t, val in rows_g.get(u, ()):
                key = gl_label(t, w)
                entries[key] = entries.get(key, QZERO) + val
            if entries:
                out.append(SparseVector(glsp, entries))
    return out


def build_algebra(family: str, n: int) -> MatrixLieAlgebra:
    return MatrixLieAlgebra(family, n)


def expected_dimension(family: str, n: int) -> int:
    return {
        "A": n * n - 1,
        "B": 2 * n * n + n,
        "C": 2 * n * n + n,
        "D": 2 * n * n - n,
    }[family]


# ---------------------------------------------------------------------------
# modules


class RepModule:
    """A representation carried by an explicit matrix space.

    kind "V" is the natural module; kind "S" (family C only) is the space
    of traceless form-symmetric maps with the commutator action, solved
    from its defining linear conditions.
    """

    __slots__ = ("kind", "algebra", "space", "wb", "weights")

    def __init__(self, algebra: MatrixLieAlgebra, kind: str):
        self.kind = kind
        self.algebra = algebra
        if kind == "V":
            self.space = algebra.space
            self.wb = None
            self.weights = {}
            for lab in self.space.labels:
                self.weights.setdefault(label_weight(lab), []).append(lab)
        elif kind == "S":
            if algebra.family != "C":
                raise ValueError("kind S is only defined for family C")
            nat = algebra.nat
            glsp = algebra.glsp
            labels = nat.space.labels
            rows = [SparseVector(glsp, {gl_label(l, l): QONE for l in labels})]
            gram = nat.gram
            cols: dict[str, list[tuple[str, Fraction]]] = {}
            rows_g: dict[str, list[tuple[str, Fraction]]] = {}
            for (r, c), v in gram.entries.items():
                rows_g.setdefault(r, []).append((c, v))
                cols.setdefault(c, []).append((r, v))
            for u in labels:
                for w in labels:
                    # (phi^T G - G phi)[u, w] = 0  <=>  (phi v, w) = (v, phi w)
                    entries: dict[str, Fraction] = {}
                    for t, val in cols.get(w, ()):
                        key = gl_label(t, u)
                        entries[key] = entries.get(key, QZERO) + val
                    for t, val in rows_g.get(u, ()):
                        key = gl_label(t, w)
                        entries[key] = entries.get(key, QZERO) - val
                    if entries:
                        rows.append(SparseVector(glsp, entries))
            ker = kernel_of_rows(rows, glsp)
            self.wb = WeightedBasis(glsp, nat.space, ker.rows)
            self.space = BasedSpace([f"s:{i}" for i in range(self.wb.dim)])
            self.weights = None
        else:
            raise ValueError(f"unknown module kind {kind!r}")

    @property
    def dim(self) -> int:
        return self.space.dim

    def act(self, x: SparseMatrix, v: SparseVector) -> SparseVector:
        """Module action of an algebra element on a module vector."""
        if self.kind == "V":
            return x.apply(v)
        mat = self.to_matrix(v)
        out = commutator(x, mat)
        return self.from_matrix(out)

    def to_matrix(self, v: SparseVector) -> SparseMatrix:
        if self.kind == "V":
            raise ShapeError("natural module vectors are not matrices")
        acc: dict[tuple[str, str], Fraction] = {}
        for lab, c in v.entries.items():
            i = int(lab.split(":")[1])
            for key, val in self.wb.basis_mats[i].entries.items():
                s = acc.get(key, QZERO) + c * val
                if s:
                    acc[key] = s
                else:
                    acc.pop(key, None)
        return SparseMatrix(self.algebra.space, self.algebra.space, acc)

    def from_matrix(self, m: SparseMatrix) -> SparseVector:
        coords = self.wb.coords_of_mat(m)
        return SparseVector(self.space, {f"s:{i}": c for i, c in coords.items()})

    def action_matrix(self, x: SparseMatrix) -> SparseMatrix:
        cols = {}
        for lab in self.space.labels:
            img = self.act(x, self.space.basis_vector(lab))
            for r, val in img.entries.items():
                cols[(r, lab)] = val
        return SparseMatrix(self.space, self.space, cols)

    def weight_index(self) -> dict[Root, Subspace]:
        """Weight -> subspace of the module's own coordinate space."""
        if self.kind == "V":
            return {
                w: rref([self.space.basis_vector(l) for l in labs], self.space)
                for w, labs in self.weights.items()
            }
        out: dict[Root, list[SparseVector]] = {}
        for i, w in enumerate(self.wb.weight_of_basis):
            out.setdefault(w, []).append(self.space.basis_vector(f"s:{i}"))
        return {w: rref(vs, self.space) for w, vs in out.items()}


def build_module(algebra: MatrixLieAlgebra, kind: str) -> RepModule:
    return RepModule(algebra, kind)


class DecompositionError(ValueError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


def weight_decompose(
    space: "BasedSpace | RepModule", cartan_actions: Sequence[SparseMatrix]
) -> dict[tuple, Subspace]:
    """Simultaneous eigenspace decomposition for commuting integer actions.

    Accepts either a based space with explicit action matrices, or a
    RepModule together with Cartan elements of its algebra.  Candidate
    eigenvalues are scanned over the Gershgorin bound; if the eigenspaces
    fail to fill the space, the action was not diagonalizable and the
    offending residual vector is reported.
    """
    if isinstance(space, RepModule):
        module = space
        mats = [module.action_matrix(h) for h in cartan_actions]
        return weight_decompose(module.space, mats)
    pieces: list[tuple[tuple, Subspace]] = [
        ((), rref([space.basis_vector(l) for l in space.labels], space))
    ]
    for h in cartan_actions:
        new_pieces = []
        for tag, sub in pieces:
            dim_found = 0
            bound = _eig_bound(h)
            images = [h.apply(v) for v in sub.rows]
            for lam in range(-bound, bound + 1):
                lam_q = Q(lam)
                shifted = [img - v.scale(lam_q) for img, v in zip(images, sub.rows)]
                coeff_rows = []
                ok = True
                for sv in shifted:
                    try:
                        coeff_rows.append(sub.coordinates(sv))
                    except ShapeError:
                        raise DecompositionError(
                            "cartan action does not preserve the subspace",
                            witness=sv,
                        )
                coeff_space = BasedSpace([f"c:{i}" for i in range(sub.dim)])
                rows = [
                    SparseVector(
                        coeff_space,
                        {f"c:{i}": row[i] for i in range(sub.dim) if row[i]},
                    )
                    for row in _transpose_rows(coeff_rows, sub.dim)
                ]
                ker = kernel_of_rows(rows, coeff_space)
                if ker.dim == 0:
                    continue
                vecs = []
                for kv in ker.rows:
                    acc = space.zero()
                    for lab, c in kv.entries.items():
                        acc = acc + sub.rows[int(lab.split(":")[1])].scale(c)
                    vecs.append(acc)
                eig = rref(vecs, space)
                dim_found += eig.dim
                new_pieces.append((tag + (lam,), eig))
            if dim_found != sub.dim:
                raise DecompositionError(
                    "action is not diagonalizable over the scanned eigenvalues",
                    witness=sub.rows[0],
                )
        pieces = new_pieces
    return dict(pieces)


def _transpose_rows(coeff_rows, dim):
    # rows of the operator matrix in subspace coordinates
    out = []
    for i in range(dim):
        out.append([coeff_rows[j][i] for j in range(dim)])
    return out


def _eig_bound(h: SparseMatrix) -> int:
    row_sums: dict[str, Fraction] = {}
    for (r, _c), v in h.entries.items():
        row_sums[r] = row_sums.get(r, QZERO) + abs(v)
    if not row_sums:
        return 0
    m = max(row_sums.values())
    return int(m) + (0 if m.denominator == 1 and m == int(m) else 1)


# ---------------------------------------------------------------------------
# Clifford Jordan algebras


class CliffordJordan:
    """J(g, W) = A + W with the product of a Clifford Jordan algebra."""

    __slots__ = ("a_space", "a_mult", "a_unit", "w_space", "a_action", "g_form", "space")

    def __init__(
        self,
        a_space: BasedSpace,
        a_mult: Callable[[str, str], SparseVector],
        a_unit: SparseVector,
        w_space: BasedSpace,
        a_action: Callable[[str, str], SparseVector],
        g_form: Callable[[str, str], SparseVector],
    ):
        self.a_space = a_space
        self.a_mult = a_mult
        self.a_unit = a_unit
        self.w_space = w_space
        self.a_action = a_action
        self.g_form = g_form
        self.space = BasedSpace(list(a_space.labels) + list(w_space.labels))

    @staticmethod
    def over_scalars(w_space: BasedSpace, g_form_scalar: Callable[[str, str], Fraction]) -> "CliffordJordan":
        """The common case A = F with a scalar-valued symmetric form."""
        a_space = BasedSpace(["one"])
        unit = a_space.basis_vector("one")

        def mult(_i, _j):
            return unit

        def action(_a, w):
            return w_space.basis_vector(w)

        def form(u, w):
            return unit.scale(g_form_scalar(u, w))

        return CliffordJordan(a_space, mult, unit, w_space, action, form)

    def split(self, x: SparseVector) -> tuple[SparseVector, SparseVector]:
        a = {l: v for l, v in x.entries.items() if l in self.a_space}
        w = {l: v for l, v in x.entries.items() if l in self.w_space}
        return SparseVector(self.a_space, a), SparseVector(self.w_space, w)

    def join(self, a: SparseVector, w: SparseVector) -> SparseVector:
        return SparseVector(self.space, {**a.entries, **w.entries})

    def product(self, x: SparseVector, y: SparseVector) -> SparseVector:
        a1, w1 = self.split(x)
        a2, w2 = self.split(y)
        a_out = self.a_space.zero()
        for i, ci in a1.entries.items():
            for j, cj in a2.entries.items():
                a_out = a_out + self.a_mult(i, j).scale(ci * cj)
        for i, ci in w1.entries.items():
            for j, cj in w2.entries.items():
                a_out = a_out + self.g_form(i, j).scale(ci * cj)
        w_out = self.w_space.zero()
        for i, ci in a1.entries.items():
            for j, cj in w2.entries.items():
                w_out = w_out + self.a_action(i, j).scale(ci * cj)
        for i, ci in a2.entries.items():
            for j, cj in w1.entries.items():
                w_out = w_out + self.a_action(i, j).scale(ci * cj)
        return self.join(a_out, w_out)

    def left_mult(self, x: SparseVector) -> SparseMatrix:
        entries = {}
        for lab in self.space.labels:
            img = self.product(x, self.space.basis_vector(lab))
            for r, v in img.entries.items():
                entries[(r, lab)] = v
        return SparseMatrix(self.space, self.space, entries)


def jordan_product(j: CliffordJordan, x: SparseVector, y: SparseVector) -> SparseVector:
    return j.product(x, y)


def jordan_derivation(j: CliffordJordan, a: SparseVector, b: SparseVector) -> SparseMatrix:
    """D_{a,b} = L_b L_a - L_a L_b."""
    la, lb = j.left_mult(a), j.left_mult(b)
    return (lb @ la) - (la @ lb)


def derivation_span_equals_oB(n: int) -> tuple[bool, int, int]:
    """Span of D_{v,w} restricted to V versus o_B(n), as subspaces of gl(V)."""
    alg = build_algebra("B", n)
    nat = alg.nat

    def scalar_form(u, w):
        return nat.gram.get(u, w)

    cj = CliffordJordan.over_scalars(nat.space, scalar_form)
    glsp = alg.glsp
    span_vecs = []
    labels = nat.space.labels
    for i, u in enumerate(labels):
        for w in labels[i + 1 :]:
            d = jordan_derivation(
                cj, cj.space.basis_vector(u), cj.space.basis_vector(w)
            )
            entries = {}
            for (r, c), v in d.entries.items():
                if r in nat.space and c in nat.space:
                    entries[(r, c)] = v
                elif v:
                    raise ShapeError("derivation does not restrict to V")
            m = SparseMatrix(nat.space, nat.space, entries)
            span_vecs.append(mat_to_vec(m, glsp))
    span = rref(span_vecs, glsp)
    return span == alg.wb.full, span.dim, alg.dim


# ---------------------------------------------------------------------------
# truncation idempotents and the normalized products


class TruncationIdempotent:
    __slots__ = ("subset", "space", "matrix")

    def __init__(self, nat_space: BasedSpace, subset: Iterable[int], include_zero: bool = True):
        self.subset = frozenset(subset)
        self.space = nat_space
        entries = {}
        for lab in nat_space.labels:
            kind, _, num = lab.partition(":")
            i = int(num)
            if (i == 0 and include_zero and lab in nat_space) or i in self.subset:
                entries[(lab, lab)] = QONE
        self.matrix = SparseMatrix(nat_space, nat_space, entries)

    @property
    def size(self) -> int:
        return len(self.subset)


def circ_trunc(
    x: SparseMatrix, y: SparseMatrix, idem: TruncationIdempotent, family: str
) -> SparseMatrix:
    """Family-normalized symmetric product xy + yx - (factor tr(xy)/|I_0|) J_0."""
    base = anticommutator(x, y)
    t = (x @ y).trace()
    if t == 0:
        return base
    factor = Q(2) if family in ("A", "D") else QONE
    return base - idem.matrix.scale(factor * t / Q(idem.size))


def v_ops(
    u: SparseVector,
    v: SparseVector,
    nat: FormedSpace,
    idem: TruncationIdempotent,
    variant: str,
) -> SparseMatrix:
    """The level-normalized pair operators on the natural space."""
    space = nat.space
    half = Q(1, 2)
    uv = nat.form(u, v)
    entries: dict[tuple[str, str], Fraction] = {}

    def add_column(w_lab: str, vec: SparseVector):
        for r, c in vec.entries.items():
            key = (r, w_lab)
            s = entries.get(key, QZERO) + c
            if s:
                entries[key] = s
            else:
                entries.pop(key, None)

    for w_lab in space.labels:
        w = space.basis_vector(w_lab)
        vw = nat.form(v, w)
        if variant == "circ":
            col = u.scale(half * vw) + v.scale(half * nat.form(u, w))
        else:
            col = u.scale(half * vw) + v.scale(half * nat.form(w, u))
        add_column(w_lab, col)
    m = SparseMatrix(space, space, entries)
    if variant == "circ" or uv == 0:
        return m
    if variant == "bracket_ell":
        return m + idem.matrix.scale(uv / Q(2 * idem.size))
    if variant == "bracket_n":
        return m + SparseMatrix.identity(space).scale(uv / Q(2 * nat.n))
    raise ValueError(f"unknown variant {variant!r}")


# ---------------------------------------------------------------------------
# subsystem subalgebras: root spaces of a subsystem plus their coroots


class SubAlgebra:
    __slots__ = ("parent", "roots", "wb", "cartan_sub")

    def __init__(self, parent: MatrixLieAlgebra, roots: Iterable[Root]):
        self.parent = parent
        root_set = {r for r in roots if not r.is_zero()}
        full = set(root_set) | {Root.zero()}
        for a in root_set:
            for b in root_set:
                if reflect(a, b) not in full:
                    raise ValueError(f"subsystem not closed: s_{a}({b}) missing")
        self.roots = root_set
        vecs = []
        for alpha in sorted(root_set):
            for p in parent.root_space_index[alpha]:
                vecs.append(parent.basis_vecs[p])
        cartan_vecs = []
        for alpha in sorted(root_set):
            x = parent.root_vector(alpha)
            y = parent.root_vector(-alpha)
            cartan_vecs.append(mat_to_vec(commutator(x, y), parent.glsp))
        self.cartan_sub = rref(cartan_vecs, parent.glsp)
        self.wb = WeightedBasis(parent.glsp, parent.space, list(self.cartan_sub.rows) + vecs)

    @property
    def dim(self) -> int:
        return self.wb.dim

    def closed_under_bracket(self) -> bool:
        mats = self.wb.basis_mats
        for i, x in enumerate(mats):
            for y in mats[i:]:
                if not self.wb.contains_mat(commutator(x, y)):
                    return False
        return True


def subalgebra_from_subsystem(algebra: MatrixLieAlgebra, roots: Iterable[Root]) -> SubAlgebra:
    return SubAlgebra(algebra, roots)
