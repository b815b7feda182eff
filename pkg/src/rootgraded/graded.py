"""Assembly of the root-graded Lie algebra L(b, K) for all five families.

The model is the direct sum of tensor components (G (x) A), (S (x) B),
(V (x) C) and the quotient {b,b}_ell / K, with the family's full bracket
table.  Structure constants over the assembled basis are computed once,
exactly, and every verification (antisymmetry, Jacobi, grading axioms,
subsystem closure, level transitions) runs off that table.

Levels: the parameter ``ell`` is always the level parameter of the
derivations; the induced index-subset size is m0 = ell for families
B/C/BC and m0 = ell + 1 for A/D.  All normalization denominators are
bound to the actual subset size m0 (with the extra factor 2 in the
A/D symmetric product); the two are never inferred from each other.
"""

from __future__ import annotations

import random
from fractions import Fraction
from math import lcm
from typing import Iterable

from .coord import (
    BBQuotient,
    CoordinateQuadruple,
    InternalConsistencyError,
    beta_star,
    beta_star_map_rows,
    build_bb,
    check_uniform,
    full_homology,
)
from .exactla import (
    BasedSpace,
    Q,
    QONE,
    QZERO,
    QuotientSpace,
    SparseMatrix,
    SparseVector,
    anticommutator,
    commutator,
    kernel_of_rows,
    q_str,
    rref,
    split_tensor_label,
    subspace_sum,
    tensor_label,
)
from .liealg import (
    RepModule,
    TruncationIdempotent,
    build_algebra,
    build_module,
    circ_trunc,
    label_weight,
    v_ops,
)
from .rootsys import (
    Root,
    RootSystem,
    classify_lengths,
    connected_components,
    generate,
    is_full_subsystem,
    root_str,
)

RANK_BOUNDS = {"BC": 3, "B": 4, "C": 4, "A": 4, "D": 4}
# A/D bound is on ell with m0 = ell + 1 > 5, i.e. ell > 4

UNDERLYING = {"A": "A", "B": "B", "C": "C", "D": "D", "BC": "C"}


class ModelError(ValueError):
    pass


def subset_size(family: str, ell: int) -> int:
    return ell + 1 if family in ("A", "D") else ell


class GradedElement:
    """Element of L(b, K): sparse coefficients over the model basis."""

    __slots__ = ("model", "coeffs")

    def __init__(self, model: "GradedModel", coeffs: dict[int, Fraction]):
        self.model = model
        self.coeffs = {i: Q(c) for i, c in coeffs.items() if c != 0}

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "GradedElement") -> "GradedElement":
        out = dict(self.coeffs)
        for i, c in other.coeffs.items():
            s = out.get(i, QZERO) + c
            if s:
                out[i] = s
            else:
                out.pop(i, None)
        return GradedElement(self.model, out)

    def __sub__(self, other):
        return self + other.scale(Q(-1))

    def scale(self, c: Fraction) -> "GradedElement":
        c = Q(c)
        return GradedElement(self.model, {i: c * v for i, v in self.coeffs.items()})

    def __eq__(self, other):
        return (
            isinstance(other, GradedElement)
            and self.model is other.model
            and self.coeffs == other.coeffs
        )

    def _part(self, tag: str) -> dict[tuple, Fraction]:
        out = {}
        for i, c in self.coeffs.items():
            kind, key = self.model.basis[i]
            if kind == tag:
                out[key] = c
        return out

    @property
    def g_part(self):
        return self._part("g")

    @property
    def s_part(self):
        return self._part("s")

    @property
    def v_part(self):
        return self._part("v")

    @property
    def d_part(self):
        return self._part("d")

    def describe(self) -> list[str]:
        out = []
        for i in sorted(self.coeffs):
            out.append(f"{q_str(self.coeffs[i])}*{self.model.basis_label(i)}")
        return out


class GradedModel:
    def __init__(
        self,
        family: str,
        n: int,
        ell: int,
        quadruple: CoordinateQuadruple,
        k_span="zero",
        override_bounds: bool = False,
    ):
        if family not in RANK_BOUNDS:
            raise ModelError(f"unknown family {family!r}")
        if quadruple.qtype != family:
            raise ModelError(
                f"quadruple of type {quadruple.qtype} cannot coordinatize a"
                f" family-{family} model"
            )
        m0 = subset_size(family, ell)
        if ell <= RANK_BOUNDS[family] and not override_bounds:
            raise ModelError(
                f"level ell={ell} is below the proof bound for family {family}"
                " (pass override_bounds to experiment below it)"
            )
        if m0 > n:
            raise ModelError(f"subset size {m0} exceeds truncation size {n}")
        self.family = family
        self.n = n
        self.ell = ell
        self.m0 = m0
        self.sub_bound = ell <= RANK_BOUNDS[family]
        self.quadruple = quadruple
        self.roots = generate(family, n)
        self.lengths = classify_lengths(self.roots)

        # coordinate side
        self.bb = build_bb(quadruple, ell)
        self.fh = full_homology(self.bb)
        if k_span == "zero":
            k_vectors: list[SparseVector] = []
            self.k_name = "zero"
        elif k_span == "fh":
            k_vectors = list(self.fh.basis.rows)
            self.k_name = "fh"
        else:
            k_vectors = list(k_span)
            self.k_name = f"span({len(k_vectors)})"
        self.uniform_report = check_uniform(self.bb, k_vectors, fh=self.fh)
        if not self.uniform_report["uniform"]:
            raise ModelError(
                "K does not satisfy the uniform property: "
                f"witness {self.uniform_report['witness']}"
            )
        lifts = [self.bb.quotient.lift(v) for v in k_vectors]
        relations_total = (
            subspace_sum(self.bb.relations, rref(lifts, self.bb.tensor))
            if lifts
            else self.bb.relations
        )
        self.dpart = QuotientSpace(self.bb.tensor, relations_total)

        # matrix side
        self.G = build_algebra(UNDERLYING[family], n)
        self.smod: RepModule | None = None
        self.vmod: RepModule | None = None
        if family in ("C", "BC"):
            self.smod = build_module(self.G, "S")
        elif family == "B":
            self.smod = build_module(self.G, "V")
        if family == "BC":
            self.vmod = build_module(self.G, "V")
        self.idem0 = TruncationIdempotent(self.G.space, set(range(1, m0 + 1)))

        q = quadruple
        self.a_basis = [SparseVector(q.a_space, dict(r.entries)) for r in q.a_part_sub.rows]
        self.b_basis = [SparseVector(q.a_space, dict(r.entries)) for r in q.b_part_sub.rows]
        self.c_basis = [q.c_space.basis_vector(l) for l in q.c_space.labels]

        self._assemble_basis()
        self._build_caches()
        self._verify_model_well_defined()
        self._build_table()

    # -- basis bookkeeping -------------------------------------------------

    def _assemble_basis(self):
        self.basis: list[tuple[str, tuple]] = []
        self.weight_of: list[Root] = []
        self.index_of: dict[tuple[str, tuple], int] = {}

        def push(kind, key, weight):
            self.index_of[(kind, key)] = len(self.basis)
            self.basis.append((kind, key))
            self.weight_of.append(weight)

        for gi, w in enumerate(self.G.wb.weight_of_basis):
            for ai in range(len(self.a_basis)):
                push("g", (gi, ai), w)
        if self.smod is not None:
            if self.family == "B":
                for si, lab in enumerate(self.smod.space.labels):
                    for bi in range(len(self.b_basis)):
                        push("s", (si, bi), label_weight(lab))
            else:
                for si, w in enumerate(self.smod.wb.weight_of_basis):
                    for bi in range(len(self.b_basis)):
                        push("s", (si, bi), w)
        if self.vmod is not None:
            for vi, lab in enumerate(self.vmod.space.labels):
                for ci in range(len(self.c_basis)):
                    push("v", (vi, ci), label_weight(lab))
        for di, lab in enumerate(self.dpart.coset_space.labels):
            push("d", (di,), Root.zero())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def basis_label(self, i: int) -> str:
        kind, key = self.basis[i]
        if kind == "g":
            return f"g{key[0]}[{root_str(self.weight_of[i])}]⊗a{key[1]}"
        if kind == "s":
            return f"s{key[0]}[{root_str(self.weight_of[i])}]⊗b{key[1]}"
        if kind == "v":
            return f"v{key[0]}[{root_str(self.weight_of[i])}]⊗c{key[1]}"
        return f"d[{self.dpart.coset_space.labels[key[0]]}]"

    def element(self, coeffs: dict[int, Fraction]) -> GradedElement:
        return GradedElement(self, coeffs)

    # -- structure-constant caches ------------------------------------------

    def _coords_A(self, vec) -> dict[int, Fraction]:
        coords = self.quadruple.a_part_sub.coordinates(vec)
        return {i: c for i, c in enumerate(coords) if c}

    def _coords_B(self, vec) -> dict[int, Fraction]:
        coords = self.quadruple.b_part_sub.coordinates(vec)
        return {i: c for i, c in enumerate(coords) if c}

    def _coords_C(self, vec) -> dict[int, Fraction]:
        return {
            self.quadruple.c_space.pos(lab): c for lab, c in vec.entries.items()
        }

    def _coords_G(self, mat) -> dict[int, Fraction]:
        return self.G.wb.coords_of_mat(mat)

    def _coords_S(self, obj) -> dict[int, Fraction]:
        if self.family == "B":
            return {self.smod.space.pos(lab): c for lab, c in obj.entries.items()}
        return self.smod.wb.coords_of_mat(obj)

    def _dcoset(self, x, y) -> dict[int, Fraction]:
        """Coset coordinates of {x, y} for x, y in b (or a lifted into b)."""
        q = self.quadruple
        xb = SparseVector(q.b_space, dict(x.entries))
        yb = SparseVector(q.b_space, dict(y.entries))
        entries = {}
        for lx, vx in xb.entries.items():
            for ly, vy in yb.entries.items():
                key = tensor_label(lx, ly)
                entries[key] = entries.get(key, QZERO) + vx * vy
        proj = self.dpart.project(SparseVector(self.bb.tensor, entries))
        csp = self.dpart.coset_space
        return {csp.pos(lab): c for lab, c in proj.entries.items()}

    def _build_caches(self):
        q = self.quadruple
        fam = self.family
        half = Q(1, 2)
        gmats = self.G.wb.basis_mats
        self._lie_g = {}
        self._circ_g = {}
        self._tr_g = {}
        for i, x in enumerate(gmats):
            for j in range(i, len(gmats)):
                y = gmats[j]
                self._lie_g[(i, j)] = self._coords_G(commutator(x, y))
                self._tr_g[(i, j)] = (x @ y).trace()
                if fam == "A":
                    self._circ_g[(i, j)] = self._coords_G(
                        circ_trunc(x, y, self.idem0, "A")
                    )
                elif fam in ("C", "BC"):
                    self._circ_g[(i, j)] = self._coords_S(
                        circ_trunc(x, y, self.idem0, fam)
                    )
        # coordinate algebra caches
        ab = self.a_basis
        bbv = self.b_basis
        self._aa = {}
        for p, a in enumerate(ab):
            for t, a2 in enumerate(ab):
                prod = q.a_mul(a, a2)
                entry = {"dcos": self._dcoset(a, a2)}
                if fam in ("B", "D"):
                    entry["prod_A"] = self._coords_A(prod)
                else:
                    circ = prod + q.a_mul(a2, a)
                    brk = prod - q.a_mul(a2, a)
                    entry["half_circ_A"] = self._coords_A(circ.scale(half))
                    entry["half_brk"] = (
                        self._coords_A(brk.scale(half))
                        if fam == "A"
                        else self._coords_B(brk.scale(half))
                    )
                self._aa[(p, t)] = entry
        self._bbp = {}
        self._abp = {}
        if fam in ("B", "C", "BC"):
            for p, b in enumerate(bbv):
                for t, b2 in enumerate(bbv):
                    prod = q.a_mul(b, b2)
                    entry = {"dcos": self._dcoset(b, b2)}
                    if fam == "B":
                        entry["form_A"] = self._coords_A(prod)
                    else:
                        circ = prod + q.a_mul(b2, b)
                        brk = prod - q.a_mul(b2, b)
                        entry["half_circ_A"] = self._coords_A(circ.scale(half))
                        entry["half_brk_B"] = self._coords_B(brk.scale(half))
                    self._bbp[(p, t)] = entry
            for p, a in enumerate(ab):
                for t, b in enumerate(bbv):
                    prod = q.a_mul(a, b)
                    entry = {}
                    if fam == "B":
                        entry["prod_B"] = self._coords_B(prod)
                    else:
                        circ = prod + q.a_mul(b, a)
                        brk = prod - q.a_mul(b, a)
                        entry["half_brk_A"] = self._coords_A(brk.scale(half))
                        entry["half_circ_B"] = self._coords_B(circ.scale(half))
                    self._abp[(p, t)] = entry
        self._ac = {}
        self._bc = {}
        self._cc = {}
        if fam == "BC":
            for p, a in enumerate(ab):
                for t, c in enumerate(self.c_basis):
                    self._ac[(p, t)] = self._coords_C(q.c_act(a, c))
            for p, b in enumerate(bbv):
                for t, c in enumerate(self.c_basis):
                    self._bc[(p, t)] = self._coords_C(q.c_act(b, c))
            for p, c in enumerate(self.c_basis):
                for t, c2 in enumerate(self.c_basis):
                    f1 = q.f_val(c, c2)
                    f2 = q.f_val(c2, c)
                    self._cc[(p, t)] = {
                        "dia_A": self._coords_A((f1 - f2).scale(half)),
                        "heart_B": self._coords_B((f1 + f2).scale(half)),
                        "dcos": self._dcoset(
                            SparseVector(q.b_space, dict(c.entries)),
                            SparseVector(q.b_space, dict(c2.entries)),
                        ),
                    }
        # module-action caches on the matrix side
        smats = None
        if self.smod is not None and fam != "B":
            smats = self.smod.wb.basis_mats
            self._lie_s = {}
            self._circ_s = {}
            self._tr_s = {}
            for i, s in enumerate(smats):
                for j in range(i, len(smats)):
                    t = smats[j]
                    self._lie_s[(i, j)] = self._coords_G(commutator(s, t))
                    self._circ_s[(i, j)] = self._coords_S(
                        circ_trunc(s, t, self.idem0, fam)
                    )
                    self._tr_s[(i, j)] = (s @ t).trace()
            self._circ_gs = {}
            self._lie_gs = {}
            for i, x in enumerate(gmats):
                for j, s in enumerate(smats):
                    self._circ_gs[(i, j)] = self._coords_G(
                        circ_trunc(x, s, self.idem0, fam)
                    )
                    self._lie_gs[(i, j)] = self._coords_S(commutator(x, s))
        if fam == "B":
            nat = self.G.nat
            self._gs_apply = {}
            for i, x in enumerate(gmats):
                for j, lab in enumerate(self.smod.space.labels):
                    img = x.apply(self.smod.space.basis_vector(lab))
                    self._gs_apply[(i, j)] = self._coords_S(img)
            self._dst = {}
            self._form_ss = {}
            labs = self.smod.space.labels
            for i, li in enumerate(labs):
                for j in range(i, len(labs)):
                    u = nat.space.basis_vector(li)
                    w = nat.space.basis_vector(labs[j])
                    # D_{u,w} on V: z -> (u, z) w - (w, z) u
                    entries = {}
                    for z in nat.space.labels:
                        zf = nat.space.basis_vector(z)
                        col = w.scale(nat.form(u, zf)) - u.scale(nat.form(w, zf))
                        for r, val in col.entries.items():
                            entries[(r, z)] = val
                    self._dst[(i, j)] = self._coords_G(
                        SparseMatrix(nat.space, nat.space, entries)
                    )
                    self._form_ss[(i, j)] = nat.form(u, w)
        if fam == "BC":
            nat = self.G.nat
            vlabs = self.vmod.space.labels
            self._gv = {}
            for i, x in enumerate(gmats):
                for p, lab in enumerate(vlabs):
                    img = x.apply(nat.space.basis_vector(lab))
                    self._gv[(i, p)] = {nat.space.pos(r): c for r, c in img.entries.items()}
            self._sv = {}
            for i, s in enumerate(smats):
                for p, lab in enumerate(vlabs):
                    img = s.apply(nat.space.basis_vector(lab))
                    self._sv[(i, p)] = {nat.space.pos(r): c for r, c in img.entries.items()}
            self._vv = {}
            for p, lp in enumerate(vlabs):
                u = nat.space.basis_vector(lp)
                for t in range(p, len(vlabs)):
                    w = nat.space.basis_vector(vlabs[t])
                    self._vv[(p, t)] = {
                        "circ_G": self._coords_G(v_ops(u, w, nat, self.idem0, "circ")),
                        "brk_S": self._coords_S(
                            v_ops(u, w, nat, self.idem0, "bracket_ell")
                        ),
                        "form": nat.form(u, w),
                    }
        # D-part row caches
        csp = self.dpart.coset_space
        self._dk = []
        for lab in csp.labels:
            l1, l2 = split_tensor_label(lab)
            e1 = self.quadruple.b_space.basis_vector(l1)
            e2 = self.quadruple.b_space.basis_vector(l2)
            self._dk.append(
                {
                    "label": lab,
                    "deriv": self.bb._pair_derivation(lab),
                    "bstar": beta_star(self.quadruple, e1, e2),
                    "c1": self.quadruple.split_b(e1)[1],
                    "c2": self.quadruple.split_b(e2)[1],
                }
            )
        if fam in ("A", "C", "BC"):
            j0 = self.idem0.matrix
            self._gJ = []
            for x in gmats:
                entry = {"tr": (x @ j0).trace()}
                if fam == "A":
                    entry["circ_G"] = self._coords_G(circ_trunc(x, j0, self.idem0, "A"))
                    entry["lie_G"] = self._coords_G(commutator(x, j0))
                else:
                    entry["circ_G"] = self._coords_G(anticommutator(x, j0))
                    entry["lie_S"] = self._coords_S(commutator(x, j0))
                self._gJ.append(entry)
            if fam in ("C", "BC"):
                self._sJ = []
                for s in smats:
                    self._sJ.append(
                        {
                            "tr": (s @ j0).trace(),
                            "lie_G": self._coords_G(commutator(s, j0)),
                            "circ_S": self._coords_S(circ_trunc(s, j0, self.idem0, fam)),
                        }
                    )

    # -- bracket rows -------------------------------------------------------

    def _row_gg(self, i, p, j, t) -> dict[int, Fraction]:
        # callers guarantee i <= j (the assembled basis is lexicographic)
        out: dict[int, Fraction] = {}
        lie = self._lie_g[(i, j)]
        tr = self._tr_g[(i, j)]
        aa = self._aa[(p, t)]
        fam = self.family
        if fam in ("B", "D"):
            self._emit_g(out, lie, aa["prod_A"])
        elif fam == "A":
            self._emit_g(out, lie, aa["half_circ_A"])
            self._emit_g(out, self._circ_g[(i, j)], aa["half_brk"])
        else:
            self._emit_g(out, lie, aa["half_circ_A"])
            self._emit_s(out, self._circ_g[(i, j)], aa["half_brk"])
        if tr:
            self._emit_d(out, aa["dcos"], tr)
        return out

    def _emit_g(self, out, gcoords, acoords, scale=QONE):
        for gi, cg in gcoords.items():
            for ai, ca in acoords.items():
                idx = self.index_of[("g", (gi, ai))]
                s = out.get(idx, QZERO) + scale * cg * ca
                if s:
                    out[idx] = s
                else:
                    out.pop(idx, None)

    def _emit_s(self, out, scoords, bcoords, scale=QONE):
        for si, cs in scoords.items():
            for bi, cb in bcoords.items():
                idx = self.index_of[("s", (si, bi))]
                s = out.get(idx, QZERO) + scale * cs * cb
                if s:
                    out[idx] = s
                else:
                    out.pop(idx, None)

    def _emit_v(self, out, vcoords, ccoords, scale=QONE):
        for vi, cv in vcoords.items():
            for ci, cc in ccoords.items():
                idx = self.index_of[("v", (vi, ci))]
                s = out.get(idx, QZERO) + scale * cv * cc
                if s:
                    out[idx] = s
                else:
                    out.pop(idx, None)

    def _emit_d(self, out, dcoords, scale=QONE):
        for di, cd in dcoords.items():
            idx = self.index_of[("d", (di,))]
            s = out.get(idx, QZERO) + scale * cd
            if s:
                out[idx] = s
            else:
                out.pop(idx, None)

    def _row_gs(self, i, p, j, t) -> dict[int, Fraction]:
        # [x_i (x) a_p, s_j (x) b_t]
        out: dict[int, Fraction] = {}
        fam = self.family
        if fam == "B":
            self._emit_s(out, self._gs_apply[(i, j)], self._abp[(p, t)]["prod_B"])
            return out
        ab = self._abp[(p, t)]
        self._emit_g(out, self._circ_gs[(i, j)], ab["half_brk_A"])
        self._emit_s(out, self._lie_gs[(i, j)], ab["half_circ_B"])
        return out

    def _row_ss(self, i, p, j, t) -> dict[int, Fraction]:
        # callers guarantee i <= j
        out: dict[int, Fraction] = {}
        fam = self.family
        if fam == "B":
            self._emit_g(out, self._dst[(i, j)], self._bbp[(p, t)]["form_A"])
            form = self._form_ss[(i, j)]
            if form:
                self._emit_d(out, self._bbp[(p, t)]["dcos"], form)
            return out
        bb = self._bbp[(p, t)]
        self._emit_g(out, self._lie_s[(i, j)], bb["half_circ_A"])
        self._emit_s(out, self._circ_s[(i, j)], bb["half_brk_B"])
        tr = self._tr_s[(i, j)]
        if tr:
            self._emit_d(out, bb["dcos"], tr)
        return out

    def _row_gv(self, i, p, j, t) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        self._emit_v(out, self._gv[(i, j)], self._ac[(p, t)])
        return out

    def _row_sv(self, i, p, j, t) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        self._emit_v(out, self._sv[(i, j)], self._bc[(p, t)])
        return out

    def _row_vv(self, i, p, j, t) -> dict[int, Fraction]:
        # callers guarantee i <= j
        out: dict[int, Fraction] = {}
        vv = self._vv[(i, j)]
        cc = self._cc[(p, t)]
        self._emit_g(out, vv["circ_G"], cc["dia_A"])
        self._emit_s(out, vv["brk_S"], cc["heart_B"])
        if vv["form"]:
            self._emit_d(out, cc["dcos"], vv["form"])
        return out

    # D-part rows: [<beta1, beta2>, other]
    def _row_dg(self, k, i, p) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        fam = self.family
        info = self._dk[k]
        q = self.quadruple
        if fam == "D":
            return out
        if fam == "B":
            img = info["deriv"].apply(
                SparseVector(q.b_space, dict(self.a_basis[p].entries))
            )
            acoords = self._coords_A(SparseVector(q.a_space, dict(img.entries)))
            self._emit_g(out, {i: QONE}, acoords)
            return out
        bstar = info["bstar"]
        if bstar.is_zero():
            return out
        a = self.a_basis[p]
        brk = q.a_mul(a, bstar) - q.a_mul(bstar, a)
        circ = q.a_mul(a, bstar) + q.a_mul(bstar, a)
        gj = self._gJ[i]
        if fam == "A":
            scale = Q(-1, 2 * self.m0)
            self._emit_g(out, gj["circ_G"], self._coords_A(brk), scale)
            self._emit_g(out, gj["lie_G"], self._coords_A(circ), scale)
            if gj["tr"]:
                self._emit_d(out, self._dcoset(a, bstar), 2 * scale * gj["tr"])
            return out
        scale = Q(-1, 4 * self.ell)
        self._emit_g(out, gj["circ_G"], self._coords_A(brk), scale)
        self._emit_s(out, gj["lie_S"], self._coords_B(circ), scale)
        return out

    def _row_ds(self, k, i, p) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        fam = self.family
        info = self._dk[k]
        q = self.quadruple
        if fam == "B":
            img = info["deriv"].apply(
                SparseVector(q.b_space, dict(self.b_basis[p].entries))
            )
            bcoords = self._coords_B(SparseVector(q.a_space, dict(img.entries)))
            self._emit_s(out, {i: QONE}, bcoords)
            return out
        bstar = info["bstar"]
        if bstar.is_zero():
            return out
        b = self.b_basis[p]
        brk = q.a_mul(b, bstar) - q.a_mul(bstar, b)
        circ = q.a_mul(b, bstar) + q.a_mul(bstar, b)
        sj = self._sJ[i]
        scale = Q(-1, 4 * self.ell)
        self._emit_g(out, sj["lie_G"], self._coords_A(circ), scale)
        self._emit_s(out, sj["circ_S"], self._coords_B(brk), scale)
        if sj["tr"]:
            self._emit_d(out, self._dcoset(b, bstar), 2 * scale * sj["tr"])
        return out

    def _row_dv(self, k, i, p) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        info = self._dk[k]
        q = self.quadruple
        c = self.c_basis[p]
        bstar = info["bstar"]
        if not bstar.is_zero():
            ccoords = self._coords_C(q.c_act(bstar, c))
            if ccoords:
                j0v = self._j0_vcoords(i)
                self._emit_v(out, j0v, ccoords, Q(1, 2 * self.ell))
        c1, c2 = info["c1"], info["c2"]
        if not (c1.is_zero() or c2.is_zero()):
            term = q.c_act(q.f_val(c, c2), c1) + q.c_act(q.f_val(c, c1), c2)
            ccoords = self._coords_C(term)
            if ccoords:
                self._emit_v(out, {i: QONE}, ccoords, Q(-1, 2))
        return out

    def _j0_vcoords(self, i) -> dict[int, Fraction]:
        lab = self.vmod.space.labels[i]
        img = self.idem0.matrix.apply(self.G.space.basis_vector(lab))
        return {self.G.space.pos(r): c for r, c in img.entries.items()}

    def _row_dd(self, k, l) -> dict[int, Fraction]:
        if self.family == "D":
            return {}
        info = self._dk[k]
        lab = self.dpart.coset_space.labels[l]
        lift = self.bb.tensor.basis_vector(lab)
        img = self.bb.apply_pair_action(info["deriv"], lift)
        proj = self.dpart.project(img)
        csp = self.dpart.coset_space
        return {
            self.index_of[("d", (csp.pos(r),))]: c for r, c in proj.entries.items()
        }

    def _bracket_pair(self, gi: int, gj: int) -> dict[int, Fraction]:
        """Structure constants [e_gi, e_gj] over global indices."""
        ki, keyi = self.basis[gi]
        kj, keyj = self.basis[gj]
        order = {"g": 0, "s": 1, "v": 2, "d": 3}
        if order[ki] > order[kj]:
            out = self._bracket_pair(gj, gi)
            return {m: -c for m, c in out.items()}
        if ki == "g" and kj == "g":
            return self._row_gg(keyi[0], keyi[1], keyj[0], keyj[1])
        if ki == "g" and kj == "s":
            return self._row_gs(keyi[0], keyi[1], keyj[0], keyj[1])
        if ki == "g" and kj == "v":
            return self._row_gv(keyi[0], keyi[1], keyj[0], keyj[1])
        if ki == "s" and kj == "s":
            return self._row_ss(keyi[0], keyi[1], keyj[0], keyj[1])
        if ki == "s" and kj == "v":
            return self._row_sv(keyi[0], keyi[1], keyj[0], keyj[1])
        if ki == "v" and kj == "v":
            return self._row_vv(keyi[0], keyi[1], keyj[0], keyj[1])
        if kj == "d":
            if ki == "d":
                return self._row_dd(keyi[0], keyj[0])
            row = {
                "g": self._row_dg,
                "s": self._row_ds,
                "v": self._row_dv,
            }[ki](keyj[0], keyi[0], keyi[1])
            return {m: -c for m, c in row.items()}
        raise AssertionError((ki, kj))

    def _build_table(self):
        dim = self.dim
        self.table = {}
        for i in range(dim):
            for j in range(i + 1, dim):
                row = self._bracket_pair(i, j)
                if row:
                    self.table[(i, j)] = row
        self._int_table = None

    def bracket_indices(self, i: int, j: int) -> dict[int, Fraction]:
        if i == j:
            return {}
        if i < j:
            return self.table.get((i, j), {})
        row = self.table.get((j, i), {})
        return {m: -c for m, c in row.items()}

    def bracket(self, x: GradedElement, y: GradedElement) -> GradedElement:
        if x.model is not self or y.model is not self:
            raise ModelError("elements belong to a different model")
        out: dict[int, Fraction] = {}
        for i, ci in x.coeffs.items():
            for j, cj in y.coeffs.items():
                row = self.bracket_indices(i, j)
                if not row:
                    continue
                c = ci * cj
                for m, v in row.items():
                    s = out.get(m, QZERO) + c * v
                    if s:
                        out[m] = s
                    else:
                        out.pop(m, None)
        return GradedElement(self, out)

    def int_table(self):
        """Structure constants scaled to integers; (scale, dict)."""
        if self._int_table is None:
            denom = 1
            for row in self.table.values():
                for c in row.values():
                    denom = lcm(denom, c.denominator)
            scaled: dict[tuple[int, int], dict[int, int]] = {}
            for key, row in self.table.items():
                scaled[key] = {
                    m: int(c * denom) for m, c in row.items()
                }
            self._int_table = (denom, scaled)
        return self._int_table

    # -- model-level well-definedness ----------------------------------------

    def _verify_model_well_defined(self):
        # beta* must vanish on the full relation space (this is exactly the
        # uniform property of the chosen K, re-checked on the total span)
        rows = beta_star_map_rows(self.quadruple)
        for t in self.dpart.relations.rows:
            for r, row in rows.items():
                val = sum((row.get(lab) * c for lab, c in t.entries.items()), QZERO)
                if val:
                    raise InternalConsistencyError(
                        "beta* does not vanish on the relation space", witness=t
                    )
        # the module-row f-terms must also vanish on the relation space
        if self.family == "BC":
            q = self.quadruple
            for t in self.dpart.relations.rows:
                for c in self.c_basis:
                    acc = q.c_space.zero()
                    for lab, coeff in t.entries.items():
                        l1, l2 = split_tensor_label(lab)
                        c1 = q.split_b(q.b_space.basis_vector(l1))[1]
                        c2 = q.split_b(q.b_space.basis_vector(l2))[1]
                        if c1.is_zero() or c2.is_zero():
                            continue
                        term = q.c_act(q.f_val(c, c2), c1) + q.c_act(q.f_val(c, c1), c2)
                        acc = acc + term.scale(coeff)
                    if not acc.is_zero():
                        raise InternalConsistencyError(
                            "module row does not vanish on the relation space",
                            witness=(t, c),
                        )


def build_model(
    family: str,
    n: int,
    ell: int,
    quadruple: CoordinateQuadruple,
    k_span="zero",
    override_bounds: bool = False,
) -> GradedModel:
    return GradedModel(family, n, ell, quadruple, k_span, override_bounds)


def bracket(m: GradedModel, x: GradedElement, y: GradedElement) -> GradedElement:
    return m.bracket(x, y)


# ---------------------------------------------------------------------------
# verification suites


def _direct_reversed_bracket(m: GradedModel, gi: int, gj: int) -> dict[int, Fraction] | None:
    """[e_gj, e_gi] for a same-kind pair, recomputed without the table caches.

    Returns None for cross-kind pairs, whose reversed bracket the source
    tables define by negation (no independent content to check).
    """
    ki, keyi = m.basis[gi]
    kj, keyj = m.basis[gj]
    if ki != kj:
        return None
    fam = m.family
    out: dict[int, Fraction] = {}
    half = Q(1, 2)
    q = m.quadruple
    if ki == "g":
        j, t = keyj
        i, p = keyi
        x, y = m.G.wb.basis_mats[j], m.G.wb.basis_mats[i]
        a, a2 = m.a_basis[t], m.a_basis[p]
        lie = m._coords_G(commutator(x, y))
        tr = (x @ y).trace()
        if fam in ("B", "D"):
            m._emit_g(out, lie, m._coords_A(q.a_mul(a, a2)))
        else:
            circ_a = m._coords_A((q.a_mul(a, a2) + q.a_mul(a2, a)).scale(half))
            brk = (q.a_mul(a, a2) - q.a_mul(a2, a)).scale(half)
            m._emit_g(out, lie, circ_a)
            circ_x = circ_trunc(x, y, m.idem0, fam)
            if fam == "A":
                m._emit_g(out, m._coords_G(circ_x), m._coords_A(brk))
            else:
                m._emit_s(out, m._coords_S(circ_x), m._coords_B(brk))
        if tr:
            m._emit_d(out, m._dcoset(a, a2), tr)
        return out
    if ki == "s":
        j, t = keyj
        i, p = keyi
        b, b2 = m.b_basis[t], m.b_basis[p]
        if fam == "B":
            nat = m.G.nat
            u = nat.space.basis_vector(m.smod.space.labels[j])
            w = nat.space.basis_vector(m.smod.space.labels[i])
            entries = {}
            for z in nat.space.labels:
                zf = nat.space.basis_vector(z)
                col = w.scale(nat.form(u, zf)) - u.scale(nat.form(w, zf))
                for r, val in col.entries.items():
                    entries[(r, z)] = val
            dst = m._coords_G(SparseMatrix(nat.space, nat.space, entries))
            m._emit_g(out, dst, m._coords_A(q.a_mul(b, b2)))
            form = nat.form(u, w)
            if form:
                m._emit_d(out, m._dcoset(b, b2), form)
            return out
        s, tmat = m.smod.wb.basis_mats[j], m.smod.wb.basis_mats[i]
        lie = m._coords_G(commutator(s, tmat))
        circ = m._coords_S(circ_trunc(s, tmat, m.idem0, fam))
        tr = (s @ tmat).trace()
        m._emit_g(out, lie, m._coords_A((q.a_mul(b, b2) + q.a_mul(b2, b)).scale(half)))
        m._emit_s(out, circ, m._coords_B((q.a_mul(b, b2) - q.a_mul(b2, b)).scale(half)))
        if tr:
            m._emit_d(out, m._dcoset(b, b2), tr)
        return out
    if ki == "v":
        j, t = keyj
        i, p = keyi
        nat = m.G.nat
        u = nat.space.basis_vector(m.vmod.space.labels[j])
        w = nat.space.basis_vector(m.vmod.space.labels[i])
        c, c2 = m.c_basis[t], m.c_basis[p]
        f1, f2 = q.f_val(c, c2), q.f_val(c2, c)
        m._emit_g(
            out,
            m._coords_G(v_ops(u, w, nat, m.idem0, "circ")),
            m._coords_A((f1 - f2).scale(half)),
        )
        m._emit_s(
            out,
            m._coords_S(v_ops(u, w, nat, m.idem0, "bracket_ell")),
            m._coords_B((f1 + f2).scale(half)),
        )
        form = nat.form(u, w)
        if form:
            m._emit_d(
                out,
                m._dcoset(
                    SparseVector(q.b_space, dict(c.entries)),
                    SparseVector(q.b_space, dict(c2.entries)),
                ),
                form,
            )
        return out
    # d-d
    return m._row_dd(keyj[0], keyi[0])


def verify_antisymmetry(m: GradedModel) -> dict:
    """Exhaustive pair check; same-kind reversed brackets are recomputed
    from the defining formulas, not read off the table."""
    failures = []
    dim = m.dim
    checked = 0
    structural = 0
    for i in range(dim):
        for j in range(i + 1, dim):
            backward = _direct_reversed_bracket(m, i, j)
            if backward is None:
                structural += 1
                continue
            checked += 1
            mismatch = dict(m.bracket_indices(i, j))
            for k, c in backward.items():
                s = mismatch.get(k, QZERO) + c
                if s:
                    mismatch[k] = s
                else:
                    mismatch.pop(k, None)
            if mismatch:
                failures.append(
                    {
                        "pair": [m.basis_label(i), m.basis_label(j)],
                        "defect": {str(k): q_str(c) for k, c in mismatch.items()},
                    }
                )
                if len(failures) >= 5:
                    break
        if len(failures) >= 5:
            break
    return {
        "name": "antisymmetry",
        "status": "pass" if not failures else "fail",
        "pairs_checked": checked,
        "pairs_structural": structural,
        "witnesses": failures,
    }


_EMPTY_ROW: dict[int, int] = {}


def _jacobi_defect_int(m: GradedModel, i: int, j: int, k: int, scaled) -> dict[int, int]:
    def bkt(a, b):
        if a == b:
            return _EMPTY_ROW, 1
        if a < b:
            return scaled.get((a, b), _EMPTY_ROW), 1
        return scaled.get((b, a), _EMPTY_ROW), -1

    acc: dict[int, int] = {}

    def add_nested(outer, inner_row, inner_sign, sign):
        # sign * [x_outer, inner] accumulated into acc
        for mid, c in inner_row.items():
            row2, s1 = bkt(outer, mid)
            if not row2:
                continue
            mult = sign * inner_sign * s1 * c
            for idx, v in row2.items():
                nv = acc.get(idx, 0) + mult * v
                if nv:
                    acc[idx] = nv
                else:
                    acc.pop(idx, None)

    # [x_i, [x_j, x_k]] - [[x_i, x_j], x_k] - [x_j, [x_i, x_k]]
    row, s0 = bkt(j, k)
    add_nested(i, row, s0, 1)
    row, s0 = bkt(i, j)
    # [[x_i, x_j], x_k] = -[x_k, [x_i, x_j]]
    add_nested(k, row, s0, 1)  # note: -[[..],k] = +[x_k, [..]]
    row, s0 = bkt(i, k)
    add_nested(j, row, s0, -1)
    return acc


def verify_jacobi(m: GradedModel, strategy: dict) -> dict:
    """strategy: {"kind": "exhaustive_basis"} or {"kind": "random", "samples": n, "seed": s}."""
    _denom, scaled = m.int_table()
    dim = m.dim
    failures = []
    count = 0
    if strategy.get("kind") == "exhaustive_basis":
        triples = (
            (i, j, k)
            for i in range(dim)
            for j in range(i, dim)
            for k in range(j, dim)
        )
    else:
        samples = int(strategy["samples"])
        rng = random.Random(int(strategy["seed"]))
        triples = (
            (rng.randrange(dim), rng.randrange(dim), rng.randrange(dim))
            for _ in range(samples)
        )
    for i, j, k in triples:
        count += 1
        defect = _jacobi_defect_int(m, i, j, k, scaled)
        if defect:
            failures.append(
                {
                    "triple": [m.basis_label(i), m.basis_label(j), m.basis_label(k)],
                    "defect_indices": sorted(defect),
                }
            )
            if len(failures) >= 5:
                break
    return {
        "name": f"jacobi[{strategy.get('kind', 'random')}]",
        "status": "pass" if not failures else "fail",
        "triples": count,
        "witnesses": failures,
    }


def verify_grading(m: GradedModel) -> dict:
    """The grading axioms for the assembled model: grading pair, weights, L_0."""
    checks = []
    unit_coords = m._coords_A(m.quadruple.unit)

    def g_tensor_unit(gi):
        return {
            m.index_of[("g", (gi, ai))]: c for ai, c in unit_coords.items()
        }

    # (i) x -> x (x) 1 is an injective Lie homomorphism on the split algebra
    hom_fail = []
    gdim = len(m.G.wb.basis_mats)
    for i in range(gdim):
        for j in range(i + 1, gdim):
            lhs: dict[int, Fraction] = {}
            xi = g_tensor_unit(i)
            xj = g_tensor_unit(j)
            for gi, ci in xi.items():
                for gj, cj in xj.items():
                    for idx, c in m.bracket_indices(gi, gj).items():
                        s = lhs.get(idx, QZERO) + ci * cj * c
                        if s:
                            lhs[idx] = s
                        else:
                            lhs.pop(idx, None)
            expected: dict[int, Fraction] = {}
            for gk, c in m._lie_g[(i, j)].items():
                for idx, cu in g_tensor_unit(gk).items():
                    expected[idx] = expected.get(idx, QZERO) + c * cu
            expected = {k: v for k, v in expected.items() if v}
            if lhs != expected:
                hom_fail.append([m.basis_label(min(xi)), m.basis_label(min(xj))])
    checks.append(
        {
            "name": "grading-pair: x -> x(x)1 is a Lie homomorphism",
            "status": "pass" if not hom_fail else "fail",
            "witnesses": hom_fail[:5],
        }
    )

    # (ii) every basis vector is a simultaneous ad-eigenvector for the
    # Cartan with eigenvalue tuple equal to its designed weight
    eig_fail = []
    cartan_elements = []
    for h in m.G.cartan:
        coords = m._coords_G(h)
        cartan_elements.append(
            {
                m.index_of[("g", (gi, ai))]: cg * ca
                for gi, cg in coords.items()
                for ai, ca in unit_coords.items()
            }
        )
    for e_idx in range(m.dim):
        w = m.weight_of[e_idx]
        for hpos, h_el in enumerate(cartan_elements):
            acc: dict[int, Fraction] = {}
            for hi, ch in h_el.items():
                for idx, c in m.bracket_indices(hi, e_idx).items():
                    s = acc.get(idx, QZERO) + ch * c
                    if s:
                        acc[idx] = s
                    else:
                        acc.pop(idx, None)
            lam = _cartan_eigenvalue(m, w, hpos)
            expected = {e_idx: lam} if lam else {}
            if acc != expected:
                eig_fail.append([m.basis_label(e_idx), hpos])
                break
    checks.append(
        {
            "name": "weight decomposition: ad-eigenvector check",
            "status": "pass" if not eig_fail else "fail",
            "witnesses": eig_fail[:5],
        }
    )

    # weight table: weights lie in R and the per-root dimensions match
    dims: dict[Root, int] = {}
    for w in m.weight_of:
        dims[w] = dims.get(w, 0) + 1
    table_fail = []
    in_r_fail = [root_str(w) for w in dims if w not in m.roots.roots]
    for alpha in m.roots.nonzero():
        expected = _expected_weight_dim(m, alpha)
        if dims.get(alpha, 0) != expected:
            table_fail.append(
                {"root": root_str(alpha), "dim": dims.get(alpha, 0), "expected": expected}
            )
    checks.append(
        {
            "name": "weight table: weights in R and dimensions match",
            "status": "pass" if not (table_fail or in_r_fail) else "fail",
            "witnesses": (in_r_fail + table_fail)[:5],
        }
    )

    # (iii) L_0 = sum over alpha of [L_alpha, L_-alpha]
    zero_indices = [i for i, w in enumerate(m.weight_of) if w.is_zero()]
    zero_space = BasedSpace([f"z:{i}" for i in zero_indices])
    relabel = {idx: f"z:{idx}" for idx in zero_indices}
    by_weight: dict[Root, list[int]] = {}
    for i, w in enumerate(m.weight_of):
        by_weight.setdefault(w, []).append(i)
    span_vecs = []
    l0_fail = []
    for alpha, plus in by_weight.items():
        if alpha.is_zero():
            continue
        minus = by_weight.get(-alpha, [])
        for i in plus:
            for j in minus:
                row = m.bracket_indices(i, j)
                if not row:
                    continue
                entries = {}
                bad = [idx for idx in row if idx not in relabel]
                if bad:
                    l0_fail.append(f"opposite-root bracket has nonzero weight part at {bad[:3]}")
                    continue
                for idx, c in row.items():
                    entries[relabel[idx]] = entries.get(relabel[idx], QZERO) + c
                span_vecs.append(SparseVector(zero_space, entries))
    span = rref(span_vecs, zero_space)
    if span.dim != len(zero_indices):
        l0_fail.append(f"span dim {span.dim} < zero-weight dim {len(zero_indices)}")
    checks.append(
        {
            "name": "L_0 = sum of [L_alpha, L_-alpha]",
            "status": "pass" if not l0_fail else "fail",
            "witnesses": l0_fail[:5],
        }
    )
    status = "pass" if all(c["status"] == "pass" for c in checks) else "fail"
    return {"name": "grading", "status": status, "checks": checks}


def _cartan_eigenvalue(m: GradedModel, w: Root, hpos: int) -> Fraction:
    if m.family == "A":
        return Q(w.coords.get(hpos + 1, 0) - w.coords.get(hpos + 2, 0))
    return Q(w.coords.get(hpos + 1, 0))


def _expected_weight_dim(m: GradedModel, alpha: Root) -> int:
    da = len(m.a_basis)
    db = len(m.b_basis)
    dc = len(m.c_basis)
    cls = m.lengths[alpha]
    fam = m.family
    if fam in ("A", "D"):
        return da
    if fam == "B":
        return da + db if cls == "short" else da
    if fam == "C":
        return da + db if cls == "short" else da
    # BC
    if cls == "short":
        return dc
    if cls == "long":
        return da + db
    return da


# ---------------------------------------------------------------------------
# subsystem subalgebras of the model


class SubModel:
    def __init__(self, model: GradedModel, s_roots: Iterable[Root]):
        self.model = model
        s_set = {r for r in s_roots if not r.is_zero()}
        if not is_full_subsystem(s_set | {Root.zero()}, model.roots):
            raise ModelError("S is not a full subsystem of the model's root system")
        comps = connected_components(
            RootSystem(model.family, model.n, s_set | {Root.zero()})
        )
        if len(comps) != 1:
            raise ModelError("S is not irreducible")
        self.s_roots = s_set
        by_weight: dict[Root, list[int]] = {}
        for i, w in enumerate(model.weight_of):
            by_weight.setdefault(w, []).append(i)
        self.nonzero_indices = sorted(
            i for alpha in s_set for i in by_weight.get(alpha, [])
        )
        zero_indices = [i for i, w in enumerate(model.weight_of) if w.is_zero()]
        self.zero_space = BasedSpace([f"z:{i}" for i in zero_indices])
        vecs = []
        for alpha in sorted(s_set):
            for i in by_weight.get(alpha, []):
                for j in by_weight.get(-alpha, []):
                    row = model.bracket_indices(i, j)
                    entries = {f"z:{idx}": c for idx, c in row.items()}
                    vecs.append(SparseVector(self.zero_space, entries))
        self.zero_part = rref(vecs, self.zero_space)

    @property
    def dim(self) -> int:
        return len(self.nonzero_indices) + self.zero_part.dim

    def _zero_vec(self, row: dict[int, Fraction]) -> SparseVector:
        return SparseVector(self.zero_space, {f"z:{i}": c for i, c in row.items()})

    def verify(self) -> dict:
        m = self.model
        checks = []
        closure_fail = []
        basis_rows: list[dict[int, Fraction]] = [
            {i: QONE} for i in self.nonzero_indices
        ] + [
            {int(lab.split(":")[1]): c for lab, c in r.entries.items()}
            for r in self.zero_part.rows
        ]
        s_with_zero = self.s_roots | {Root.zero()}
        for a_pos, xa in enumerate(basis_rows):
            for xb in basis_rows[a_pos:]:
                acc: dict[int, Fraction] = {}
                for i, ci in xa.items():
                    for j, cj in xb.items():
                        for idx, c in m.bracket_indices(i, j).items():
                            s = acc.get(idx, QZERO) + ci * cj * c
                            if s:
                                acc[idx] = s
                            else:
                                acc.pop(idx, None)
                zero_piece: dict[int, Fraction] = {}
                for idx, c in acc.items():
                    w = m.weight_of[idx]
                    if w.is_zero():
                        zero_piece[idx] = c
                    elif w not in self.s_roots:
                        closure_fail.append(f"bracket leaves S at weight {root_str(w)}")
                        zero_piece = None
                        break
                if zero_piece is None:
                    continue
                if zero_piece and not self.zero_part.contains(self._zero_vec(zero_piece)):
                    closure_fail.append("zero-weight part escapes the subalgebra")
        checks.append(
            {
                "name": "subalgebra closed under bracket",
                "status": "pass" if not closure_fail else "fail",
                "witnesses": closure_fail[:5],
            }
        )
        # grading pair: G^S root spaces present for the semi-divisible part
        s_sdiv = {
            r
            for r in self.s_roots
            if r.scale(2) not in self.s_roots
        }
        missing = []
        for alpha in s_sdiv:
            if alpha not in m.G.root_space_index:
                missing.append(root_str(alpha))
        checks.append(
            {
                "name": "grading pair root spaces present (S semi-divisible part)",
                "status": "pass" if not missing else "fail",
                "witnesses": missing[:5],
            }
        )
        status = "pass" if all(c["status"] == "pass" for c in checks) else "fail"
        return {"name": "subsystem", "status": status, "checks": checks}


def subalgebra(model: GradedModel, s_roots: Iterable[Root]) -> SubModel:
    return SubModel(model, s_roots)


# ---------------------------------------------------------------------------
# level transitions


def _level_correction_targets(m: GradedModel):
    if m.family in ("C", "BC"):
        return "s", Q(1, 2)
    if m.family == "A":
        return "g", QONE
    return None, QZERO  # B and D: commutator vanishes identically


def level_coset(
    m: GradedModel, lam_subset: Iterable[int], x: SparseVector, y: SparseVector
) -> GradedElement:
    """The lambda-level coset <x, y>_lambda as a model element."""
    lam = frozenset(lam_subset)
    if not set(range(1, m.m0 + 1)) <= lam:
        raise ModelError("lambda must contain the base subset I_0")
    if not lam <= set(range(1, m.n + 1)):
        raise ModelError("lambda exceeds the model truncation; use verify_level_transition for extended checks")
    coeffs: dict[int, Fraction] = {}
    dcos = m._dcoset(x, y)
    for di, c in dcos.items():
        coeffs[m.index_of[("d", (di,))]] = c
    target, factor = _level_correction_targets(m)
    if target is not None:
        bs = beta_star(m.quadruple, _to_b(m, x), _to_b(m, y))
        if not bs.is_zero():
            op = _level_op(m, lam, m.G.space)
            if target == "s":
                op_coords = m._coords_S(op)
                coeff_coords = m._coords_B(bs)
                for si, cs in op_coords.items():
                    for bi, cb in coeff_coords.items():
                        idx = m.index_of[("s", (si, bi))]
                        coeffs[idx] = coeffs.get(idx, QZERO) + factor * cs * cb
            else:
                op_coords = m._coords_G(op)
                coeff_coords = m._coords_A(bs)
                for gi, cg in op_coords.items():
                    for ai, ca in coeff_coords.items():
                        idx = m.index_of[("g", (gi, ai))]
                        coeffs[idx] = coeffs.get(idx, QZERO) + factor * cg * ca
    return GradedElement(m, coeffs)


def _to_b(m: GradedModel, v: SparseVector) -> SparseVector:
    return SparseVector(m.quadruple.b_space, dict(v.entries))


def _level_op(m: GradedModel, lam: frozenset, space) -> SparseMatrix:
    """(1/|I_lambda|) J_lambda - (1/m0) J_0 on the given natural space."""
    j_lam = TruncationIdempotent(space, lam).matrix
    j_0 = TruncationIdempotent(space, set(range(1, m.m0 + 1))).matrix
    return j_lam.scale(Q(1, len(lam))) - j_0.scale(Q(1, m.m0))


def verify_level_transition(m: GradedModel, added: int) -> dict:
    """Level-transition biconditional: ker of the level-0 coset map equals
    ker(level-lambda map) intersect ker(beta*), checked as exact subspace
    equality over b (x) b.  lambda = I_0 plus ``added`` fresh indices; the
    ambient natural space is extended when lambda exceeds the truncation.
    """
    lam = frozenset(range(1, m.m0 + added + 1))
    n_ext = max(m.n, m.m0 + added)
    from .liealg import FormedSpace

    ext = FormedSpace(m.G.family, n_ext)
    op = _level_op(m, lam, ext.space)
    checks = []
    op_zero_at_base = _level_op(
        m, frozenset(range(1, m.m0 + 1)), ext.space
    ).is_zero()
    checks.append(
        {
            "name": "correction vanishes at lambda = I_0",
            "status": "pass" if op_zero_at_base else "fail",
            "witnesses": [],
        }
    )
    target, factor = _level_correction_targets(m)
    op_ok = not op.is_zero()
    if target is None:
        # families with commutative coordinates: correction is identically 0
        bsm = beta_star_map_rows(m.quadruple)
        all_zero = all(row.is_zero() for row in bsm.values())
        checks.append(
            {
                "name": "beta* vanishes identically (commutative coordinates)",
                "status": "pass" if all_zero else "fail",
                "witnesses": [],
            }
        )
    else:
        if ext.gram is not None:
            sym_defect = (op.transpose() @ ext.gram) - (ext.gram @ op)
            op_in_s = sym_defect.is_zero() and op.trace() == 0
        else:
            op_in_s = op.trace() == 0
        checks.append(
            {
                "name": "level operator nonzero, traceless, form-compatible",
                "status": "pass" if (op_ok and op_in_s) else "fail",
                "witnesses": [],
            }
        )
        # kernel comparison over the tensor space
        tensor = m.bb.tensor
        proj_rows = _projection_rows(m)
        bstar_rows = list(beta_star_map_rows(m.quadruple).values())
        ker0 = m.dpart.relations
        ker_joint = kernel_of_rows(proj_rows + bstar_rows, tensor)
        forward = ker0.is_subspace_of(ker_joint)
        backward = ker_joint.is_subspace_of(ker0)
        checks.append(
            {
                "name": "sum of level-0 cosets vanishes => sum of beta* vanishes",
                "status": "pass" if forward else "fail",
                "witnesses": [],
            }
        )
        checks.append(
            {
                "name": "sum of level-lambda cosets and beta* vanish => level-0 sum vanishes",
                "status": "pass" if backward else "fail",
                "witnesses": [],
            }
        )
    status = "pass" if all(c["status"] == "pass" for c in checks) else "fail"
    return {
        "name": f"level-transition[+{added}]",
        "status": status,
        "lambda_size": len(lam),
        "checks": checks,
    }


def _projection_rows(m: GradedModel) -> list[SparseVector]:
    """Rows of the tensor -> D-part projection (functionals per coset label)."""
    tensor = m.bb.tensor
    rows: dict[str, dict[str, Fraction]] = {}
    for lab in tensor.labels:
        proj = m.dpart.project(tensor.basis_vector(lab))
        for r, c in proj.entries.items():
            rows.setdefault(r, {})[lab] = c
    return [SparseVector(tensor, entries) for entries in rows.values()]
