from fractions import Fraction as Q

import pytest

from rootgraded.coord import CoordinateQuadruple, parse_preset_spec
from rootgraded.exactla import BasedSpace
from rootgraded.graded import (
    GradedElement,
    ModelError,
    build_model,
    level_coset,
    subalgebra,
    verify_antisymmetry,
    verify_grading,
    verify_jacobi,
    verify_level_transition,
)
from rootgraded.rootsys import Root, generate

_CACHE = {}


def model(family, n, ell, preset, k="zero", override=False):
    key = (family, n, ell, preset, k, override)
    if key not in _CACHE:
        _CACHE[key] = build_model(
            family, n, ell, parse_preset_spec(preset), k, override_bounds=override
        )
    return _CACHE[key]


def nilpotent_pair_quadruple():
    """F[x,y]/(x,y)^2: commutative with nonzero cyclic homology (x wedge y)."""
    labels = ["n:1", "n:x", "n:y"]
    mult = {}
    for l1 in labels:
        for l2 in labels:
            if l1 == "n:1":
                mult[(l1, l2)] = {l2: Q(1)}
            elif l2 == "n:1":
                mult[(l1, l2)] = {l1: Q(1)}
            else:
                mult[(l1, l2)] = {}
    return CoordinateQuadruple(
        "D", labels, mult, {"n:1": Q(1)}, {(l, l): Q(1) for l in labels},
        name="nilpotent_pair",
    )


def test_build_model_dimensions():
    m = model("BC", 5, 4, "symplectic:m=2")
    assert len(m.G.wb.basis_mats) == 55  # sp(5)
    v_part = [b for b in m.basis if b[0] == "v"]
    assert len(v_part) == 20  # dim V * dim C = 10 * 2
    assert m.dim == 55 + 44 * 0 + 20 + m.dpart.dim


def test_type_mismatch_error():
    with pytest.raises(ModelError):
        build_model("A", 6, 5, parse_preset_spec("symplectic:m=2"))


def test_rank_bound_enforced_with_override():
    q = parse_preset_spec("symplectic:m=2")
    with pytest.raises(ModelError):
        build_model("BC", 4, 3, q)
    m = build_model("BC", 4, 3, q, override_bounds=True)
    assert m.sub_bound


def test_k_span_outside_homology_rejected():
    q = parse_preset_spec("matrix:k=2")
    import rootgraded.coord as coord

    bb = coord.build_bb(q, 5)
    fh = coord.full_homology(bb)
    csp = bb.quotient.coset_space
    outside = next(
        csp.basis_vector(l) for l in csp.labels if not fh.basis.contains(csp.basis_vector(l))
    )
    with pytest.raises(ValueError):
        build_model("A", 6, 5, q, [outside])


def test_unit_row_bracket():
    # [x (x) 1, y (x) 1] = [x, y] (x) 1 (the 1(x)1 coset dies in the quotient)
    m = model("BC", 4, 4, "symplectic:m=2")
    unit_coords = m._coords_A(m.quadruple.unit)
    assert unit_coords == {0: Q(1)}
    gdim = len(m.G.wb.basis_mats)
    for i in range(0, gdim, 7):
        for j in range(0, gdim, 11):
            xi = m.index_of[("g", (i, 0))]
            xj = m.index_of[("g", (j, 0))]
            row = m.bracket_indices(xi, xj)
            expected = {
                m.index_of[("g", (k, 0))]: c for k, c in m._lie_g[(min(i, j), max(i, j))].items()
            }
            if i > j:
                expected = {k: -c for k, c in expected.items()}
            if i == j:
                expected = {}
            assert row == expected


def test_type_d_dpart_abelian_and_central():
    m = build_model("D", 6, 5, nilpotent_pair_quadruple(), "zero")
    d_idx = [i for i, (k, _) in enumerate(m.basis) if k == "d"]
    assert len(d_idx) == 1  # HC1 of F[x,y]/(x,y)^2 is one dimensional
    for i in d_idx:
        for j in range(m.dim):
            assert not m.bracket_indices(i, j)


def test_type_d_k_fh_quotients_everything():
    m = build_model("D", 6, 5, nilpotent_pair_quadruple(), "fh")
    assert m.dpart.dim == 0
    assert m.dim == len(m.G.wb.basis_mats) * 3


def test_bc_symplectic_orthogonal_vectors_row():
    # (u, v) = 0 and heart = 0: [u(x)c, v(x)c'] = (u o v)(x) (c diamond c')
    m = model("BC", 4, 4, "symplectic:m=2")
    i = m.vmod.space.pos("v:1")
    j = m.vmod.space.pos("v:2")
    xi = m.index_of[("v", (i, 0))]
    xj = m.index_of[("v", (j, 1))]
    row = m.bracket_indices(xi, xj)
    assert row
    kinds = {m.basis[idx][0] for idx in row}
    assert kinds == {"g"}  # only the circ (x) diamond term survives
    from rootgraded.liealg import v_ops

    nat = m.G.nat
    u = nat.space.basis_vector("v:1")
    w = nat.space.basis_vector("v:2")
    q = m.quadruple
    c0 = q.c_space.basis_vector("c:0")
    c1 = q.c_space.basis_vector("c:1")
    dia = (q.f_val(c0, c1) - q.f_val(c1, c0)).scale(Q(1, 2))
    expected = {}
    for gi, cg in m._coords_G(v_ops(u, w, nat, m.idem0, "circ")).items():
        for ai, ca in m._coords_A(dia).items():
            expected[m.index_of[("g", (gi, ai))]] = cg * ca
    assert row == expected


def test_exhaustive_antisymmetry_and_jacobi_small_bc():
    m = model("BC", 4, 4, "symplectic:m=2")
    ra = verify_antisymmetry(m)
    assert ra["status"] == "pass"
    rj = verify_jacobi(m, {"kind": "exhaustive_basis"})
    assert rj["status"] == "pass"
    assert rj["triples"] == sum(
        1
        for i in range(m.dim)
        for j in range(i, m.dim)
        for k in range(j, m.dim)
    )


def test_random_jacobi_type_a():
    m = model("A", 6, 5, "matrix:k=2")
    r = verify_jacobi(m, {"kind": "random", "samples": 500, "seed": 42})
    assert r["status"] == "pass" and r["triples"] == 500


@pytest.mark.parametrize(
    "family,n,ell,preset",
    [
        ("BC", 4, 4, "symplectic:m=2"),
        ("A", 6, 5, "matrix:k=2"),
        ("B", 5, 5, "clifford:d=2"),
        ("C", 5, 5, "matrix_transpose:k=2"),
    ],
)
def test_grading_small_models(family, n, ell, preset):
    r = verify_grading(model(family, n, ell, preset))
    assert r["status"] == "pass", r


def test_grading_type_d():
    m = build_model("D", 6, 5, nilpotent_pair_quadruple(), "zero")
    r = verify_grading(m)
    assert r["status"] == "pass", r


def test_weight_table_dimensions_bc():
    m = model("BC", 4, 4, "symplectic:m=2")
    dims = {}
    for w in m.weight_of:
        dims[w] = dims.get(w, 0) + 1
    assert dims[Root.eps(1)] == 2  # dim C
    assert dims[Root.eps(1) + Root.eps(2)] == 1  # dim A + dim B = 1 + 0
    assert dims[Root.eps(1, 2)] == 1  # dim A


def test_subalgebra_full_system_is_whole_model():
    m = model("BC", 4, 4, "symplectic:m=2")
    sub = subalgebra(m, generate("BC", 4).nonzero())
    assert sub.dim == m.dim
    assert sub.verify()["status"] == "pass"


def test_subalgebra_proper_subsystem():
    m = model("BC", 5, 4, "symplectic:m=2")
    sub = subalgebra(m, generate("BC", 4).nonzero())
    r = sub.verify()
    assert r["status"] == "pass"
    assert sub.dim < m.dim


def test_subalgebra_rejects_bad_subsets():
    m = model("BC", 4, 4, "symplectic:m=2")
    with pytest.raises(ModelError):
        subalgebra(m, [Root.eps(1) - Root.eps(2)])  # not reflection closed
    disconnected = [
        Root.eps(1, 2), Root.eps(1, -2), Root.eps(1), Root.eps(1, -1),
        Root.eps(2, 2), Root.eps(2, -2), Root.eps(2), Root.eps(2, -1),
    ]
    with pytest.raises(ModelError):
        subalgebra(m, disconnected)


def test_level_coset_at_base_subset_is_plain():
    m = model("BC", 5, 4, "symplectic:m=2")
    b = m.quadruple.b_space
    c0, c1 = b.basis_vector("c:0"), b.basis_vector("c:1")
    lc = level_coset(m, range(1, 5), c0, c1)
    assert not lc.s_part and lc.d_part
    direct = m._dcoset(c0, c1)
    assert lc.coeffs == {m.index_of[("d", (k,))]: v for k, v in direct.items()}


def test_level_coset_correction_nonzero_type_a():
    m = model("A", 7, 5, "matrix:k=2")
    b = m.quadruple.b_space
    e01, e10 = b.basis_vector("m:0,1"), b.basis_vector("m:1,0")
    lc = level_coset(m, range(1, 8), e01, e10)
    assert lc.g_part  # [a, a'] != 0 so the correction appears
    lc0 = level_coset(m, range(1, 7), e01, e10)
    assert not lc0.g_part


def test_level_coset_type_d_level_independent():
    m = build_model("D", 7, 5, nilpotent_pair_quadruple(), "zero")
    b = m.quadruple.b_space
    x, y = b.basis_vector("n:x"), b.basis_vector("n:y")
    lc6 = level_coset(m, range(1, 7), x, y)
    lc7 = level_coset(m, range(1, 8), x, y)
    assert lc6 == lc7


def test_level_coset_validates_subset():
    m = model("BC", 5, 4, "symplectic:m=2")
    b = m.quadruple.b_space
    c0 = b.basis_vector("c:0")
    with pytest.raises(ModelError):
        level_coset(m, [2, 3, 4, 5], c0, c0)  # misses I_0
    with pytest.raises(ModelError):
        level_coset(m, range(1, 7), c0, c0)  # exceeds truncation


@pytest.mark.parametrize("added", [1, 2])
def test_level_transition_bc(added):
    r = verify_level_transition(model("BC", 5, 4, "symplectic:m=2"), added)
    assert r["status"] == "pass", r


@pytest.mark.parametrize("added", [1, 2])
def test_level_transition_type_a(added):
    r = verify_level_transition(model("A", 6, 5, "matrix:k=2"), added)
    assert r["status"] == "pass", r


def test_level_transition_type_d_collapses():
    m = build_model("D", 6, 5, nilpotent_pair_quadruple(), "zero")
    r = verify_level_transition(m, 1)
    assert r["status"] == "pass"
    names = [c["name"] for c in r["checks"]]
    assert any("commutative" in n for n in names)


def _basis_key(m, i):
    kind, key = m.basis[i]
    if kind == "g":
        return ("g", tuple(sorted(m.G.wb.basis_vecs[key[0]].entries.items())), key[1])
    if kind == "s":
        return ("s", tuple(sorted(m.smod.wb.basis_vecs[key[0]].entries.items())), key[1])
    if kind == "v":
        return ("v", m.vmod.space.labels[key[0]], key[1])
    return ("d", m.dpart.coset_space.labels[key[0]])


def test_truncation_coherence():
    m4 = model("BC", 4, 4, "symplectic:m=2")
    m5 = model("BC", 5, 4, "symplectic:m=2")
    m5_index = {_basis_key(m5, i): i for i in range(m5.dim)}
    embed = {}
    for i in range(m4.dim):
        k = _basis_key(m4, i)
        assert k in m5_index
        embed[i] = m5_index[k]
    for i in embed:
        for j in embed:
            row4 = m4.bracket_indices(i, j)
            mapped = {m5_index[_basis_key(m4, idx)]: c for idx, c in row4.items()}
            assert mapped == m5.bracket_indices(embed[i], embed[j])


def test_lambda_subalgebra_closure_intermediate():
    # L^lambda with I_0 proper in lambda proper in I is bracket closed
    m = model("BC", 6, 4, "symplectic:m=2")
    lam = set(range(1, 6))
    keep = []
    for i, (kind, key) in enumerate(m.basis):
        if kind == "d":
            keep.append(i)
            continue
        if kind == "g":
            labs = {lab for pair in m.G.wb.basis_mats[key[0]].entries for lab in pair}
        elif kind == "s":
            labs = {lab for pair in m.smod.wb.basis_mats[key[0]].entries for lab in pair}
        else:
            labs = {m.vmod.space.labels[key[0]]}
        if {int(l.split(":")[1]) for l in labs} <= lam:
            keep.append(i)
    keep_set = set(keep)
    assert len(keep) < m.dim
    for a in keep:
        for b in keep:
            assert all(i in keep_set for i in m.bracket_indices(a, b))


def test_graded_element_parts_and_arithmetic():
    m = model("BC", 4, 4, "symplectic:m=2")
    gi = m.index_of[("g", (0, 0))]
    vi = m.index_of[("v", (0, 0))]
    x = m.element({gi: Q(2), vi: Q(1, 3)})
    assert x.g_part == {(0, 0): Q(2)}
    assert x.v_part == {(0, 0): Q(1, 3)}
    y = x.scale(Q(3)) - x
    assert y.coeffs[gi] == Q(4)
    z = m.bracket(x, x)
    assert z.is_zero()


@pytest.mark.parametrize(
    "family,n,ell,preset",
    [
        ("BC", 4, 4, "matrix_hermitian:k=2,m=2"),
        ("A", 6, 5, "matrix:k=2"),
        ("C", 5, 5, "matrix_transpose:k=2"),
    ],
)
def test_jacobi_exhaustive_against_dpart(family, n, ell, preset):
    # random sampling rarely hits the low-dimensional D-part of the big
    # models, so run every triple with at least one D-part slot directly
    m = model(family, n, ell, preset)
    from rootgraded.graded import _jacobi_defect_int

    _denom, scaled = m.int_table()
    d_idx = [i for i, (k, _) in enumerate(m.basis) if k == "d"]
    assert d_idx
    for d in d_idx:
        for i in range(m.dim):
            for j in range(i, m.dim):
                assert not _jacobi_defect_int(m, d, i, j, scaled), (d, i, j)


def test_jacobi_type_d_with_nonzero_dpart():
    # the group-ring preset has a zero-dimensional D-part, so Jacobi there
    # never exercises the tr(xy)<a,a'> term of the type-D bracket; this
    # quadruple has a one-dimensional D-part
    m = build_model("D", 6, 5, nilpotent_pair_quadruple(), "zero")
    assert m.dpart.dim == 1
    r = verify_jacobi(m, {"kind": "random", "samples": 1500, "seed": 7})
    assert r["status"] == "pass"
    from rootgraded.graded import _jacobi_defect_int

    _denom, scaled = m.int_table()
    d_idx = [i for i, (k, _) in enumerate(m.basis) if k == "d"]
    for d in d_idx:
        for i in range(m.dim):
            for j in range(i, m.dim):
                assert not _jacobi_defect_int(m, d, i, j, scaled)


def test_subalgebra_type_a_on_three_of_six_indices():
    # the handle's matrix part is a full sl(3) tensor A copy:
    # 6 roots x dim A = 24 nonzero-weight vectors, plus a zero part of
    # 2*4 = 8 (Cartan tensor A) + 3 (the whole D-part, reached through
    # tr(xy)<a,a'> with x, y in opposite root spaces) = 11
    m = model("A", 6, 5, "matrix:k=2")
    sub = subalgebra(m, generate("A", 3).nonzero())
    assert len(sub.nonzero_indices) == 24
    assert sub.zero_part.dim == 11
    assert sub.dim == 35
    assert sub.verify()["status"] == "pass"


@pytest.mark.parametrize(
    "preset", ["symplectic:m=4", "matrix_hermitian:k=2,m=4"]
)
def test_wider_module_presets(preset):
    # m = 4 exercises the two-block standard skew form
    m = model("BC", 4, 4, preset)
    assert verify_jacobi(m, {"kind": "random", "samples": 800, "seed": 11})["status"] == "pass"
    assert verify_grading(m)["status"] == "pass"
    from rootgraded.graded import _jacobi_defect_int

    _denom, scaled = m.int_table()
    d_idx = [i for i, (k, _) in enumerate(m.basis) if k == "d"]
    for d in d_idx:
        for i in range(m.dim):
            for j in range(i, m.dim):
                assert not _jacobi_defect_int(m, d, i, j, scaled)


def test_level_coset_mixed_pair_is_zero():
    # pairs mixing the fixed and skew parts carry no coset and no correction
    m = model("C", 5, 5, "matrix_transpose:k=2")
    q = m.quadruple
    a = q.b_space.basis_vector("m:0,0") + q.b_space.basis_vector("m:1,1")
    b = q.b_space.basis_vector("m:0,1") - q.b_space.basis_vector("m:1,0")
    lc = level_coset(m, range(1, 6), a, b)
    assert lc.is_zero()
