"""Acceptance criteria, one test per criterion, exact arithmetic throughout.

Each test prints a single PASS line (visible with -s / -rA) and enforces
the stated runtime budget.  Zero-tolerance: every identity is checked
with exact rationals, no approximate comparisons anywhere.
"""

import json
import time
from fractions import Fraction as Q

import pytest

from rootgraded.coord import (
    build_bb,
    check_uniform,
    full_homology,
    parse_preset_spec,
    relation_generators,
    beta_star_map_rows,
    validate_quadruple,
)
from rootgraded.exactla import commutator
from rootgraded.graded import (
    build_model,
    subalgebra,
    verify_antisymmetry,
    verify_grading,
    verify_jacobi,
    verify_level_transition,
)
from rootgraded.liealg import (
    build_algebra,
    build_module,
    derivation_span_equals_oB,
    expected_dimension,
    matrix_unit,
)
from rootgraded.rootsys import (
    Root,
    classify_lengths,
    generate,
    validate_root_system,
)

PRESETS = [
    "matrix:k=2",
    "group_ring:m=3",
    "clifford:d=2",
    "matrix_transpose:k=2",
    "symplectic:m=2",
    "matrix_hermitian:k=2,m=2",
]

MODEL_CONFIGS = [
    ("BC", 5, 4, "symplectic:m=2"),
    ("BC", 5, 4, "matrix_hermitian:k=2,m=2"),
    ("A", 6, 5, "matrix:k=2"),
    ("D", 7, 5, "group_ring:m=3"),
    ("B", 6, 5, "clifford:d=2"),
    ("C", 6, 5, "matrix_transpose:k=2"),
]

JACOBI_SEED = 42
JACOBI_SAMPLES = 2000
EXHAUSTIVE_MAX_DIM = 120

_models = {}
_quads = {}


def get_quad(preset):
    if preset not in _quads:
        _quads[preset] = parse_preset_spec(preset)
    return _quads[preset]


def get_model(config):
    if config not in _models:
        fam, n, ell, preset = config
        _models[config] = build_model(fam, n, ell, get_quad(preset), "zero")
    return _models[config]


def report_line(num, label, elapsed, budget):
    print(f"ACCEPTANCE {num}: PASS  {label}  ({elapsed:.2f}s < {budget}s)")


def count_oracle(family, n):
    pairs = n * (n - 1)
    return {
        "A": pairs,
        "D": 2 * pairs,
        "B": 2 * pairs + 2 * n,
        "C": 2 * pairs + 2 * n,
        "BC": 2 * pairs + 4 * n,
    }[family]


def test_criterion_1_root_systems():
    t0 = time.monotonic()
    for family in ("A", "B", "C", "D", "BC"):
        for n in range(1, 9):
            system = generate(family, n)
            assert len(system.nonzero()) == count_oracle(family, n)
            assert validate_root_system(system) == []
    elapsed = time.monotonic() - t0
    report_line(1, "root-system axioms and counts, n=1..8", elapsed, 1)
    assert elapsed < 1.0


def test_criterion_2_algebras():
    t0 = time.monotonic()
    for family in ("A", "B", "C", "D"):
        for n in range(2, 7):
            alg = build_algebra(family, n)
            assert alg.dim == expected_dimension(family, n)
            gram = alg.nat.gram
            for m in alg.basis_mats:
                if family == "A":
                    assert m.trace() == 0
                else:
                    assert (m.transpose() @ gram + gram @ m).is_zero()
            # closure: brackets land back in the algebra (per-weight solve)
            mats = alg.basis_mats
            for i, x in enumerate(mats):
                for y in mats[i + 1 :]:
                    alg.coords_of_mat(commutator(x, y))  # raises if outside
            # root spaces: one dimensional, [h, x] = alpha(h) x exactly
            assert set(alg.root_space_index) == set(generate(family, n).nonzero())
            for alpha, positions in alg.root_space_index.items():
                assert len(positions) == 1
                x = alg.basis_mats[positions[0]]
                for pos, h in enumerate(alg.cartan):
                    if family == "A":
                        lam = Q(alpha.coords.get(pos + 1, 0) - alpha.coords.get(pos + 2, 0))
                    else:
                        lam = Q(alpha.coords.get(pos + 1, 0))
                    assert commutator(h, x) == x.scale(lam)
            _check_classical_span_formulas(alg, family, n)
    elapsed = time.monotonic() - t0
    report_line(2, "algebra conditions, closure, dims, root spaces, n=2..6", elapsed, 10)
    assert elapsed < 10.0


def _check_classical_span_formulas(alg, family, n):
    """The classical root-space spanning vectors, up to scalar."""
    sp = alg.space

    def spans(alpha, mat):
        x = alg.root_vector(alpha)
        coords = alg.coords_of_mat(mat)
        (pos, coeff), = coords.items()
        assert alg.wb.basis_mats[pos] == x and coeff != 0

    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            eij = Root.eps(i) - Root.eps(j)
            if family == "A":
                spans(eij, matrix_unit(f"v:{i}", f"v:{j}", sp))
                continue
            spans(eij, matrix_unit(f"v:{i}", f"v:{j}", sp) - matrix_unit(f"vb:{j}", f"vb:{i}", sp))
            if i < j:
                plus = Root.eps(i) + Root.eps(j)
                if family == "C":
                    spans(plus, matrix_unit(f"v:{i}", f"vb:{j}", sp) + matrix_unit(f"v:{j}", f"vb:{i}", sp))
                else:
                    spans(plus, matrix_unit(f"v:{i}", f"vb:{j}", sp) - matrix_unit(f"v:{j}", f"vb:{i}", sp))
        if family == "B":
            spans(Root.eps(i), matrix_unit(f"v:{i}", "v:0", sp) - matrix_unit("v:0", f"vb:{i}", sp))
        if family == "C":
            spans(Root.eps(i, 2), matrix_unit(f"v:{i}", f"vb:{i}", sp))


def test_criterion_3_clifford_jordan():
    t0 = time.monotonic()
    for n, dim in ((1, 3), (2, 10), (3, 21)):
        ok, span_dim, alg_dim = derivation_span_equals_oB(n)
        assert ok and span_dim == dim and alg_dim == dim
    elapsed = time.monotonic() - t0
    report_line(3, "D_{V,V} = o_B as subspaces, n=1..3", elapsed, 5)
    assert elapsed < 5.0


def test_criterion_4_modules():
    t0 = time.monotonic()
    for n in range(2, 6):
        for family, kinds in (("B", ("V",)), ("C", ("V", "S"))):
            alg = build_algebra(family, n)
            for kind in kinds:
                mod = build_module(alg, kind)
                wi = mod.weight_index()
                if kind == "V":
                    expect = {Root.eps(i, s) for i in range(1, n + 1) for s in (1, -1)}
                    if family == "B":
                        expect.add(Root.zero())
                    assert set(wi) == expect
                    for i in range(1, n + 1):
                        sub = wi[Root.eps(i)]
                        assert sub.dim == 1
                        assert sub.rows[0] == mod.space.basis_vector(f"v:{i}")
                        subm = wi[Root.eps(i, -1)]
                        assert subm.rows[0] == mod.space.basis_vector(f"vb:{i}")
                    if family == "B":
                        assert wi[Root.zero()].rows[0] == mod.space.basis_vector("v:0")
                else:
                    assert mod.dim == 2 * n * n - n - 1
                    expect = {Root.zero()}
                    for i in range(1, n + 1):
                        for j in range(1, n + 1):
                            if i != j:
                                expect.add(Root.eps(i) - Root.eps(j))
                            if i < j:
                                expect.add(Root.eps(i) + Root.eps(j))
                                expect.add(-(Root.eps(i) + Root.eps(j)))
                    assert set(wi) == expect
                    assert wi[Root.zero()].dim == n - 1
                    sp = alg.space
                    for i in range(1, n + 1):
                        for j in range(i + 1, n + 1):
                            pl = mod.from_matrix(
                                matrix_unit(f"v:{i}", f"vb:{j}", sp)
                                - matrix_unit(f"v:{j}", f"vb:{i}", sp)
                            )
                            assert wi[Root.eps(i) + Root.eps(j)].contains(pl)
                # module axiom via action matrices: M([x,y]) = [M(x), M(y)]
                acts = [mod.action_matrix(x) for x in alg.basis_mats]
                for i, x in enumerate(alg.basis_mats):
                    for j in range(i + 1, len(alg.basis_mats)):
                        y = alg.basis_mats[j]
                        coords = alg.coords_of_mat(commutator(x, y))
                        expected = commutator(acts[i], acts[j])
                        acc = expected.scale(Q(-1))
                        for pos, c in coords.items():
                            acc = acc + acts[pos].scale(c)
                        assert acc.is_zero()
    elapsed = time.monotonic() - t0
    report_line(4, "module weight tables and module axiom, n=2..5", elapsed, 30)
    assert elapsed < 30.0


@pytest.mark.parametrize("preset", PRESETS)
def test_criterion_5_coordinate_suite(preset):
    t0 = time.monotonic()
    q = get_quad(preset)
    assert validate_quadruple(q)["valid"]
    from rootgraded.coord import b_mul, derivation, diamond_heart

    labs = q.b_space.labels
    for l1 in labs:
        for l2 in labs:
            d = derivation(q, 4, q.b_space.basis_vector(l1), q.b_space.basis_vector(l2))
            if d.is_zero():
                continue
            for xl in labs:
                for yl in labs:
                    x, y = q.b_space.basis_vector(xl), q.b_space.basis_vector(yl)
                    assert d.apply(b_mul(q, x, y)) == b_mul(q, d.apply(x), y) + b_mul(
                        q, x, d.apply(y)
                    )
    bb = build_bb(q, 4)  # raises on any well-definedness failure
    csp = bb.quotient.coset_space
    basis = [csp.basis_vector(l) for l in csp.labels]
    table = {}
    for i, u in enumerate(basis):
        for j, v in enumerate(basis):
            table[(i, j)] = bb.bracket_cosets(u, v)
            if j < i:
                assert table[(i, j)] == table[(j, i)].scale(Q(-1))
    for i, u in enumerate(basis):
        for j, v in enumerate(basis):
            for k, w in enumerate(basis):
                lhs = bb.bracket_cosets(u, table[(j, k)])
                rhs = bb.bracket_cosets(table[(i, j)], w) + bb.bracket_cosets(v, table[(i, k)])
                assert lhs == rhs
    fh = full_homology(bb)  # raises if FH is not central
    assert fh.dim <= bb.dim
    if q.c_dim:
        for lc in q.c_space.labels:
            for lcp in q.c_space.labels:
                c, cp = q.c_space.basis_vector(lc), q.c_space.basis_vector(lcp)
                dia, heart = diamond_heart(q, c, cp)
                assert q.a_star(dia) == dia
                assert q.a_star(heart) == heart.scale(Q(-1))
    elapsed = time.monotonic() - t0
    print(f"ACCEPTANCE 5[{preset}]: PASS  coordinate suite at ell=4  ({elapsed:.2f}s < 60s)")
    assert elapsed < 60.0


def test_criterion_6_uniform_and_remark():
    t0 = time.monotonic()
    for preset in PRESETS:
        q = get_quad(preset)
        gens = relation_generators(q)
        rows = beta_star_map_rows(q)
        for g in gens:
            for row in rows.values():
                val = sum((row.get(lab) * c for lab, c in g.entries.items()), Q(0))
                assert val == 0
        bb = build_bb(q, 4)
        report = check_uniform(bb, [], cross_check_ell=7)
        assert report["uniform"] is True
        assert report["cross_check"]["uniform"] is True
    elapsed = time.monotonic() - t0
    report_line(6, "beta* vanishes on generators; verdicts agree at ell=4,7", elapsed, 30)
    assert elapsed < 30.0


def _criterion_7_report() -> tuple[str, float]:
    t0 = time.monotonic()
    results = []
    for config in MODEL_CONFIGS:
        fam, n, ell, preset = config
        model = build_model(fam, n, ell, get_quad(preset), "zero")
        checks = [verify_antisymmetry(model)]
        checks.append(
            verify_jacobi(
                model, {"kind": "random", "samples": JACOBI_SAMPLES, "seed": JACOBI_SEED}
            )
        )
        if model.dim <= EXHAUSTIVE_MAX_DIM:
            checks.append(verify_jacobi(model, {"kind": "exhaustive_basis"}))
        checks.append(verify_grading(model))
        results.append(
            {
                "model": {"family": fam, "n": n, "ell": ell, "preset": preset},
                "dim": model.dim,
                "checks": checks,
            }
        )
    report = json.dumps(results, sort_keys=True, indent=2, default=str)
    return report, time.monotonic() - t0


_c7_cache = {}


def test_criterion_7_graded_construction():
    report, elapsed = _criterion_7_report()
    _c7_cache["report"] = report
    _c7_cache["elapsed"] = elapsed
    data = json.loads(report)
    exhaustive_seen = 0
    for entry in data:
        for check in entry["checks"]:
            assert check["status"] == "pass", (entry["model"], check)
            if check["name"] == "jacobi[exhaustive_basis]":
                exhaustive_seen += 1
    assert exhaustive_seen == sum(
        1 for e in data if e["dim"] <= EXHAUSTIVE_MAX_DIM
    )
    assert exhaustive_seen >= 2  # symplectic BC and clifford B qualify
    report_line(7, "six models: antisymmetry, Jacobi, grading", elapsed, 600)
    assert elapsed < 600.0


def test_criterion_8_subsystems():
    t0 = time.monotonic()
    for config in MODEL_CONFIGS:
        fam, n, ell, preset = config
        model = get_model(config)
        s_roots = generate(fam, n - 1).nonzero()
        sub = subalgebra(model, s_roots)
        r = sub.verify()
        assert r["status"] == "pass", (config, r)
        assert sub.dim < model.dim
    elapsed = time.monotonic() - t0
    report_line(8, "proper full subsystem handles pass S-grading", elapsed, 120)
    assert elapsed < 120.0


def test_criterion_9_level_transitions():
    t0 = time.monotonic()
    for config in MODEL_CONFIGS:
        fam = config[0]
        if fam not in ("BC", "A"):
            continue
        model = get_model(config)
        for added in (1, 2):
            r = verify_level_transition(model, added)
            assert r["status"] == "pass", (config, added, r)
            base = [c for c in r["checks"] if "vanishes at lambda = I_0" in c["name"]]
            assert base and base[0]["status"] == "pass"
    elapsed = time.monotonic() - t0
    report_line(9, "level-transition biconditional, +1 and +2 indices", elapsed, 120)
    assert elapsed < 120.0


def test_criterion_10_determinism():
    if "report" not in _c7_cache:
        _c7_cache["report"], _c7_cache["elapsed"] = _criterion_7_report()
    t0 = time.monotonic()
    second, _ = _criterion_7_report()
    assert second == _c7_cache["report"]
    elapsed = time.monotonic() - t0
    report_line(10, "criterion-7 report bytes identical across runs", elapsed, 600)
