"""Acceptance checks, one test per criterion.

Each test records a one-line verdict that is printed in the pytest terminal
summary (and by running this file as a script), then asserts it.
"""

import time

import numpy as np

from displab.displacement import (EstimatorConfig, check_convex_combo_bound,
                                  compare_cyclic_rotations, exact_displacement)
from displab.experiments import depierro_sets, run_demo, run_random_suite
from displab.hyperbola import project_hyperbola_epigraph
from displab.monotone import (ConstantMap, NormalConeBox, PsdLinear, Shifted, SubdiffAbs,
                              resolvent, verify_resolvent_shift)
from displab.operators import (AffineScale, ProjBall, ProjBox, ProjHalfspace, ProjHyperbolaEpi,
                               ProjHyperplane, Translation, check_averaged,
                               check_firm_nonexpansive, compose, convex_combination)
from displab.product import synthesize_near_fixed_point
from displab.sampling import LEAF_KINDS, random_leaf, random_tuple, random_weights, trial_rng
from displab.trace import emit_trace

from conftest import ACCEPTANCE, bisect, grid_project_hyperbola

BOUND_TOL = 5e-3
SUITE_TIME_LIMIT = 120.0
PAIRS = 10_000

_suite_cache = {}


def _record(n, ok, detail):
    ACCEPTANCE[n] = (bool(ok), detail)
    assert ok, detail


def _suite():
    if "report" not in _suite_cache:
        start = time.perf_counter()
        rep = run_random_suite(trials=100, seed=42, dims=(1, 2, 5), m_values=(2, 3, 4), tol=BOUND_TOL)
        _suite_cache["report"] = rep
        _suite_cache["elapsed"] = time.perf_counter() - start
    return _suite_cache["report"], _suite_cache["elapsed"]


def _by_name(report):
    return {r["name"]: r for r in report.results}


def test_criterion_01_composition_bound():
    rep, elapsed = _suite()
    passes = rep.summary["composition_passes"]
    _record(1, passes == 100 and elapsed <= SUITE_TIME_LIMIT,
            f"composition bound {passes}/100, suite time {elapsed:.2f}s")


def test_criterion_02_translation_sharpness():
    rep = _by_name(run_demo("translations"))
    same, opp = rep["same_sign_equality"], rep["opposite_sign_strict"]
    ok = (abs(same["lhs"] - 3.0) <= 1e-12 and abs(same["lhs"] - same["rhs"]) <= 1e-12
          and abs(opp["lhs"] - 1.0) <= 1e-12 and opp["rhs"] - opp["lhs"] >= 1.0)
    _record(2, ok, f"|v|={same['lhs']!r} vs 3; opposite |v|={opp['lhs']!r} vs rhs {opp['rhs']}")


def test_criterion_03_convex_combo_bound():
    rep, _ = _suite()
    passes = rep.summary["convex_combo_passes"]
    strict = check_convex_combo_bound([0.5, 0.5], [Translation([1.0]), AffineScale(0.5, [0.0])])
    ok = passes == 100 and strict["lhs"] <= 1e-6 and abs(strict["rhs"] - 0.5) <= 1e-15
    _record(3, ok, f"convex bound {passes}/100; strict case lhs={strict['lhs']:.2e}, "
                   f"rhs={strict['rhs']}")


def test_criterion_04_cyclic_invariance():
    cfg = EstimatorConfig()
    gaps, draws = [], 0
    while len(gaps) < 50 and draws < 200:
        _, ops = random_tuple(trial_rng(42, draws), (1, 2, 5), (2, 3, 4))
        draws += 1
        cmp = compare_cyclic_rotations(ops, cfg)
        if all(cmp["converged"]):
            gaps.append(cmp["max_pairwise_gap"])
    worst = max(gaps) if gaps else float("inf")
    _record(4, len(gaps) == 50 and worst <= BOUND_TOL,
            f"{len(gaps)} converged tuples from {draws} draws, max gap {worst:.2e}")


def test_criterion_05_depierro():
    cyc = _by_name(run_demo("depierro-cyclic"))
    x, y = cyc["limit_on_line_y_eq_1"]["final_iterate"]
    cyc_ok = (cyc["residual"]["residual"] <= 1e-6 and cyc["residual"]["iterations"] <= 100_000
              and abs(y - 1.0) <= 1e-4 and x >= 1.0 - 1e-4)
    non = _by_name(run_demo("depierro-noncyclic"))
    xn = non["first_coordinate_reaches_100"]["final_iterate"][0]
    non_ok = (non["residual"]["residual"] <= 1e-3 and xn >= 100.0
              and non["residual"]["iterations"] <= 100_000)
    _record(5, cyc_ok and non_ok,
            f"cyclic residual {cyc['residual']['residual']:.1e} at ({x:.6f}, {y:.6f}); "
            f"noncyclic residual {non['residual']['residual']:.1e}, final x {xn:.3f} (needs >= 100)")


def test_criterion_06_resolvent_shift():
    rng = np.random.default_rng(6)
    d = 3
    a = rng.normal(size=(d, d))
    specs = [ConstantMap(rng.normal(size=d)), PsdLinear(a @ a.T), PsdLinear(a @ a.T + a - a.T),
             SubdiffAbs(0.8, d), NormalConeBox(-np.ones(d), 2 * np.ones(d)),
             Shifted(PsdLinear(np.eye(d)), rng.normal(size=d))]
    worst = 0.0
    for spec in specs:
        for k in range(10):
            v = rng.uniform(-3, 3, d)
            worst = max(worst, verify_resolvent_shift(spec, v, samples=100, seed=k)["max_abs_error"])
    _record(6, worst <= 1e-10, f"max abs error {worst:.2e} over {len(specs)} kinds x 10 shifts x 100 points")


def test_criterion_07_witness():
    eps, budget = 1e-2, 100_000
    cases = [("translations", [Translation([1.0]), Translation([2.0])]),
             ("depierro", list(depierro_sets()))]
    for k in range(20):
        _, ops = random_tuple(trial_rng(7, k), (1, 2, 5), (2, 3, 4))
        cases.append((f"random_{k}", ops))
    failed = []
    for name, ops in cases:
        v = [exact_displacement(op) for op in ops]
        _, cert = synthesize_near_fixed_point(ops, v, eps, budget)
        if not (cert.pass_ and cert.composite_residual <= cert.bound_rhs and cert.iterations <= budget):
            failed.append(name)
    _record(7, not failed, f"{len(cases) - len(failed)}/{len(cases)} certificates pass"
                           + (f"; failed {failed}" if failed else ""))


def _leaf_zoo():
    rng = np.random.default_rng(8)
    leaves = [ProjHyperplane([0.0, 1.0], 1.0), ProjHyperbolaEpi(),
              resolvent(PsdLinear([[2.0, 1.0], [-1.0, 1.0]])), resolvent(SubdiffAbs(0.5, 2)),
              resolvent(NormalConeBox([0.0, -1.0], [1.0, 1.0])),
              resolvent(Shifted(SubdiffAbs(1.0, 2), [0.5, -0.5]))]
    for kind in LEAF_KINDS:
        for dim in (1, 2, 5):
            leaves.append(random_leaf(rng, dim, kind))
    return leaves


def test_criterion_08_operator_invariants():
    rng = np.random.default_rng(9)
    leaves = _leaf_zoo()
    fne = sum(check_firm_nonexpansive(op, PAIRS, seed=i).violations for i, op in enumerate(leaves))
    combos, composes = [], []
    for k in range(6):
        dim, ops = random_tuple(trial_rng(8, k), (1, 2, 5), (2, 3, 4))
        combos.append(convex_combination(random_weights(rng, len(ops)), ops))
        composes.append((compose(ops), len(ops)))
    p1, p2, p3 = depierro_sets()
    combos.append(convex_combination([0.2, 0.3, 0.5], [p1, p2, p3]))
    composes.append((compose([p1, p2, p3]), 3))
    fne += sum(check_firm_nonexpansive(op, PAIRS, seed=100 + i).violations
               for i, op in enumerate(combos))
    avg = sum(check_averaged(op, m / (m + 1), PAIRS, seed=200 + i).violations
              for i, (op, m) in enumerate(composes))
    proj = [ProjHalfspace([1.0, -2.0], 0.5), ProjBox([-1.0, 0.0], [1.0, 0.5]),
            ProjBall([1.0, 1.0], 0.7), ProjHyperplane([0.0, 1.0], 0.0), ProjHyperbolaEpi()]
    idem = vi = 0
    for op in proj:
        for x, z in rng.uniform(-5, 5, (1000, 2, 2)):
            px, c = op(x), op(z)
            idem += np.max(np.abs(op(px) - px)) > 1e-10
            vi += (x - px) @ (c - px) > 1e-10 * max(1.0, x @ x)
    _record(8, fne == 0 and avg == 0 and idem == 0 and vi == 0,
            f"firm-NE violations {fne} ({len(leaves)} leaves, {len(combos)} combos); "
            f"m/(m+1) violations {avg}; idempotence {idem}; VI {vi}")


def test_criterion_09_hyperbola_oracle():
    rng = np.random.default_rng(10)
    worst = 0.0
    for p in rng.uniform(-5, 5, (1000, 2)):
        worst = max(worst, float(np.max(np.abs(project_hyperbola_epigraph(p) - grid_project_hyperbola(p)))))
    root = bisect(lambda t: t ** 4 - 2 * t ** 3 + 0.1 * t - 1, 2.0, 2.2)
    ex = [np.array_equal(project_hyperbola_epigraph([1.0, 1.0]), [1.0, 1.0]),
          np.allclose(project_hyperbola_epigraph([0.0, 0.0]), [1.0, 1.0], rtol=0, atol=1e-12),
          np.allclose(project_hyperbola_epigraph([2.0, 0.1]), [root, 1 / root], rtol=0, atol=1e-12)]
    _record(9, worst <= 1e-4 and all(ex), f"max grid deviation {worst:.2e}; worked examples {sum(ex)}/3")


def test_criterion_10_determinism(tmp_path):
    rep, _ = _suite()
    again = run_random_suite(trials=100, seed=42, dims=(1, 2, 5), m_values=(2, 3, 4), tol=BOUND_TOL)
    same_json = rep.to_json(include_wall_time=False) == again.to_json(include_wall_time=False)
    p1, p2, p3 = depierro_sets()
    svgs = []
    for k, ops in enumerate([[p1, p2, p3], [p1, p2, p3], [p2, p1, p3], [p2, p1, p3]]):
        path = tmp_path / f"trace{k}.svg"
        emit_trace(compose(ops), (-3.0, 0.5), 30, svg_path=path)
        svgs.append(path.read_bytes())
    same_svg = svgs[0] == svgs[1] and svgs[2] == svgs[3]
    _record(10, same_json and same_svg, f"suite JSON identical: {same_json}; SVG identical: {same_svg}")


if __name__ == "__main__":
    import pathlib
    import sys
    import tempfile

    status = 0
    for name, fn in sorted((k, v) for k, v in dict(globals()).items() if k.startswith("test_criterion")):
        try:
            if "tmp_path" in fn.__code__.co_varnames[:fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(pathlib.Path(d))
            else:
                fn()
        except AssertionError:
            status = 1
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    sys.exit(status)
