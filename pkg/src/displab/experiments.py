"""Named demonstrations and the randomized bound suite.

Every experiment returns an :class:`ExperimentReport` whose verdict is
computed only from the numeric fields it records, so the JSON alone is
enough to recheck pass/fail.
"""

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import dsl
from .displacement import (BOUND_TOL, EstimatorConfig, check_composition_bound,
                           check_convex_combo_bound, compare_cyclic_rotations,
                           diagnose_attainment, estimate_displacement,
                           exact_displacement)
from .operators import (AffineScale, ProjHyperbolaEpi, ProjHyperplane, Translation,
                        compose)
from .product import synthesize_near_fixed_point
from .sampling import random_tuple, random_weights, trial_rng

__all__ = ["ExperimentReport", "DEMOS", "run_demo", "run_random_suite", "depierro_sets",
           "DEPIERRO_X0", "verdict_of"]

DEPIERRO_X0 = (-3.0, 0.5)
DEPIERRO_BUDGET = 100_000
WITNESS_EPSILON = 1e-2
WITNESS_BUDGET = 100_000
DEMO_SEED = 0


def verdict_of(results):
    """``inconclusive`` if any estimate did not converge, else pass/fail."""
    if any(r.get("converged") is False for r in results):
        return "inconclusive"
    return "pass" if all(r["pass"] for r in results) else "fail"


@dataclass
class ExperimentReport:
    experiment_id: str
    seed: int
    inputs: dict
    results: list
    verdict: str = ""
    wall_time: float = 0.0
    summary: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.verdict:
            self.verdict = verdict_of(self.results)

    def to_dict(self, include_wall_time=True):
        out = {
            "experiment_id": self.experiment_id,
            "seed": self.seed,
            "inputs": self.inputs,
            "summary": self.summary,
            "results": self.results,
            "verdict": self.verdict,
        }
        if include_wall_time:
            out["wall_time"] = self.wall_time
        return out

    def to_json(self, include_wall_time=True):
        return json.dumps(self.to_dict(include_wall_time), indent=2, sort_keys=True) + "\n"

    def write(self, path, include_wall_time=True):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_json(include_wall_time))

    @property
    def exit_code(self):
        return {"pass": 0, "fail": 1, "inconclusive": 2}[self.verdict]


def depierro_sets():
    """Projectors onto ``R x {0}``, ``R x {1}`` and ``{y >= 1/x > 0}``."""
    p1 = ProjHyperplane([0.0, 1.0], 0.0, label="P1")
    p2 = ProjHyperplane([0.0, 1.0], 1.0, label="P2")
    p3 = ProjHyperbolaEpi(label="P3")
    return p1, p2, p3


def _record(name, passed, **values):
    rec = {"name": name, "pass": bool(passed)}
    rec.update(values)
    return rec


def _demo_translations():
    cfg = EstimatorConfig()
    same = check_composition_bound([Translation([1.0]), Translation([2.0])], cfg)
    opposite = check_composition_bound([Translation([1.0]), Translation([-2.0])], cfg)
    results = [
        _record("same_sign_equality",
                abs(same["lhs"] - same["rhs"]) <= 1e-12 and abs(same["lhs"] - 3.0) <= 1e-12,
                lhs=same["lhs"], rhs=same["rhs"], a=[1.0, 2.0], converged=same["converged"]),
        _record("opposite_sign_strict",
                opposite["rhs"] - opposite["lhs"] >= 1.0 and abs(opposite["lhs"] - 1.0) <= 1e-12,
                lhs=opposite["lhs"], rhs=opposite["rhs"], a=[1.0, -2.0],
                converged=opposite["converged"]),
    ]
    return {"a_same": [1.0, 2.0], "a_opposite": [1.0, -2.0]}, results


def _demo_convex_combo():
    cfg = EstimatorConfig()
    t1, t2 = Translation([1.0], label="T1"), AffineScale(0.5, [0.0], label="T2")
    strict = check_convex_combo_bound([0.5, 0.5], [t1, t2], cfg)
    a = np.array([0.6, -0.8])
    equal = check_convex_combo_bound([0.3, 0.7], [Translation(a), Translation(a)], cfg)
    results = [
        _record("strict_gap", strict["lhs"] <= 1e-6 and abs(strict["rhs"] - 0.5) <= 1e-12,
                lhs=strict["lhs"], rhs=strict["rhs"], converged=strict["converged"]),
        _record("identical_translations_equality",
                abs(equal["lhs"] - 1.0) <= 1e-12 and abs(equal["rhs"] - 1.0) <= 1e-12,
                lhs=equal["lhs"], rhs=equal["rhs"], converged=equal["converged"]),
    ]
    inputs = {"strict": {"weights": [0.5, 0.5], "operators": [dsl.dump_operator(t1), dsl.dump_operator(t2)]},
              "equality": {"weights": [0.3, 0.7], "a": a.tolist()}}
    return inputs, results


def _demo_depierro_cyclic():
    p1, p2, p3 = depierro_sets()
    op = compose([p1, p2, p3])
    cfg = EstimatorConfig(max_iter=DEPIERRO_BUDGET, x0=DEPIERRO_X0)
    est = estimate_displacement(op, cfg)
    x, y = est.final_iterate
    diag = diagnose_attainment(op, np.zeros(2), cfg)
    results = [
        _record("residual", est.upper_bound <= 1e-6, residual=est.upper_bound,
                iterations=est.iterations, converged=est.converged),
        _record("limit_on_line_y_eq_1", abs(y - 1.0) <= 1e-4 and x >= 1.0 - 1e-4,
                final_iterate=[x, y]),
        _record("orbit_bounded", diag["iterates_bounded"] and diag["fixed_point_residual"] <= 1e-6,
                orbit_radius=diag["orbit_radius"],
                fixed_point_residual=diag["fixed_point_residual"]),
    ]
    return {"operator": dsl.dump_operator(op), "x0": list(DEPIERRO_X0),
            "budget": DEPIERRO_BUDGET}, results


def _demo_depierro_noncyclic():
    p1, p2, p3 = depierro_sets()
    op = compose([p2, p1, p3])
    x = np.array(DEPIERRO_X0)
    xs = np.empty(DEPIERRO_BUDGET)
    residual = math.inf
    for n in range(DEPIERRO_BUDGET):
        y = op._eval(x)
        residual = float(np.linalg.norm(x - y))
        x = y
        xs[n] = x[0]
    burn_in = 10
    drift = bool(np.all(np.diff(xs[burn_in:]) > 0.0))
    results = [
        _record("residual", residual <= 1e-3, residual=residual, iterations=DEPIERRO_BUDGET),
        _record("first_coordinate_reaches_100", x[0] >= 100.0, final_iterate=x.tolist()),
        _record("monotone_drift_after_burn_in", drift, burn_in=burn_in),
    ]
    return {"operator": dsl.dump_operator(op), "x0": list(DEPIERRO_X0),
            "budget": DEPIERRO_BUDGET}, results


def _demo_witness():
    results = []
    translations = [Translation([1.0]), Translation([2.0])]
    p1, p2, p3 = depierro_sets()
    for name, ops in (("translations", translations), ("depierro", [p1, p2, p3])):
        v_list = [exact_displacement(op) for op in ops]
        _, cert = synthesize_near_fixed_point(ops, v_list, WITNESS_EPSILON, WITNESS_BUDGET)
        results.append(_record(name, cert.pass_ and cert.telescoping_holds, **cert.to_dict()))
    return {"epsilon": WITNESS_EPSILON, "budget": WITNESS_BUDGET}, results


DEMOS = {
    "translations": _demo_translations,
    "convex-combo": _demo_convex_combo,
    "depierro-cyclic": _demo_depierro_cyclic,
    "depierro-noncyclic": _demo_depierro_noncyclic,
    "witness": _demo_witness,
}


def run_demo(name):
    """Run one of :data:`DEMOS` with its built-in parameters."""
    if name not in DEMOS:
        raise ValueError(f"unknown demo {name!r}; choose from {sorted(DEMOS)}")
    start = time.perf_counter()
    inputs, results = DEMOS[name]()
    return ExperimentReport(experiment_id=f"demo:{name}", seed=DEMO_SEED, inputs=inputs,
                            results=results, wall_time=time.perf_counter() - start)


def _run_trial(args):
    seed, trial, dims, m_values, cfg, tol = args
    rng = trial_rng(seed, trial)
    dim, ops = random_tuple(rng, dims, m_values)
    weights = random_weights(rng, len(ops))
    comp = check_composition_bound(ops, cfg, tol)
    combo = check_convex_combo_bound(weights, ops, cfg, tol)
    cyc = compare_cyclic_rotations(ops, cfg)
    cyc_converged = all(cyc["converged"])
    return {
        "trial": trial,
        "dim": dim,
        "m": len(ops),
        "operators": [dsl.dump_operator(op) for op in ops],
        "weights": weights.tolist(),
        "composition": {k: comp[k] for k in ("lhs", "rhs", "slack", "pass", "converged",
                                             "iterations")},
        "convex_combo": {k: combo[k] for k in ("lhs", "rhs", "slack", "pass", "converged",
                                               "iterations")},
        "cyclic": {"max_pairwise_gap": cyc["max_pairwise_gap"], "converged": cyc_converged,
                   "pass": bool(cyc_converged and cyc["max_pairwise_gap"] <= tol),
                   "iterations": cyc["iterations"]},
    }


def run_random_suite(trials, seed, dims=(1, 2, 5), m_values=(2, 3, 4), config=None,
                     tol=BOUND_TOL, workers=1):
    """Composition, convex-combination and cyclic checks on seeded random tuples.

    Trial ``k`` draws from its own generator seeded by ``(seed, k)``, so the
    report does not depend on ``workers`` or scheduling order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    cfg = config or EstimatorConfig()
    dims, m_values = tuple(int(d) for d in dims), tuple(int(m) for m in m_values)
    jobs = [(seed, k, dims, m_values, cfg, tol) for k in range(trials)]
    start = time.perf_counter()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            trials_out = list(pool.map(_run_trial, jobs))
    else:
        trials_out = [_run_trial(j) for j in jobs]
    trials_out.sort(key=lambda t: t["trial"])

    comp_pass = sum(t["composition"]["pass"] for t in trials_out)
    combo_pass = sum(t["convex_combo"]["pass"] for t in trials_out)
    cyc_conv = [t for t in trials_out if t["cyclic"]["converged"]]
    cyc_pass = sum(t["cyclic"]["pass"] for t in cyc_conv)
    converged = all(t["composition"]["converged"] and t["convex_combo"]["converged"]
                    for t in trials_out) and len(cyc_conv) == trials
    results = [
        _record("composition_bound", comp_pass == trials, passes=comp_pass, trials=trials),
        _record("convex_combo_bound", combo_pass == trials, passes=combo_pass, trials=trials),
        _record("cyclic_invariance", cyc_pass == len(cyc_conv), passes=cyc_pass,
                converged_tuples=len(cyc_conv), trials=trials),
    ]
    if not converged:
        results.append(_record("all_estimates_converged", False, converged=False))
    report = ExperimentReport(
        experiment_id="suite",
        seed=seed,
        inputs={"trials": trials, "dims": list(dims), "m_values": list(m_values),
                "tol": tol, "estimator": cfg.to_dict()},
        results=results + [{"name": f"trial_{t['trial']}", "pass": bool(
            t["composition"]["pass"] and t["convex_combo"]["pass"]
            and (t["cyclic"]["pass"] or not t["cyclic"]["converged"])), **t}
            for t in trials_out],
        wall_time=time.perf_counter() - start,
    )
    report.summary = {"composition_passes": comp_pass, "convex_combo_passes": combo_pass,
                      "cyclic_passes": cyc_pass, "cyclic_converged": len(cyc_conv)}
    return report
