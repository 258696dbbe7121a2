"""Minimal displacement vectors: estimation, closed forms and bound checks.

For an averaged operator ``T`` the successive differences ``x_n - T x_n`` of
the Picard iteration converge in norm to ``v_T``, the least-norm element of
the closure of ``ran(Id - T)``, and their norms decrease monotonically to
``|v_T|``.  Every difference is an element of ``ran(Id - T)``, so its norm is
a certified upper bound on ``|v_T|`` at every step.
"""

import csv
import itertools
import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteIterateError
from .monotone import ConstantMap, NormalConeBox, PsdLinear, Resolvent, Shifted, SubdiffAbs
from .operators import (AffineScale, Averaged, Compose, ConvexCombo, Operator,
                        ProjBall, ProjBox, ProjHalfspace, ProjHyperbolaEpi,
                        ProjHyperplane, Translation, as_vector, compose,
                        convex_combination)

__all__ = [
    "EstimatorConfig", "DisplacementEstimate", "estimate_displacement",
    "exact_displacement", "check_composition_bound", "check_convex_combo_bound",
    "compare_cyclic_rotations", "cyclic_rotations", "diagnose_attainment",
    "BOUND_TOL", "ORBIT_RADIUS",
]

BOUND_TOL = 5e-3
ORBIT_RADIUS = 1e6


@dataclass(frozen=True)
class EstimatorConfig:
    """Picard-iteration budget and stopping rule.

    The run stops once the difference vector has moved by at most
    ``tol_residual_change`` over the last ``window`` steps.
    """

    max_iter: int = 200_000
    tol_residual_change: float = 1e-9
    window: int = 100
    record_every: int = 1
    x0: object = None

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not self.tol_residual_change > 0:
            raise ValueError("tol_residual_change must be positive")
        if self.window < 1 or self.record_every < 1:
            raise ValueError("window and record_every must be >= 1")

    def start(self, dim):
        if self.x0 is None:
            return np.zeros(dim)
        return as_vector(self.x0, dim=dim, name="x0")

    def to_dict(self):
        return {
            "max_iter": self.max_iter,
            "tol_residual_change": self.tol_residual_change,
            "window": self.window,
            "record_every": self.record_every,
            "x0": None if self.x0 is None else [float(t) for t in np.ravel(self.x0)],
        }


@dataclass
class DisplacementEstimate:
    v_hat: np.ndarray
    upper_bound: float
    residual_history: list
    iterations: int
    converged: bool
    final_iterate: np.ndarray
    wrapped: bool = False
    history_steps: list = field(default_factory=list, repr=False)

    @property
    def norm(self):
        return float(np.linalg.norm(self.v_hat))

    def to_dict(self, include_history=False):
        out = {
            "v_hat": self.v_hat.tolist(),
            "norm": self.norm,
            "upper_bound": self.upper_bound,
            "iterations": self.iterations,
            "converged": self.converged,
            "final_iterate": self.final_iterate.tolist(),
            "wrapped": self.wrapped,
        }
        if include_history:
            out["residual_history"] = list(self.residual_history)
        return out


class _Halved(Operator):
    """``(Id + T)/2`` for operators without an averagedness certificate."""

    __slots__ = ("inner",)
    kind = "halved"

    def __init__(self, inner):
        super().__init__(inner.dim)
        object.__setattr__(self, "inner", inner)

    def _eval(self, x):
        return 0.5 * (x + self.inner._eval(x))


def estimate_displacement(op, config=None, csv_path=None):
    """Estimate ``v_T`` by Picard iteration from ``config.x0``.

    Operators without an averagedness certificate are iterated as
    ``(Id + T)/2``, whose displacement vector is exactly ``v_T / 2``; the
    reported quantities are rescaled by 2.

    If ``csv_path`` is given, recorded steps are streamed there with columns
    ``n, residual, x_1, ..., x_d``.

    Raises
    ------
    NonFiniteIterateError
        An iterate overflowed; the exception carries the last finite iterate.
    """
    cfg = config or EstimatorConfig()
    wrapped = op.averaged_constant is None or op.averaged_constant >= 1.0
    T = _Halved(op) if wrapped else op
    scale = 2.0 if wrapped else 1.0
    x = cfg.start(op.dim)
    window = deque(maxlen=cfg.window)
    history, steps = [], []
    tol2 = cfg.tol_residual_change ** 2
    converged = False

    sink = open(csv_path, "w", newline="") if csv_path is not None else None
    try:
        writer = None
        if sink is not None:
            writer = csv.writer(sink, lineterminator="\n")
            writer.writerow(["n", "residual"] + [f"x{i + 1}" for i in range(op.dim)])
        with np.errstate(over="ignore", invalid="ignore"):
            for n in range(cfg.max_iter):
                y = T._eval(x)
                d = x - y
                r = math.sqrt(d @ d)
                if not math.isfinite(r):
                    raise NonFiniteIterateError(
                        f"non-finite iterate at step {n + 1}", last_iterate=x, iteration=n)
                if n % cfg.record_every == 0:
                    history.append(scale * r)
                    steps.append(n)
                    if writer is not None:
                        writer.writerow([n, repr(scale * r)] + [repr(float(t)) for t in x])
                if len(window) == cfg.window:
                    e = d - window[0]
                    if e @ e <= tol2:
                        converged = True
                        break
                window.append(d)
                x = y
    finally:
        if sink is not None:
            sink.close()

    return DisplacementEstimate(
        v_hat=scale * d,
        upper_bound=scale * r,
        residual_history=history,
        iterations=n + 1,
        converged=converged,
        final_iterate=x,
        wrapped=wrapped,
        history_steps=steps,
    )


def _translation_vector(op):
    if isinstance(op, Translation):
        return op.a
    if isinstance(op, AffineScale) and op.beta == 1.0:
        return op.a
    if isinstance(op, Resolvent):
        spec = op.spec
        if isinstance(spec, ConstantMap):
            return spec.c
        if isinstance(spec, Shifted) and isinstance(spec.inner, ConstantMap):
            return spec.inner.c - spec.v
    return None


_HAS_FIXED_POINT = (ProjHyperplane, ProjHalfspace, ProjBox, ProjBall, ProjHyperbolaEpi)
_RESOLVENT_FIXING_ZERO = (PsdLinear, SubdiffAbs, NormalConeBox)


def exact_displacement(op):
    """Closed-form ``v_T`` where one is derivable structurally, else ``None``.

    Rules, in order: translations give their offset; projectors onto nonempty
    sets and resolvents of operators with a zero give 0; strict contractions
    (structural Lipschitz bound < 1) give 0; compositions and convex
    combinations of translations give the summed / averaged offset;
    ``(1 - a) Id + a T`` gives ``a v_T``; compositions and convex
    combinations whose children all have ``v = 0`` give 0.
    """
    a = _translation_vector(op)
    if a is not None:
        return np.array(a, dtype=float)
    zero = np.zeros(op.dim)
    if isinstance(op, _HAS_FIXED_POINT):
        return zero
    if isinstance(op, Resolvent) and isinstance(op.spec, _RESOLVENT_FIXING_ZERO):
        return zero
    if op.lipschitz_bound < 1.0:
        return zero
    if isinstance(op, Averaged):
        inner = exact_displacement(op.inner)
        return None if inner is None else op.alpha * inner
    if isinstance(op, (Compose, ConvexCombo)):
        shifts = [_translation_vector(c) for c in op.children]
        if all(s is not None for s in shifts):
            if isinstance(op, Compose):
                return np.sum(shifts, axis=0)
            return np.einsum("i,ij->j", op.weights, np.array(shifts))
        parts = [exact_displacement(c) for c in op.children]
        if all(p is not None and not np.any(p) for p in parts):
            return zero
    return None


def _leaf_displacements(ops, cfg):
    vs, sources, estimates = [], [], []
    for op in ops:
        exact = exact_displacement(op)
        if exact is not None:
            vs.append(exact)
            sources.append("exact")
            estimates.append(None)
        else:
            est = estimate_displacement(op, cfg)
            vs.append(est.v_hat)
            sources.append("estimate")
            estimates.append(est)
    return vs, sources, estimates


def check_composition_bound(ops, config=None, tol=BOUND_TOL):
    """Compare ``|v_{T_m...T_1}|`` with ``sum_i |v_{T_i}|``.

    ``lhs`` is always the estimated norm for the composition; the summands use
    closed forms when :func:`exact_displacement` knows them.
    """
    ops = list(ops)
    if len(ops) < 2:
        raise ValueError("need at least 2 operators")
    cfg = config or EstimatorConfig()
    est = estimate_displacement(compose(ops), cfg)
    vs, sources, leaf_est = _leaf_displacements(ops, cfg)
    lhs = est.norm
    rhs = float(sum(np.linalg.norm(v) for v in vs))
    converged = est.converged and all(e.converged for e in leaf_est if e is not None)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "slack": rhs - lhs,
        "pass": bool(lhs <= rhs + tol),
        "tol": tol,
        "upper_bound": est.upper_bound,
        "v_composition": est.v_hat.tolist(),
        "v_operators": [np.asarray(v).tolist() for v in vs],
        "sources": sources,
        "iterations": est.iterations,
        "converged": converged,
    }


def check_convex_combo_bound(weights, ops, config=None, tol=BOUND_TOL):
    """Compare ``|v_{sum l_i T_i}|`` with ``|sum_i l_i v_{T_i}|``.

    The right-hand side is the norm of the weighted vector sum, which can be
    much smaller than the weighted sum of norms.
    """
    ops = list(ops)
    cfg = config or EstimatorConfig()
    combo = convex_combination(weights, ops)
    est = estimate_displacement(combo, cfg)
    vs, sources, leaf_est = _leaf_displacements(ops, cfg)
    weighted = np.einsum("i,ij->j", combo.weights, np.array(vs))
    lhs = est.norm
    rhs = float(np.linalg.norm(weighted))
    converged = est.converged and all(e.converged for e in leaf_est if e is not None)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "slack": rhs - lhs,
        "pass": bool(lhs <= rhs + tol),
        "tol": tol,
        "upper_bound": est.upper_bound,
        "v_combination": est.v_hat.tolist(),
        "weighted_sum": weighted.tolist(),
        "sources": sources,
        "iterations": est.iterations,
        "converged": converged,
    }


def cyclic_rotations(ops):
    """The ``m`` cyclic rotations of an application-ordered operator list.

    Rotation ``r`` applies ``ops[r]`` first, e.g. for ``[T1, T2, T3]`` the
    second rotation is the composition ``T1 T3 T2``.
    """
    ops = list(ops)
    return [ops[r:] + ops[:r] for r in range(len(ops))]


def compare_cyclic_rotations(ops, config=None):
    """Estimate ``v`` for every cyclic rotation and report the largest gap."""
    ops = list(ops)
    if len(ops) < 2:
        raise ValueError("need at least 2 operators")
    cfg = config or EstimatorConfig()
    estimates = [estimate_displacement(compose(rot), cfg) for rot in cyclic_rotations(ops)]
    gap = max(float(np.linalg.norm(a.v_hat - b.v_hat))
              for a, b in itertools.combinations(estimates, 2))
    return {
        "estimates": [e.v_hat.tolist() for e in estimates],
        "norms": [e.norm for e in estimates],
        "converged": [e.converged for e in estimates],
        "iterations": [e.iterations for e in estimates],
        "max_pairwise_gap": gap,
    }


def diagnose_attainment(op, v_hat, config=None, radius=ORBIT_RADIUS):
    """Iterate ``x -> v_hat + T x`` and report whether the orbit stays bounded.

    A fixed point of this map is exactly a point ``y`` with
    ``y - T y = v_hat``.  A bounded orbit with small residual is evidence that
    ``v_hat`` is attained in ``ran(Id - T)``; an escaping orbit is evidence
    against.  Neither outcome is a proof.
    """
    cfg = config or EstimatorConfig()
    v = as_vector(v_hat, dim=op.dim, name="v_hat")
    x = cfg.start(op.dim)
    bounded = True
    max_norm = float(np.linalg.norm(x))
    residual = math.inf
    steps = 0
    with np.errstate(over="ignore", invalid="ignore"):
        for steps in range(1, cfg.max_iter + 1):
            y = v + op._eval(x)
            d = x - y
            residual = math.sqrt(d @ d)
            norm_y = math.sqrt(y @ y)
            if not (math.isfinite(norm_y) and norm_y <= radius):
                bounded = False
                max_norm = max(max_norm, norm_y) if math.isfinite(norm_y) else math.inf
                break
            max_norm = max(max_norm, norm_y)
            x = y
            if residual == 0.0:
                break
    return {
        "iterates_bounded": bounded,
        "orbit_radius": max_norm,
        "fixed_point_residual": residual,
        "final_iterate": x.tolist(),
        "steps": steps,
    }
