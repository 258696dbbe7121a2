"""Product-space construction for near-fixed points of a composition.

A tuple ``x = (x_1, ..., x_m)`` of points of R^d is stored as an ``(m, d)``
array.  With the block map ``T(x) = (T_1 x_1, ..., T_m x_m)``, the cyclic
right shift ``R(x) = (x_m, x_1, ..., x_{m-1})`` and displacement vectors
``v = (v_1, ..., v_m)``, the map

    S(x) = v + T(R x),   i.e.   (S x)_i = v_i + T_i x_{i-1},  x_0 := x_m,

is nonexpansive, and ``inf |x - S x| = 0``.  Any tuple with small
``c = x - S x`` yields the point ``x_m`` whose composite residual
``|x_m - T_m ... T_1 x_m|`` telescopes into ``sum_i |c_i + v_i|``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, NonFiniteIterateError

__all__ = [
    "as_product_point", "cyclic_shift", "block_apply", "WitnessCertificate",
    "verify_telescoping", "synthesize_near_fixed_point", "shifted_block_map",
    "product_norm", "TELESCOPE_TOL", "PASS_TOL",
]

TELESCOPE_TOL = 1e-10
PASS_TOL = 1e-9


def as_product_point(x, m=None, d=None):
    """Validate a tuple of ``m >= 2`` vectors in R^d as an ``(m, d)`` float array."""
    arr = np.array(x, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 2 or arr.shape[1] < 1:
        raise DimensionError(f"product point must have shape (m>=2, d>=1), got {arr.shape}")
    if m is not None and arr.shape[0] != m:
        raise DimensionError(f"expected {m} parts, got {arr.shape[0]}")
    if d is not None and arr.shape[1] != d:
        raise DimensionError(f"expected parts in R^{d}, got R^{arr.shape[1]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("product point has non-finite coordinates")
    return arr


def product_norm(x):
    return float(np.linalg.norm(x))


def cyclic_shift(x):
    """``(x_1, ..., x_m) -> (x_m, x_1, ..., x_{m-1})``."""
    return np.roll(as_product_point(x), 1, axis=0)


def _check_ops(ops, x):
    ops = list(ops)
    if len(ops) != x.shape[0]:
        raise DimensionError(f"{len(ops)} operators for a tuple of {x.shape[0]} parts")
    for op in ops:
        if op.dim != x.shape[1]:
            raise DimensionError(f"operator on R^{op.dim} applied to parts in R^{x.shape[1]}")
    return ops


def block_apply(ops, x):
    """``(T_1 x_1, ..., T_m x_m)``."""
    x = as_product_point(x)
    ops = _check_ops(ops, x)
    return np.array([op._eval(xi) for op, xi in zip(ops, x)])


def shifted_block_map(ops, v_list):
    """The map ``x -> v + T(R x)`` as a callable on ``(m, d)`` arrays."""
    ops = list(ops)
    v = np.array(v_list, dtype=float)

    def S(x):
        shifted = np.roll(x, 1, axis=0)
        return v + np.array([op._eval(xi) for op, xi in zip(ops, shifted)])

    return S


@dataclass
class WitnessCertificate:
    """Telescoping certificate for the extracted point ``x0 = x_m``.

    ``composite_residual`` is ``|x0 - T_m...T_1 x0|`` and ``stage_residuals[i]``
    is ``|T_i x_{i-1} - x_i|``; the triangle inequality plus nonexpansiveness
    give ``composite_residual <= sum(stage_residuals)``.
    """

    x0: np.ndarray
    composite_residual: float
    stage_residuals: list
    bound_rhs: float
    pass_: bool
    product_residual: float = math.nan
    iterations: int = 0
    epsilon: float = math.nan

    @property
    def telescoping_holds(self):
        return self.composite_residual <= sum(self.stage_residuals) + TELESCOPE_TOL

    def to_dict(self):
        return {
            "x0": self.x0.tolist(),
            "composite_residual": self.composite_residual,
            "stage_residuals": list(self.stage_residuals),
            "bound_rhs": self.bound_rhs,
            "pass": self.pass_,
            "telescoping_holds": self.telescoping_holds,
            "product_residual": self.product_residual,
            "iterations": self.iterations,
            "epsilon": self.epsilon,
        }


def _measure(ops, x):
    x0 = x[-1]
    stage = []
    prev = x0
    for op, xi in zip(ops, x):
        stage.append(float(np.linalg.norm(op._eval(prev) - xi)))
        prev = xi
    z = x0
    for op in ops:
        z = op._eval(z)
    return x0.copy(), float(np.linalg.norm(x0 - z)), stage


def verify_telescoping(ops, x, v_list=None, epsilon=0.0):
    """Measure the composite and per-stage residuals of a tuple.

    With ``v_list`` the certificate passes when the composite residual is at
    most ``epsilon + sum |v_i|``; without it, the bound is the telescoping sum
    itself.
    """
    x = as_product_point(x)
    ops = _check_ops(ops, x)
    x0, composite, stage = _measure(ops, x)
    if v_list is None:
        bound = float(sum(stage))
        passed = composite <= bound + TELESCOPE_TOL
    else:
        bound = float(epsilon) + float(sum(np.linalg.norm(v) for v in v_list))
        passed = composite <= bound + PASS_TOL
    return WitnessCertificate(x0=x0, composite_residual=composite, stage_residuals=stage,
                              bound_rhs=bound, pass_=bool(passed), epsilon=float(epsilon))


def synthesize_near_fixed_point(ops, v_list, epsilon, budget=100_000, start=None):
    """Find a tuple with ``|x - S x| <= epsilon / sqrt(m)`` and certify its last part.

    Iterates ``x <- (x + S x) / 2`` from the zero tuple (or ``start``).  On
    budget exhaustion the certificate is still evaluated honestly at the final
    tuple.

    Returns
    -------
    (ndarray, WitnessCertificate)
    """
    ops = list(ops)
    m = len(ops)
    if m < 2:
        raise ValueError("need at least 2 operators")
    epsilon = float(epsilon)
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    d = ops[0].dim
    v = np.array(v_list, dtype=float).reshape(m, -1)
    if v.shape[1] != d:
        raise DimensionError("displacement vectors do not match operator dimension")
    x = np.zeros((m, d)) if start is None else as_product_point(start, m, d)
    _check_ops(ops, x)
    S = shifted_block_map(ops, v)
    target = epsilon / math.sqrt(m)

    residual = math.inf
    it = 0
    for it in range(budget + 1):
        sx = S(x)
        residual = product_norm(x - sx)
        if not math.isfinite(residual):
            raise NonFiniteIterateError("non-finite tuple during synthesis",
                                        last_iterate=x, iteration=it)
        if residual <= target or it == budget:
            break
        x = 0.5 * (x + sx)

    cert = verify_telescoping(ops, x, v_list=v, epsilon=epsilon)
    cert.product_residual = residual
    cert.iterations = it
    return x, cert
