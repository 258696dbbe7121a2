"""Projection onto the epigraph region ``{(x, y) : y >= 1/x > 0}``.

A point ``p = (a, b)`` outside the set is projected onto the boundary curve
``(t, 1/t)``.  Stationarity of ``(t - a)**2 + (1/t - b)**2`` gives the quartic

    q(t) = t**4 - a t**3 + b t - 1 = 0.

Because the set is closed under moving up and to the right, an exterior point
can only lie on the *outward* normal line of a boundary point, so ``q`` has
exactly one positive root when ``p`` is exterior.  ``q(0) = -1 < 0`` and
``q(t) -> +inf``, which gives a sign-change bracket.
"""

import math

import numpy as np

from .errors import DimensionError, NumericalFailure

__all__ = ["in_hyperbola_epigraph", "hyperbola_stationarity", "safeguarded_root",
           "project_hyperbola_epigraph"]

_TINY = 1e-308


def in_hyperbola_epigraph(a, b):
    """Exact membership test in double arithmetic."""
    return a > _TINY and b >= 1.0 / a


def hyperbola_stationarity(t, a, b):
    """Return ``q(t)`` and ``q'(t)`` for the point ``(a, b)``."""
    t2 = t * t
    value = ((t - a) * t2 + b) * t - 1.0
    slope = (4.0 * t - 3.0 * a) * t2 + b
    return value, slope


def safeguarded_root(func, lo, hi, rtol=4 * np.finfo(float).eps, ftol=1e-12,
                     maxiter=200):
    """Root of ``func`` in ``[lo, hi]`` by Newton steps guarded with bisection.

    ``func`` returns ``(value, derivative)``; ``func(lo)`` must be negative and
    ``func(hi)`` positive.  A Newton step that leaves the current bracket or
    fails to halve it is replaced by a bisection step.
    """
    flo, _ = func(lo)
    fhi, _ = func(hi)
    if not (flo < 0.0 < fhi):
        raise NumericalFailure(f"no sign change on [{lo}, {hi}]")
    t = 0.5 * (lo + hi)
    step_old = hi - lo
    for _ in range(maxiter):
        f, df = func(t)
        if f == 0.0 or abs(f) <= ftol:
            return t
        if f < 0.0:
            lo = t
        else:
            hi = t
        if hi - lo <= rtol * max(abs(t), 1.0):
            return t
        newton_ok = df > 0.0
        if newton_ok:
            trial = t - f / df
            newton_ok = lo < trial < hi and abs(trial - t) < 0.5 * step_old
        if newton_ok:
            step_old = abs(trial - t)
            t = trial
        else:
            step_old = hi - lo
            t = 0.5 * (lo + hi)
    raise NumericalFailure("safeguarded root iteration did not terminate")


def _bracket(a, b):
    hi = max(1.0, abs(a), abs(b))
    while hyperbola_stationarity(hi, a, b)[0] <= 0.0:
        hi *= 2.0
        if not math.isfinite(hi):
            raise NumericalFailure("failed to bracket the stationarity root")
    return 0.0, hi


def project_hyperbola_epigraph(p):
    """Euclidean projection of a 2-vector onto ``{(x, y) : y >= 1/x > 0}``.

    Examples
    --------
    >>> project_hyperbola_epigraph([0.0, 0.0])
    array([1., 1.])
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (2,):
        raise DimensionError(f"hyperbola projection needs a 2-vector, got shape {p.shape}")
    a, b = float(p[0]), float(p[1])
    if in_hyperbola_epigraph(a, b):
        return p.copy()
    lo, hi = _bracket(a, b)
    t = safeguarded_root(lambda s: hyperbola_stationarity(s, a, b), lo, hi)
    return np.array([t, 1.0 / t])
