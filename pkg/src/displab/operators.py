"""Firmly nonexpansive operators on R^d and the combinators that build on them.

Every operator is an immutable expression node.  Leaves (translations,
affine contractions, projectors, resolvents) are firmly nonexpansive by
construction; :class:`Compose`, :class:`ConvexCombo` and :class:`Averaged`
track an averagedness constant structurally so downstream code knows which
guarantees hold without sampling.

Composition order follows application order: ``compose([T1, T2, T3])`` is
``x -> T3(T2(T1(x)))``.
"""

import math

import numpy as np

from .errors import DimensionError, InvalidOperatorError
from .hyperbola import project_hyperbola_epigraph

__all__ = [
    "as_vector", "Operator", "Translation", "AffineScale", "ProjHyperplane",
    "ProjHalfspace", "ProjBox", "ProjBall", "ProjHyperbolaEpi", "Compose",
    "ConvexCombo", "Averaged", "apply", "compose", "convex_combination",
    "averaged", "identity", "projector_leaves", "check_firm_nonexpansive",
    "check_averaged", "CheckReport", "WEIGHT_SUM_TOL", "CHECK_TOL",
]

WEIGHT_SUM_TOL = 1e-12
CHECK_TOL = 1e-10


def as_vector(x, dim=None, name="x"):
    """Return ``x`` as a fresh, finite, 1-D float array.

    Raises :class:`DimensionError` when ``dim`` is given and does not match.
    """
    v = np.array(x, dtype=float).reshape(-1) if np.ndim(x) == 0 else np.array(x, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DimensionError(f"{name} must be a non-empty 1-D vector, got shape {v.shape}")
    if dim is not None and v.size != dim:
        raise DimensionError(f"{name} has dimension {v.size}, expected {dim}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite coordinates")
    return v


def _frozen(v):
    v.flags.writeable = False
    return v


class Operator:
    """Base class of operator expression nodes.

    Subclasses implement ``_eval`` (no validation) and report ``dim``,
    ``averaged_constant`` and ``lipschitz_bound``.  Instances are immutable.
    """

    __slots__ = ("dim", "label")
    kind = "operator"

    def __init__(self, dim, label=None):
        object.__setattr__(self, "dim", int(dim))
        object.__setattr__(self, "label", label)

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def __call__(self, x):
        return apply(self, x)

    def _eval(self, x):
        raise NotImplementedError

    @property
    def children(self):
        return ()

    @property
    def averaged_constant(self):
        """Smallest structurally certified ``alpha`` with ``T`` alpha-averaged.

        ``None`` means no averagedness guarantee is known.
        """
        return 0.5

    @property
    def is_firmly_nonexpansive(self):
        alpha = self.averaged_constant
        return alpha is not None and alpha <= 0.5

    @property
    def lipschitz_bound(self):
        return 1.0

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class Translation(Operator):
    """``x -> x - a``.  Its displacement range is the single vector ``a``."""

    __slots__ = ("a",)
    kind = "translation"

    def __init__(self, a, label=None):
        a = _frozen(as_vector(a, name="a"))
        super().__init__(a.size, label)
        object.__setattr__(self, "a", a)

    def _eval(self, x):
        return x - self.a

    def __repr__(self):
        return f"Translation(a={self.a.tolist()})"


class AffineScale(Operator):
    """``x -> beta * x - a`` with ``beta`` in ``[0, 1]``."""

    __slots__ = ("beta", "a")
    kind = "affine_scale"

    def __init__(self, beta, a, label=None):
        beta = float(beta)
        if not 0.0 <= beta <= 1.0:
            raise InvalidOperatorError(f"AffineScale needs beta in [0, 1], got {beta}")
        a = _frozen(as_vector(a, name="a"))
        super().__init__(a.size, label)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "a", a)

    def _eval(self, x):
        return self.beta * x - self.a

    @property
    def averaged_constant(self):
        if not 0.0 <= self.beta <= 1.0:
            return None
        return 0.5

    @property
    def lipschitz_bound(self):
        return abs(self.beta)

    def __repr__(self):
        return f"AffineScale(beta={self.beta}, a={self.a.tolist()})"


def _normal(normal):
    n = _frozen(as_vector(normal, name="normal"))
    nn = float(n @ n)
    if nn == 0.0:
        raise InvalidOperatorError("hyperplane/halfspace normal must be nonzero")
    return n, nn


class ProjHyperplane(Operator):
    """Projector onto ``{x : <normal, x> = offset}``."""

    __slots__ = ("normal", "offset", "_nn")
    kind = "proj_hyperplane"

    def __init__(self, normal, offset, label=None):
        n, nn = _normal(normal)
        super().__init__(n.size, label)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(offset))
        object.__setattr__(self, "_nn", nn)

    def _eval(self, x):
        return x - ((self.normal @ x - self.offset) / self._nn) * self.normal

    def contains(self, x, tol=1e-12):
        return abs(self.normal @ x - self.offset) <= tol * math.sqrt(self._nn)


class ProjHalfspace(Operator):
    """Projector onto ``{x : <normal, x> <= offset}``."""

    __slots__ = ("normal", "offset", "_nn")
    kind = "proj_halfspace"

    def __init__(self, normal, offset, label=None):
        n, nn = _normal(normal)
        super().__init__(n.size, label)
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(offset))
        object.__setattr__(self, "_nn", nn)

    def _eval(self, x):
        excess = self.normal @ x - self.offset
        if excess <= 0.0:
            return x.copy()
        return x - (excess / self._nn) * self.normal

    def contains(self, x, tol=0.0):
        return self.normal @ x - self.offset <= tol


class ProjBox(Operator):
    """Componentwise clamp onto ``[lo, hi]``."""

    __slots__ = ("lo", "hi")
    kind = "proj_box"

    def __init__(self, lo, hi, label=None):
        lo = _frozen(as_vector(lo, name="lo"))
        hi = _frozen(as_vector(hi, dim=lo.size, name="hi"))
        if np.any(lo > hi):
            raise InvalidOperatorError("box needs lo <= hi componentwise")
        super().__init__(lo.size, label)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def _eval(self, x):
        return np.minimum(np.maximum(x, self.lo), self.hi)

    def contains(self, x, tol=0.0):
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))


class ProjBall(Operator):
    """Projector onto the closed ball ``B(center, radius)``."""

    __slots__ = ("center", "radius")
    kind = "proj_ball"

    def __init__(self, center, radius, label=None):
        center = _frozen(as_vector(center, name="center"))
        radius = float(radius)
        if not (radius > 0.0 and math.isfinite(radius)):
            raise InvalidOperatorError(f"ball radius must be positive, got {radius}")
        super().__init__(center.size, label)
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", radius)

    def _eval(self, x):
        r = x - self.center
        dist = math.sqrt(r @ r)
        if dist <= self.radius:
            return x.copy()
        return self.center + (self.radius / dist) * r

    def contains(self, x, tol=0.0):
        r = x - self.center
        return math.sqrt(r @ r) <= self.radius + tol


class ProjHyperbolaEpi(Operator):
    """Projector onto ``{(x, y) : y >= 1/x > 0}`` in R^2."""

    __slots__ = ()
    kind = "proj_hyperbola_epi"

    def __init__(self, label=None):
        super().__init__(2, label)

    def _eval(self, x):
        return project_hyperbola_epigraph(x)

    def contains(self, x, tol=0.0):
        return x[0] > 0.0 and x[1] + tol >= 1.0 / x[0]


def _check_children(children, what):
    children = tuple(children)
    if len(children) < 2:
        raise InvalidOperatorError(f"{what} needs at least 2 children, got {len(children)}")
    for c in children:
        if not isinstance(c, Operator):
            raise TypeError(f"{what} children must be operators, got {type(c).__name__}")
    dims = {c.dim for c in children}
    if len(dims) != 1:
        raise DimensionError(f"{what} children have mismatched dimensions {sorted(dims)}")
    return children


class Compose(Operator):
    """``T_m(...T_2(T_1(x)))`` for children ``[T_1, ..., T_m]``."""

    __slots__ = ("_children",)
    kind = "compose"

    def __init__(self, children, label=None):
        children = _check_children(children, "compose")
        super().__init__(children[0].dim, label)
        object.__setattr__(self, "_children", children)

    @property
    def children(self):
        return self._children

    def _eval(self, x):
        for c in self._children:
            x = c._eval(x)
        return x

    @property
    def averaged_constant(self):
        # composition of alpha_i-averaged maps: kappa = sum alpha_i/(1-alpha_i),
        # result is kappa/(1+kappa)-averaged
        kappa = 0.0
        for c in self._children:
            alpha = c.averaged_constant
            if alpha is None:
                return None
            kappa += alpha / (1.0 - alpha)
        return kappa / (1.0 + kappa)

    @property
    def lipschitz_bound(self):
        return math.prod(c.lipschitz_bound for c in self._children)

    def __repr__(self):
        return f"Compose({list(self._children)!r})"


class ConvexCombo(Operator):
    """``sum_i weights[i] * T_i(x)`` with weights in (0, 1] summing to 1."""

    __slots__ = ("_children", "weights")
    kind = "convex_combo"

    def __init__(self, weights, children, label=None):
        children = _check_children(children, "convex_combo")
        w = np.array(weights, dtype=float).reshape(-1)
        if w.size != len(children):
            raise InvalidOperatorError(
                f"{w.size} weights for {len(children)} children")
        if not np.all((w > 0.0) & (w <= 1.0)):
            raise InvalidOperatorError(f"weights must lie in (0, 1], got {w.tolist()}")
        if abs(math.fsum(w) - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidOperatorError(f"weights sum to {math.fsum(w)!r}, not 1")
        super().__init__(children[0].dim, label)
        object.__setattr__(self, "_children", children)
        object.__setattr__(self, "weights", _frozen(w))

    @property
    def children(self):
        return self._children

    def _eval(self, x):
        out = self.weights[0] * self._children[0]._eval(x)
        for w, c in zip(self.weights[1:], self._children[1:]):
            out += w * c._eval(x)
        return out

    @property
    def averaged_constant(self):
        alphas = [c.averaged_constant for c in self._children]
        if any(a is None for a in alphas):
            return None
        return float(np.dot(self.weights, alphas))

    @property
    def lipschitz_bound(self):
        return float(np.dot(self.weights, [c.lipschitz_bound for c in self._children]))

    def __repr__(self):
        return f"ConvexCombo({self.weights.tolist()}, {list(self._children)!r})"


class Averaged(Operator):
    """Relaxation ``(1 - alpha) x + alpha T(x)`` with ``alpha`` in (0, 1)."""

    __slots__ = ("alpha", "inner")
    kind = "averaged"

    def __init__(self, alpha, inner, label=None):
        alpha = float(alpha)
        if not 0.0 < alpha < 1.0:
            raise InvalidOperatorError(f"relaxation alpha must lie in (0, 1), got {alpha}")
        if not isinstance(inner, Operator):
            raise TypeError("inner must be an operator")
        super().__init__(inner.dim, label)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "inner", inner)

    @property
    def children(self):
        return (self.inner,)

    def _eval(self, x):
        return (1.0 - self.alpha) * x + self.alpha * self.inner._eval(x)

    @property
    def averaged_constant(self):
        c = self.inner.averaged_constant
        return None if c is None else self.alpha * c

    @property
    def lipschitz_bound(self):
        return (1.0 - self.alpha) + self.alpha * self.inner.lipschitz_bound

    def __repr__(self):
        return f"Averaged({self.alpha}, {self.inner!r})"


def apply(op, x):
    """Evaluate ``op`` at ``x``; pure, returns a new array."""
    x = as_vector(x)
    if x.size != op.dim:
        raise DimensionError(f"operator acts on R^{op.dim}, got a vector in R^{x.size}")
    return op._eval(x)


def compose(children, label=None):
    return Compose(children, label=label)


def convex_combination(weights, children, label=None):
    return ConvexCombo(weights, children, label=label)


def averaged(alpha, inner, label=None):
    return Averaged(alpha, inner, label=label)


def identity(dim):
    """The identity on R^dim, as the zero translation."""
    return Translation(np.zeros(dim), label="Id")


def projector_leaves(op):
    """All projector leaves reachable from ``op``, depth first."""
    kinds = (ProjHyperplane, ProjHalfspace, ProjBox, ProjBall, ProjHyperbolaEpi)
    if isinstance(op, kinds):
        return [op]
    found = []
    for c in op.children:
        found.extend(projector_leaves(c))
    return found


class CheckReport(dict):
    """Sampling-check outcome: ``violations``, ``worst_margin``, ``samples``.

    ``worst_margin`` is the largest value of lhs - rhs seen; negative means
    the inequality held with room to spare everywhere.
    """

    @property
    def violations(self):
        return self["violations"]

    @property
    def worst_margin(self):
        return self["worst_margin"]


def _sample_pairs(dim, sample_count, seed, box_radius):
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-box_radius, box_radius, size=(sample_count, dim))
    ys = rng.uniform(-box_radius, box_radius, size=(sample_count, dim))
    return xs, ys


def check_firm_nonexpansive(op, sample_count=1000, seed=0, box_radius=5.0):
    """Count sampled pairs violating ``|Tx-Ty|^2 <= <x-y, Tx-Ty>``."""
    xs, ys = _sample_pairs(op.dim, sample_count, seed, box_radius)
    violations, worst = 0, -math.inf
    for x, y in zip(xs, ys):
        dt = op._eval(x) - op._eval(y)
        margin = float(dt @ dt - (x - y) @ dt)
        worst = max(worst, margin)
        if margin > CHECK_TOL:
            violations += 1
    return CheckReport(violations=violations, worst_margin=worst, samples=sample_count)


def check_averaged(op, alpha, sample_count=1000, seed=0, box_radius=5.0):
    """Count sampled pairs violating the alpha-averagedness inequality

    ``|Tx-Ty|^2 + (1-alpha)/alpha |(x-Tx)-(y-Ty)|^2 <= |x-y|^2``.
    """
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    xs, ys = _sample_pairs(op.dim, sample_count, seed, box_radius)
    c = (1.0 - alpha) / alpha
    violations, worst = 0, -math.inf
    for x, y in zip(xs, ys):
        dt = op._eval(x) - op._eval(y)
        dx = x - y
        dr = dx - dt
        margin = float(dt @ dt + c * (dr @ dr) - dx @ dx)
        worst = max(worst, margin)
        if margin > CHECK_TOL:
            violations += 1
    return CheckReport(violations=violations, worst_margin=worst, samples=sample_count)
