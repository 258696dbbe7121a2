"""Maximally monotone operators with closed-form resolvents.

Only kinds whose resolvent ``J_A = (Id + A)^{-1}`` can be evaluated exactly
are representable:

* :class:`ConstantMap` ``A = {c}``: ``J_A x = x - c``
* :class:`PsdLinear` ``A = M`` (PSD): ``J_A x = (I + M)^{-1} x``
* :class:`SubdiffAbs` ``A = w * d|.|_1``: soft thresholding at ``w``
* :class:`NormalConeBox` ``A = N_[lo, hi]``: clamp to the box
* :class:`Shifted` ``A~ = -v + A(. - v)``: ``J_A~ = v + J_A``

The shifted resolvent is evaluated through that identity; inverting
``Id + A~`` directly is left to the independent checks in
:func:`verify_resolvent_shift`.
"""

import math

import numpy as np
import scipy.linalg

from .errors import DimensionError, InvalidOperatorError, NumericalFailure
from .operators import Operator, as_vector

__all__ = [
    "MonotoneSpec", "ConstantMap", "PsdLinear", "SubdiffAbs", "NormalConeBox",
    "Shifted", "Resolvent", "BlockResolvent", "resolvent", "shift_operator",
    "block_resolvent", "verify_resolvent_shift", "direct_shifted_resolvent",
    "MAX_LINEAR_DIM",
]

MAX_LINEAR_DIM = 64
_SOLVE_RTOL = 1e-12
_PSD_TOL = 1e-10


class MonotoneSpec:
    """Immutable description of a maximally monotone operator on R^dim."""

    __slots__ = ("dim",)
    kind = "monotone"

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    def _set(self, **fields):
        for k, v in fields.items():
            object.__setattr__(self, k, v)

    def resolve(self, x):
        """``J_A x`` for a validated float vector ``x``."""
        raise NotImplementedError


class ConstantMap(MonotoneSpec):
    __slots__ = ("c",)
    kind = "constant_map"

    def __init__(self, c):
        c = as_vector(c, name="c")
        c.flags.writeable = False
        self._set(dim=c.size, c=c)

    def resolve(self, x):
        return x - self.c


class PsdLinear(MonotoneSpec):
    """Linear map ``x -> M x`` with ``M`` positive semidefinite (not nec. symmetric)."""

    __slots__ = ("matrix", "_lu")
    kind = "psd_linear"

    def __init__(self, matrix):
        m = np.array(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise DimensionError(f"matrix must be square, got shape {m.shape}")
        d = m.shape[0]
        if d > MAX_LINEAR_DIM:
            raise InvalidOperatorError(f"dense resolvent limited to d <= {MAX_LINEAR_DIM}")
        if not np.all(np.isfinite(m)):
            raise InvalidOperatorError("matrix has non-finite entries")
        # <x, Mx> >= 0 for all x  <=>  sym(M) is PSD
        lam_min = float(np.linalg.eigvalsh(0.5 * (m + m.T))[0])
        if lam_min < -_PSD_TOL:
            raise InvalidOperatorError(f"matrix is not monotone (min sym eigenvalue {lam_min:g})")
        m.flags.writeable = False
        lu = scipy.linalg.lu_factor(np.eye(d) + m)
        self._set(dim=d, matrix=m, _lu=lu)

    def resolve(self, x):
        y = scipy.linalg.lu_solve(self._lu, x)
        residual = np.linalg.norm(y + self.matrix @ y - x)
        if residual > _SOLVE_RTOL * max(np.linalg.norm(x), 1.0):
            raise NumericalFailure(f"(I+M)y = x solved only to residual {residual:g}")
        return y


class SubdiffAbs(MonotoneSpec):
    """Subdifferential of ``weight * ||x||_1``."""

    __slots__ = ("weight",)
    kind = "subdiff_abs"

    def __init__(self, weight, dim):
        weight = float(weight)
        if not (weight >= 0.0 and math.isfinite(weight)):
            raise InvalidOperatorError(f"weight must be >= 0, got {weight}")
        if int(dim) < 1:
            raise DimensionError("dim must be positive")
        self._set(dim=int(dim), weight=weight)

    def resolve(self, x):
        return np.sign(x) * np.maximum(np.abs(x) - self.weight, 0.0)


class NormalConeBox(MonotoneSpec):
    """Normal cone of the box ``[lo, hi]``; its resolvent is the clamp."""

    __slots__ = ("lo", "hi")
    kind = "normal_cone_box"

    def __init__(self, lo, hi):
        lo = as_vector(lo, name="lo")
        hi = as_vector(hi, dim=lo.size, name="hi")
        if np.any(lo > hi):
            raise InvalidOperatorError("box needs lo <= hi componentwise")
        lo.flags.writeable = False
        hi.flags.writeable = False
        self._set(dim=lo.size, lo=lo, hi=hi)

    def resolve(self, x):
        return np.minimum(np.maximum(x, self.lo), self.hi)


class Shifted(MonotoneSpec):
    """``A~ = -v + A(. - v)``; resolvent ``v + J_A`` with no argument shift."""

    __slots__ = ("inner", "v")
    kind = "shifted"

    def __init__(self, inner, v):
        if not isinstance(inner, MonotoneSpec):
            raise TypeError("inner must be a MonotoneSpec")
        v = as_vector(v, name="v")
        if v.size != inner.dim:
            raise DimensionError(f"shift has dimension {v.size}, operator acts on R^{inner.dim}")
        v.flags.writeable = False
        self._set(dim=inner.dim, inner=inner, v=v)

    def resolve(self, x):
        return self.v + self.inner.resolve(x)


class Resolvent(Operator):
    """Operator leaf ``J_A`` for a :class:`MonotoneSpec` ``A``."""

    __slots__ = ("spec",)
    kind = "resolvent"

    def __init__(self, spec, label=None):
        if not isinstance(spec, MonotoneSpec):
            raise TypeError("spec must be a MonotoneSpec")
        super().__init__(spec.dim, label)
        object.__setattr__(self, "spec", spec)

    def _eval(self, x):
        return self.spec.resolve(x)

    def __repr__(self):
        return f"Resolvent({type(self.spec).__name__})"


class BlockResolvent(Operator):
    """``J_A1 x ... x J_Am`` acting slice-wise on R^(m*d)."""

    __slots__ = ("blocks", "block_dim")
    kind = "block_resolvent"

    def __init__(self, blocks, label=None):
        blocks = tuple(blocks)
        if not blocks:
            raise InvalidOperatorError("block operator needs at least one block")
        dims = {b.dim for b in blocks}
        if len(dims) != 1:
            raise DimensionError(f"blocks have mismatched dimensions {sorted(dims)}")
        d = blocks[0].dim
        super().__init__(d * len(blocks), label)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "block_dim", d)

    def _eval(self, x):
        d = self.block_dim
        return np.concatenate([b.resolve(x[i * d:(i + 1) * d])
                               for i, b in enumerate(self.blocks)])


def resolvent(spec):
    return Resolvent(spec)


def shift_operator(spec, v):
    return Shifted(spec, v)


def block_resolvent(blocks):
    """Resolvent of the product operator ``A1 x ... x Am`` on R^(m*d)."""
    return BlockResolvent(blocks)


def direct_shifted_resolvent(spec, v, x):
    """Solve ``x in y + A~(y)`` for ``A~ = -v + A(. - v)`` without the shift identity.

    Each supported kind is inverted from its definition: a linear solve for
    :class:`PsdLinear`, the inclusion ``x + v - y in A(y - v)`` checked
    coordinate by coordinate for the separable kinds.
    """
    x = as_vector(x, dim=spec.dim)
    v = as_vector(v, dim=spec.dim)
    if isinstance(spec, ConstantMap):
        # y - v + c = x
        return x + v - spec.c
    if isinstance(spec, PsdLinear):
        # y + M(y - v) - v = x  <=>  (I + M) y = x + v + M v
        rhs = x + v + spec.matrix @ v
        return np.linalg.solve(np.eye(spec.dim) + spec.matrix, rhs)
    if isinstance(spec, SubdiffAbs):
        # z = y - v must satisfy x - z in w * sign(z)
        w = spec.weight
        z = np.where(x > w, x - w, np.where(x < -w, x + w, 0.0))
        return z + v
    if isinstance(spec, NormalConeBox):
        # z = y - v in [lo, hi] with x - z in N_box(z)
        z = np.where(x < spec.lo, spec.lo, np.where(x > spec.hi, spec.hi, x))
        return z + v
    if isinstance(spec, Shifted):
        # -v + (-u + B(. - u))(. - v) = -(u + v) + B(. - (u + v))
        return direct_shifted_resolvent(spec.inner, spec.v + v, x)
    raise InvalidOperatorError(f"no direct inversion for {type(spec).__name__}")


def verify_resolvent_shift(spec, v, samples=100, seed=0, box_radius=5.0):
    """Compare ``J_A~`` (via the shift identity) with a direct inversion.

    Returns a dict with ``max_abs_error`` over ``samples`` seeded points.
    """
    v = as_vector(v, dim=spec.dim, name="v")
    shifted = Resolvent(Shifted(spec, v))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for x in rng.uniform(-box_radius, box_radius, size=(samples, spec.dim)):
        lhs = shifted._eval(x)
        rhs = direct_shifted_resolvent(spec, v, x)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return {"max_abs_error": worst, "samples": samples}
