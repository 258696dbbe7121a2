"""Seeded random families of firmly nonexpansive operators."""

import math

import numpy as np

from .operators import AffineScale, ProjBall, ProjBox, ProjHalfspace, Translation

__all__ = ["LEAF_KINDS", "random_leaf", "random_tuple", "random_weights", "trial_rng"]

LEAF_KINDS = ("translation", "proj_halfspace", "proj_box", "proj_ball", "affine_scale")


def trial_rng(seed, trial):
    """Independent generator for one trial; insensitive to execution order."""
    return np.random.default_rng([int(seed), int(trial)])


def random_leaf(rng, dim, kind=None):
    if kind is None:
        kind = LEAF_KINDS[rng.integers(len(LEAF_KINDS))]
    if kind == "translation":
        return Translation(rng.uniform(-1.0, 1.0, dim))
    if kind == "proj_halfspace":
        normal = rng.standard_normal(dim)
        while not np.any(normal):
            normal = rng.standard_normal(dim)
        return ProjHalfspace(normal / np.linalg.norm(normal), rng.uniform(-1.0, 1.0))
    if kind == "proj_box":
        center = rng.uniform(-2.0, 2.0, dim)
        half = rng.uniform(0.1, 1.0, dim)
        return ProjBox(center - half, center + half)
    if kind == "proj_ball":
        return ProjBall(rng.uniform(-2.0, 2.0, dim), rng.uniform(0.2, 1.5))
    if kind == "affine_scale":
        return AffineScale(rng.uniform(0.5, 1.0), rng.uniform(-1.0, 1.0, dim))
    raise ValueError(f"unknown leaf kind {kind!r}")


def random_tuple(rng, dims=(1, 2, 5), m_values=(2, 3, 4), kinds=LEAF_KINDS):
    """Draw ``(dim, [T_1, ..., T_m])`` with leaves drawn uniformly from ``kinds``."""
    dim = int(dims[rng.integers(len(dims))])
    m = int(m_values[rng.integers(len(m_values))])
    return dim, [random_leaf(rng, dim, kinds[rng.integers(len(kinds))]) for _ in range(m)]


def random_weights(rng, m):
    """Weights in (0, 1] summing to 1 within the convex-combination tolerance."""
    w = rng.dirichlet(np.ones(m))
    w = np.maximum(w, 1e-3)
    w /= math.fsum(w)
    w[-1] = 1.0 - math.fsum(w[:-1])
    return w
