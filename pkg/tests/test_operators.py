import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from displab.errors import DimensionError, InvalidOperatorError
from displab.monotone import NormalConeBox, PsdLinear, SubdiffAbs, resolvent
from displab.operators import (AffineScale, Averaged, ProjBall, ProjBox, ProjHalfspace,
                               ProjHyperbolaEpi, ProjHyperplane, Translation, apply,
                               averaged, check_averaged, check_firm_nonexpansive, compose,
                               convex_combination, identity)
from displab.sampling import LEAF_KINDS, random_leaf
from displab.testing import unchecked_affine_scale

PROJ_TOL = 1e-10


def test_translation_example():
    np.testing.assert_array_equal(apply(Translation([1.0, 2.0]), [0.0, 0.0]), [-1.0, -2.0])


def test_hyperplane_example():
    p1 = ProjHyperplane([0.0, 1.0], 0.0)
    np.testing.assert_array_equal(p1([3.0, 5.0]), [3.0, 0.0])


def test_convex_combo_of_translations_example():
    op = convex_combination([0.5, 0.5], [Translation([2.0, 0.0]), Translation([0.0, 2.0])])
    np.testing.assert_array_equal(op([0.0, 0.0]), [-1.0, -1.0])


def test_compose_translations_add():
    op = compose([Translation([1.0]), Translation([2.0])])
    np.testing.assert_array_equal(op([0.0]), [-3.0])


def test_compose_applies_first_child_first(depierro):
    p1, p2, _ = depierro
    op = compose([p2, p1])
    for pt in ([3.0, 5.0], [-1.5, -7.0], [0.0, 1.0]):
        np.testing.assert_array_equal(op(pt), [pt[0], 0.0])


def test_strict_combo_fixed_point():
    op = convex_combination([0.5, 0.5], [Translation([1.0]), AffineScale(0.5, [0.0])])
    np.testing.assert_allclose(op([-2.0]), [-2.0], atol=0)


def test_combo_of_identities():
    op = convex_combination([1 / 3, 2 / 3], [identity(3), identity(3)])
    x = np.array([0.3, -7.0, 2.5])
    np.testing.assert_allclose(op(x), x, rtol=0, atol=1e-15)


def test_box_ball_halfspace_values():
    np.testing.assert_array_equal(ProjBox([0, 0], [1, 1])([2.0, -3.0]), [1.0, 0.0])
    np.testing.assert_allclose(ProjBall([0, 0], 2.0)([3.0, 4.0]), [1.2, 1.6])
    np.testing.assert_array_equal(ProjBall([0, 0], 2.0)([0.3, 0.4]), [0.3, 0.4])
    np.testing.assert_allclose(ProjHalfspace([1.0, 1.0], 1.0)([2.0, 2.0]), [0.5, 0.5])
    np.testing.assert_array_equal(ProjHalfspace([1.0, 1.0], 1.0)([-2.0, 0.0]), [-2.0, 0.0])


def test_averaged_relaxation():
    op = averaged(0.25, Translation([4.0]))
    np.testing.assert_allclose(op([0.0]), [-1.0])
    assert isinstance(op, Averaged)


@pytest.mark.parametrize("bad", [
    lambda: ProjHyperplane([0.0, 0.0], 1.0),
    lambda: ProjHalfspace([0.0], 1.0),
    lambda: ProjBox([1.0], [0.0]),
    lambda: ProjBall([0.0], 0.0),
    lambda: AffineScale(1.5, [0.0]),
    lambda: averaged(1.0, Translation([0.0])),
    lambda: convex_combination([0.6, 0.5], [identity(1), identity(1)]),
    lambda: convex_combination([1.0, 0.0], [identity(1), identity(1)]),
    lambda: compose([identity(1)]),
])
def test_invalid_constructions_rejected(bad):
    with pytest.raises(InvalidOperatorError):
        bad()


def test_dimension_errors():
    with pytest.raises(DimensionError):
        compose([identity(1), identity(2)])
    with pytest.raises(DimensionError):
        apply(Translation([1.0, 2.0]), [1.0])
    with pytest.raises(ValueError):
        apply(Translation([1.0]), [np.nan])


def test_weights_sum_tolerance():
    eps = 1e-13
    convex_combination([0.5 + eps, 0.5], [identity(1), identity(1)])
    with pytest.raises(InvalidOperatorError):
        convex_combination([0.5 + 1e-11, 0.5], [identity(1), identity(1)])


def test_immutable_and_pure():
    op = Translation([1.0, 2.0])
    with pytest.raises(AttributeError):
        op.a = np.zeros(2)
    x = np.array([5.0, 5.0])
    op(x)
    np.testing.assert_array_equal(x, [5.0, 5.0])
    with pytest.raises(ValueError):
        op.a[0] = 3.0


def test_averaged_constants_and_flags(depierro):
    p1, p2, p3 = depierro
    assert p1.averaged_constant == 0.5 and p1.is_firmly_nonexpansive
    c = compose([p1, p2, p3])
    assert abs(c.averaged_constant - 0.75) < 1e-15
    assert not c.is_firmly_nonexpansive
    assert compose([p1, p2]).averaged_constant == pytest.approx(2 / 3)
    combo = convex_combination([0.5, 0.5], [p1, p2])
    assert combo.is_firmly_nonexpansive
    assert unchecked_affine_scale(1.5, [0.0]).averaged_constant is None


# Sampling checkers: examples and the invalid backdoor.

def test_checker_translation_zero_violations():
    assert check_firm_nonexpansive(Translation([0.3, -1.0]), 1000, seed=1).violations == 0


def test_checker_hyperbola_zero_violations():
    assert check_firm_nonexpansive(ProjHyperbolaEpi(), 1000, seed=2).violations == 0


def test_checker_detects_invalid_scale():
    bad = unchecked_affine_scale(1.5, [0.0])
    assert check_firm_nonexpansive(bad, 200, seed=3).violations > 0


def test_checker_averaged_examples(depierro):
    p1, p2, p3 = depierro
    assert check_averaged(p3, 0.5, 1000, seed=4).violations == 0
    assert check_averaged(compose([p1, p2, p3]), 0.75, 1000, seed=5).violations == 0
    assert check_averaged(Translation([1.0, 1.0]), 0.01, 1000, seed=6).violations == 0


def test_checker_reports_margin():
    rep = check_firm_nonexpansive(ProjBox([0.0], [1.0]), 100, seed=0)
    assert rep["samples"] == 100 and rep.worst_margin <= 1e-10


# Property tests over the random leaf family.

leaf_seed = st.integers(0, 2 ** 32 - 1)
leaf_kind = st.sampled_from(LEAF_KINDS)
leaf_dim = st.sampled_from([1, 2, 5])


def _leaf(seed, kind, dim):
    return random_leaf(np.random.default_rng(seed), dim, kind)


def _pair(seed, dim):
    rng = np.random.default_rng(seed + 1)
    return rng.uniform(-10, 10, dim), rng.uniform(-10, 10, dim)


@settings(max_examples=200, deadline=None)
@given(leaf_seed, leaf_kind, leaf_dim)
def test_leaf_firmly_nonexpansive(seed, kind, dim):
    op = _leaf(seed, kind, dim)
    x, y = _pair(seed, dim)
    dt = op(x) - op(y)
    assert dt @ dt <= (x - y) @ dt + 1e-10
    assert np.linalg.norm(dt) <= np.linalg.norm(x - y) + 1e-10


@settings(max_examples=200, deadline=None)
@given(leaf_seed, st.sampled_from(["proj_halfspace", "proj_box", "proj_ball"]), leaf_dim)
def test_projector_idempotent_and_variational(seed, kind, dim):
    op = _leaf(seed, kind, dim)
    x, z = _pair(seed, dim)
    px = op(x)
    np.testing.assert_allclose(op(px), px, rtol=0, atol=PROJ_TOL)
    c = op(z)  # a point of the set
    assert (x - px) @ (c - px) <= PROJ_TOL * max(1.0, np.linalg.norm(x))


@settings(max_examples=100, deadline=None)
@given(leaf_seed, leaf_dim, st.integers(2, 4))
def test_compose_is_m_over_m_plus_1_averaged(seed, dim, m):
    rng = np.random.default_rng(seed)
    kinds = rng.choice(LEAF_KINDS, size=m)
    op = compose([random_leaf(rng, dim, k) for k in kinds])
    alpha = m / (m + 1)
    assert op.averaged_constant <= alpha + 1e-15
    x, y = _pair(seed, dim)
    dt = op(x) - op(y)
    dr = (x - y) - dt
    assert dt @ dt + (1 - alpha) / alpha * (dr @ dr) <= (x - y) @ (x - y) + 1e-9


def test_resolvent_leaves_firmly_nonexpansive():
    m = np.array([[2.0, 1.0], [-1.0, 0.5]])
    for spec in (PsdLinear(m), SubdiffAbs(0.7, 2), NormalConeBox([-1, 0], [1, 2])):
        assert check_firm_nonexpansive(resolvent(spec), 10_000, seed=7).violations == 0
