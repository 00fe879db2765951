import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy.integrate import quad

from adaptest.errors import DegenerateError, InputError
from adaptest.smooth import (
    KERNELS,
    KernelSpec,
    bandwidth_rule,
    nw_estimate,
    nw_weights,
    sigma2_estimate,
)


@pytest.mark.parametrize("name", sorted(KERNELS))
def test_kernels_integrate_to_one_and_are_symmetric(name):
    k = KERNELS[name]
    total, _ = quad(lambda x: float(k(x)), -np.inf if name == "gaussian" else -1,
                    np.inf if name == "gaussian" else 1)
    assert abs(total - 1) < 1e-10
    x = np.linspace(-3, 3, 61)
    np.testing.assert_array_equal(k(x), k(-x))


def test_bandwidth_rule_examples():
    t = np.random.default_rng(0).normal(size=100)
    assert bandwidth_rule(t) == pytest.approx(1.06 * t.std(ddof=1) * 100**-0.2, rel=1e-14)
    assert bandwidth_rule(3.0 * t) == pytest.approx(3.0 * bandwidth_rule(t), rel=1e-14)
    s = np.r_[np.full(16, -2.0), np.full(16, 2.0)]
    s = s / s.std(ddof=1) * 2.0
    assert bandwidth_rule(s) == pytest.approx(2.12 * 32**-0.2, rel=1e-12)
    with pytest.raises(DegenerateError):
        bandwidth_rule(np.ones(10))
    with pytest.raises(InputError):
        bandwidth_rule(np.arange(4.0))


def test_spec_validation():
    with pytest.raises(InputError):
        KernelSpec(kernel="triangle")
    with pytest.raises(InputError):
        KernelSpec(bandwidth=-1.0)
    with pytest.raises(InputError):
        KernelSpec(bandwidth="silverman")
    with pytest.raises(InputError):
        KernelSpec(variance_floor=0.0)


def test_constant_targets_reproduced():
    t = np.random.default_rng(1).uniform(size=50)
    np.testing.assert_allclose(nw_estimate(t, np.full(50, 3.5), np.linspace(0, 1, 7)), 3.5)


def test_identity_target_at_median_against_direct_sum():
    t = np.random.default_rng(2).uniform(size=500)
    med = float(np.median(t))
    spec = KernelSpec()
    h = bandwidth_rule(t)
    w = np.array([15 / 16 * (1 - ((med - ti) / h) ** 2) ** 2 if abs(med - ti) <= h else 0.0 for ti in t])
    oracle = float(np.sum(w * t) / np.sum(w))
    est = nw_estimate(t, t, med, spec)
    assert est == pytest.approx(oracle, abs=1e-12)
    assert abs(est - med) < 0.05


def test_far_query_falls_back_to_nearest_point():
    t = np.random.default_rng(3).normal(size=40)
    targets = np.arange(40.0)
    h = bandwidth_rule(t)
    assert nw_estimate(t, targets, t.max() + 10 * h) == targets[np.argmax(t)]


def test_vector_targets_and_query_shapes():
    t = np.linspace(0, 1, 30)
    targets = np.column_stack([t, 2 * t])
    assert nw_estimate(t, targets, 0.5).shape == (2,)
    assert nw_estimate(t, targets, np.array([0.2, 0.5, 0.7])).shape == (3, 2)
    np.testing.assert_allclose(nw_weights(t, [0.1, 0.9], KernelSpec()).sum(axis=1), 1.0)


def test_sigma2_homogeneous_and_zero_residuals():
    t = np.random.default_rng(4).normal(size=60)
    signs = np.where(np.arange(60) % 2, 1.0, -1.0)
    np.testing.assert_allclose(sigma2_estimate(t, signs, np.linspace(-1, 1, 5)), 1.0)
    np.testing.assert_allclose(sigma2_estimate(t, np.zeros(60), [0.0, 1.0]), 1e-12)
    floor = KernelSpec(variance_floor=0.3)
    assert np.all(sigma2_estimate(t, 0.01 * signs, [0.0], floor) == 0.3)


def test_sigma2_tracks_heteroscedastic_variance():
    rng = np.random.default_rng(5)
    t = rng.uniform(-1, 1, size=20000)
    resid = (1 + t**2) ** 0.5 * rng.normal(size=t.size)
    for t0 in (-0.5, 0.0, 0.6):
        est = float(sigma2_estimate(t, resid, t0))
        assert abs(est - (1 + t0**2)) <= 0.2 * (1 + t0**2)


@settings(max_examples=50, deadline=None)
@given(
    z=arrays(np.float64, 25, elements=st.floats(-100, 100)),
    w=arrays(np.float64, 25, elements=st.floats(-100, 100)),
    a=st.floats(-5, 5),
    b=st.floats(-5, 5),
    u=st.floats(-2, 2),
    kernel=st.sampled_from(sorted(KERNELS)),
)
def test_convex_combination_and_linearity(z, w, a, b, u, kernel):
    t = np.linspace(-1.5, 1.5, 25)
    spec = KernelSpec(kernel=kernel)
    ez = nw_estimate(t, z, u, spec)
    assert z.min() - 1e-9 <= ez <= z.max() + 1e-9
    lhs = nw_estimate(t, a * z + b * w, u, spec)
    rhs = a * ez + b * nw_estimate(t, w, u, spec)
    assert abs(lhs - rhs) <= 1e-12 * (1 + abs(a) + abs(b)) * 100
