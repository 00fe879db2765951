import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from adaptest.errors import InputError
from adaptest.families import FAMILIES, get_family

THETAS = {
    "linear": st.just(()),
    "exp-index": st.just(()),
    "scaled-exponential": st.tuples(st.floats(-3, 3), st.floats(-1.5, 1.5)),
    "cubic-index": st.tuples(*[st.floats(-2, 2)] * 4),
}


def _rel_close(a, b, rel=1e-5):
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


@pytest.mark.parametrize("name", sorted(FAMILIES))
def test_derivatives_match_central_differences(name):
    m = get_family(name, 1)

    @settings(max_examples=80, deadline=None)
    @given(t=st.floats(-2, 2), theta=THETAS[name])
    def check(t, theta):
        theta = np.asarray(theta, dtype=float)
        h = 1e-6
        g1_fd = (m.g(t + h, theta) - m.g(t - h, theta)) / (2 * h)
        assert _rel_close(float(m.g1(t, theta)), float(g1_fd))
        g2 = np.atleast_1d(m.g2(np.float64(t), theta))
        assert g2.shape == (m.d,)
        for k in range(m.d):
            e = np.zeros(m.d)
            e[k] = h
            fd = (m.g(t, theta + e) - m.g(t, theta - e)) / (2 * h)
            assert _rel_close(float(g2[k]), float(fd))

    check()


@pytest.mark.parametrize("name", ["scaled-exponential", "cubic-index"])
def test_rescale_preserves_mean(name):
    rng = np.random.default_rng(3)
    m = get_family(name, 3)
    xs = rng.normal(size=(10, 3))
    beta = np.array([2.0, -1.0, 0.5])
    theta = np.asarray(m.default_theta) + 0.3
    b2, t2 = m.rescale(beta, theta)
    assert abs(np.linalg.norm(b2) - 1) < 1e-12
    np.testing.assert_allclose(m.mean(xs, b2, t2), m.mean(xs, beta, theta), rtol=1e-12)


def test_jacobian_rows():
    m = get_family("cubic-index", 2)
    xs = np.array([[1.0, 2.0], [0.5, -1.0]])
    beta, theta = np.array([0.3, 0.1]), np.array([1.0, 2.0, 3.0, 4.0])
    J = m.jacobian(xs, beta, theta)
    t = xs @ beta
    np.testing.assert_allclose(J[:, :2], (2 + 6 * t + 12 * t**2)[:, None] * xs)
    np.testing.assert_allclose(J[:, 2:], np.column_stack([np.ones(2), t, t**2, t**3]))


def test_family_dimensions_and_unknown_name():
    assert {k: get_family(k, 2).d for k in FAMILIES} == {
        "linear": 0, "scaled-exponential": 2, "exp-index": 0, "cubic-index": 4,
    }
    with pytest.raises(InputError):
        get_family("quadratic", 2)
    with pytest.raises(InputError):
        get_family("linear", 0)
