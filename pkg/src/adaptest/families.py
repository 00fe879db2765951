"""Built-in single-index mean families g(t, theta) and their derivatives."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import InputError

__all__ = ["SingleIndexModel", "FAMILIES", "get_family"]


@dataclass(frozen=True)
class SingleIndexModel:
    """Hypothesized mean function g(beta'x, theta).

    ``g`` maps (t, theta) to an array shaped like t, ``g1`` is dg/dt and
    ``g2`` returns dg/dtheta with shape ``t.shape + (d,)``.

    When ``scale_free`` is set, g(c * t, theta) can be absorbed by a change
    of theta, so beta is only identified up to scale; ``rescale`` returns
    the equivalent parameters with unit-norm beta.
    """

    family: str
    p: int
    d: int
    g: Callable
    g1: Callable
    g2: Callable
    scale_free: bool = False
    _rescale: Callable | None = None
    default_theta: tuple = ()
    _scale_derivative: Callable | None = None

    def rescale(self, beta, theta):
        beta = np.asarray(beta, dtype=float)
        theta = np.asarray(theta, dtype=float)
        if not self.scale_free:
            return beta, theta
        c = float(np.linalg.norm(beta))
        if c == 0:
            return beta, theta
        return beta / c, self._rescale(theta, c)

    def scale_direction(self, beta, theta) -> np.ndarray | None:
        """Parameter direction along which g(beta'x, theta) does not change.

        For a scale-free family g(c t, theta) = g(t, rho(theta, c)), so the
        vector w = (beta, -d rho / d c at c = 1) satisfies m(x)'w = 0 for
        every x. Returns ``None`` for families without this redundancy.
        """
        if not self.scale_free:
            return None
        beta = np.atleast_1d(np.asarray(beta, dtype=float))
        return np.concatenate([beta, -self._scale_derivative(np.asarray(theta, dtype=float))])

    def mean(self, xs, beta, theta):
        return self.g(np.asarray(xs) @ beta, theta)

    def jacobian(self, xs, beta, theta):
        """Rows m(x_i, beta, theta) = (g1 * x_i, g2) of length p + d."""
        t = np.asarray(xs) @ beta
        return np.column_stack([self.g1(t, theta)[:, None] * xs, self.g2(t, theta)])


def _linear_g(t, theta):
    return np.asarray(t, dtype=float).copy()


def _linear_g1(t, theta):
    return np.ones_like(np.asarray(t, dtype=float))


def _empty_g2(t, theta):
    t = np.asarray(t, dtype=float)
    return np.zeros(t.shape + (0,))


def _sexp_g(t, theta):
    return theta[0] * np.exp(theta[1] * np.asarray(t, dtype=float))


def _sexp_g1(t, theta):
    return theta[0] * theta[1] * np.exp(theta[1] * np.asarray(t, dtype=float))


def _sexp_g2(t, theta):
    t = np.asarray(t, dtype=float)
    e = np.exp(theta[1] * t)
    return np.stack([e, theta[0] * t * e], axis=-1)


def _sexp_rescale(theta, c):
    return np.array([theta[0], theta[1] * c])


def _expidx_g(t, theta):
    return 0.25 * np.exp(2.0 * np.asarray(t, dtype=float))


def _expidx_g1(t, theta):
    return 0.5 * np.exp(2.0 * np.asarray(t, dtype=float))


def _cubic_g(t, theta):
    t = np.asarray(t, dtype=float)
    return theta[0] + t * (theta[1] + t * (theta[2] + t * theta[3]))


def _cubic_g1(t, theta):
    t = np.asarray(t, dtype=float)
    return theta[1] + t * (2.0 * theta[2] + 3.0 * t * theta[3])


def _cubic_g2(t, theta):
    t = np.asarray(t, dtype=float)
    return np.stack([np.ones_like(t), t, t * t, t**3], axis=-1)


def _cubic_rescale(theta, c):
    return np.asarray(theta, dtype=float) * c ** np.arange(4)


def _sexp_scale_derivative(theta):
    return np.array([0.0, theta[1]])


def _cubic_scale_derivative(theta):
    return np.asarray(theta, dtype=float) * np.arange(4)


FAMILIES = {
    "linear": dict(d=0, g=_linear_g, g1=_linear_g1, g2=_empty_g2),
    "scaled-exponential": dict(
        d=2, g=_sexp_g, g1=_sexp_g1, g2=_sexp_g2, scale_free=True,
        _rescale=_sexp_rescale, default_theta=(1.0, 1.0),
        _scale_derivative=_sexp_scale_derivative,
    ),
    "exp-index": dict(d=0, g=_expidx_g, g1=_expidx_g1, g2=_empty_g2),
    "cubic-index": dict(
        d=4, g=_cubic_g, g1=_cubic_g1, g2=_cubic_g2, scale_free=True,
        _rescale=_cubic_rescale, default_theta=(0.0, 1.0, 0.0, 0.0),
        _scale_derivative=_cubic_scale_derivative,
    ),
}


def get_family(name: str, p: int) -> SingleIndexModel:
    """Look up a built-in family by name for covariate dimension ``p``."""
    try:
        spec = FAMILIES[name]
    except KeyError:
        raise InputError(
            f"unknown model family {name!r}; choose from {', '.join(FAMILIES)}"
        ) from None
    if p < 1:
        raise InputError("covariate dimension must be >= 1")
    return SingleIndexModel(family=name, p=int(p), **spec)
