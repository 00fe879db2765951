"""Univariate Nadaraya-Watson smoothing along a projection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, InputError

__all__ = [
    "KERNELS",
    "KernelSpec",
    "bandwidth_rule",
    "nw_estimate",
    "nw_weights",
    "sigma2_estimate",
]

_DENOM_FLOOR = 1e-12
_MIN_FLOOR = 1e-12


def quartic(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) <= 1.0, 15.0 / 16.0 * (1.0 - x * x) ** 2, 0.0)


def epanechnikov(x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) <= 1.0, 0.75 * (1.0 - x * x), 0.0)


def gaussian(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / np.sqrt(2.0 * np.pi)


KERNELS = {"quartic": quartic, "epanechnikov": epanechnikov, "gaussian": gaussian}


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family, bandwidth and variance floor.

    ``bandwidth`` is either a positive number or ``"rule"`` for
    :func:`bandwidth_rule`. ``variance_floor`` is an absolute floor for the
    smoothed variance; ``None`` means 5% of the mean squared residual.
    """

    kernel: str = "quartic"
    bandwidth: float | str = "rule"
    variance_floor: float | None = None

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise InputError(f"unknown kernel {self.kernel!r}; choose from {', '.join(KERNELS)}")
        if isinstance(self.bandwidth, str):
            if self.bandwidth != "rule":
                raise InputError(f"unknown bandwidth rule {self.bandwidth!r}")
        elif not self.bandwidth > 0:
            raise InputError("bandwidth must be positive")
        if self.variance_floor is not None and not self.variance_floor > 0:
            raise InputError("variance floor must be positive")

    @property
    def function(self):
        return KERNELS[self.kernel]

    def resolve_bandwidth(self, t) -> float:
        if isinstance(self.bandwidth, str):
            return bandwidth_rule(t)
        return float(self.bandwidth)


def bandwidth_rule(t) -> float:
    """Normal-reference bandwidth 1.06 * sd(t) * n^(-1/5)."""
    t = np.asarray(t, dtype=float)
    n = t.size
    if n < 5:
        raise InputError(f"bandwidth rule needs n >= 5, got {n}")
    sd = float(np.std(t, ddof=1))
    if not sd > 0:
        raise DegenerateError("projections are constant; bandwidth undefined")
    return 1.06 * sd * n ** (-0.2)


def nw_weights(t, query, spec: KernelSpec, h: float | None = None) -> np.ndarray:
    """Normalized weight matrix W (queries x n) with rows summing to one.

    Rows whose kernel mass is below 1e-12 put all weight on the nearest
    sample point.
    """
    t = np.asarray(t, dtype=float)
    q = np.atleast_1d(np.asarray(query, dtype=float))
    if h is None:
        h = spec.resolve_bandwidth(t)
    k = spec.function((q[:, None] - t[None, :]) / h)
    den = k.sum(axis=1)
    bad = den < _DENOM_FLOOR
    if np.any(bad):
        nearest = np.argmin(np.abs(q[bad, None] - t[None, :]), axis=1)
        k[bad] = 0.0
        k[np.flatnonzero(bad), nearest] = 1.0
        den[bad] = 1.0
    return k / den[:, None]


def nw_estimate(t, targets, query, spec: KernelSpec = KernelSpec(), h: float | None = None):
    """Nadaraya-Watson estimate of E[targets | t = query].

    ``targets`` may be a vector or an n x k matrix. A scalar query returns
    a k-vector (or a float for vector targets); an array of queries returns
    one row per query.
    """
    targets = np.asarray(targets, dtype=float)
    w = nw_weights(t, query, spec, h)
    out = w @ targets
    if np.ndim(query) == 0:
        return out[0]
    return out


def variance_floor(residuals, spec: KernelSpec = KernelSpec()) -> float:
    if spec.variance_floor is not None:
        return float(spec.variance_floor)
    r = np.asarray(residuals, dtype=float)
    return max(0.05 * float(np.mean(r * r)), _MIN_FLOOR)


def sigma2_estimate(t, residuals, query, spec: KernelSpec = KernelSpec(), h: float | None = None):
    """Smoothed conditional variance of the residuals, floored away from zero."""
    r = np.asarray(residuals, dtype=float)
    est = nw_estimate(t, r * r, query, spec, h)
    return np.maximum(est, variance_floor(r, spec))
