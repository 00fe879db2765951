"""Discretization-expectation estimation of the central subspace.

Each sample response value y_i dichotomizes the data into {Y <= y_i} and
{Y > y_i}; the sliced-inverse-regression matrix of that two-slice partition
is averaged over i. The structural dimension is chosen by the minimum
ridge-type eigenvalue ratio rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Dataset
from .errors import DegenerateResponseError, InputError

__all__ = ["DeeMatrix", "SdrEstimate", "dee_matrix", "mrer", "mrer_ratios", "sdr_estimate"]


@dataclass(frozen=True)
class DeeMatrix:
    """Target matrix in whitened coordinates and its spectral data.

    ``eigenvectors`` are orthonormal in the whitened scale; ``directions``
    are the same vectors mapped back to the original covariate scale and
    re-orthonormalized, column by column in eigenvalue order.
    """

    m: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    directions: np.ndarray
    whitener: np.ndarray
    slices_used: int


@dataclass(frozen=True)
class SdrEstimate:
    q_hat: int
    b: np.ndarray
    eigenvalues: np.ndarray
    ridge_c: float


def _inv_sqrt(cov: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(cov)
    if w[0] <= 1e-12 * max(w[-1], 1e-300):
        raise InputError("covariate covariance is singular; cannot whiten predictors")
    return (v / np.sqrt(w)) @ v.T


def _orthonormalize(a: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(a)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return q * signs


def dee_matrix(d: Dataset, min_slice: int = 2) -> DeeMatrix:
    """Average two-slice SIR matrices over all sample thresholds."""
    n, p = d.n, d.p
    if n < 20:
        raise InputError(f"DEE needs n >= 20, got {n}")
    xs = d.xs
    cov = np.atleast_2d(np.cov(xs, rowvar=False))
    whitener = _inv_sqrt(cov)
    z = (xs - xs.mean(axis=0)) @ whitener

    order = np.argsort(d.ys, kind="stable")
    ys_sorted = d.ys[order]
    csum = np.vstack([np.zeros(p), np.cumsum(z[order], axis=0)])
    total = csum[-1]
    # k_i = #{Y <= y_i}; ties share one partition
    k = np.searchsorted(ys_sorted, d.ys, side="right")
    lower_ok = k >= min_slice
    upper_ok = (n - k) >= min_slice
    if not np.any(lower_ok & upper_ok):
        raise DegenerateResponseError(
            "no threshold splits the response into two slices of at least "
            f"{min_slice} points"
        )

    m = np.zeros((p, p))
    s_low = csum[k]
    s_high = total - s_low
    with np.errstate(divide="ignore", invalid="ignore"):
        # p_s * mean_s mean_s' = (S_s S_s') / (n * size_s)
        w_low = np.where(lower_ok, 1.0 / (n * k), 0.0)
        w_high = np.where(upper_ok, 1.0 / (n * (n - k)), 0.0)
    m = (s_low * w_low[:, None]).T @ s_low + (s_high * w_high[:, None]).T @ s_high
    m /= n
    m = 0.5 * (m + m.T)

    evals, evecs = np.linalg.eigh(m)
    idx = np.argsort(evals)[::-1]
    evals = evals[idx]
    evecs = evecs[:, idx]
    directions = _orthonormalize(whitener @ evecs)
    return DeeMatrix(
        m=m,
        eigenvalues=evals,
        eigenvectors=evecs,
        directions=directions,
        whitener=whitener,
        slices_used=int(np.sum(lower_ok) + np.sum(upper_ok)),
    )


def mrer_ratios(eigenvalues, n: int, c: float | None = None) -> np.ndarray:
    lam = np.clip(np.asarray(eigenvalues, dtype=float), 0.0, None)
    if c is None:
        c = math.log(n) / n
    lam2 = np.append(lam**2, 0.0)
    return (lam2[1:] + c) / (lam2[:-1] + c)


def mrer(eigenvalues, n: int, c: float | None = None) -> int:
    """Structural dimension minimizing (lam_{i+1}^2 + c) / (lam_i^2 + c).

    ``lam_{p+1}`` is taken as 0 and ties resolve to the smallest index.
    ``c`` defaults to log(n) / n.
    """
    ratios = mrer_ratios(eigenvalues, n, c)
    return int(np.argmin(ratios)) + 1


def sdr_estimate(d: Dataset, c: float | None = None) -> SdrEstimate:
    dm = dee_matrix(d)
    ridge = math.log(d.n) / d.n if c is None else float(c)
    q = mrer(dm.eigenvalues, d.n, ridge)
    b = _orthonormalize(dm.directions[:, :q])
    return SdrEstimate(q_hat=q, b=b, eigenvalues=dm.eigenvalues, ridge_c=ridge)
