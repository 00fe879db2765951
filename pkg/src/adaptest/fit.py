"""Least-squares estimation of the hypothesized single-index model."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Dataset
from .errors import (
    AdaptestError,
    DomainError,
    InputError,
    NonIdentifiableError,
)
from .families import SingleIndexModel

__all__ = ["FitResult", "fit_model", "sse_gradient"]

_MAX_DAMPING = 1e16
_STEP_TOL = 1e-10


@dataclass(frozen=True)
class FitResult:
    beta: np.ndarray
    theta: np.ndarray
    residuals: np.ndarray
    sse: float
    converged: bool
    iterations: int
    sse_path: tuple = field(default=(), repr=False)

    def summary(self) -> dict:
        return {
            "beta": self.beta.tolist(),
            "theta": self.theta.tolist(),
            "sse": self.sse,
            "converged": self.converged,
            "iterations": self.iterations,
        }


def _result(d, m, beta, theta, converged, iterations, path):
    beta, theta = m.rescale(beta, theta)
    resid = d.ys - m.mean(d.xs, beta, theta)
    # sse is defined from the stored residuals, not the iteration's value
    sse = float(resid @ resid)
    return FitResult(
        beta=beta,
        theta=theta,
        residuals=resid,
        sse=sse,
        converged=converged,
        iterations=iterations,
        sse_path=tuple(path),
    )


def sse_gradient(d: Dataset, m: SingleIndexModel, beta, theta) -> np.ndarray:
    """Gradient of the residual sum of squares with respect to (beta, theta)."""
    r = d.ys - m.mean(d.xs, beta, theta)
    return -2.0 * m.jacobian(d.xs, beta, theta).T @ r


def _fit_linear(d: Dataset, m: SingleIndexModel) -> FitResult:
    coef, _, rank, _ = np.linalg.lstsq(d.xs, d.ys, rcond=None)
    if rank < d.p:
        raise NonIdentifiableError(
            f"covariate matrix has rank {rank} < p = {d.p}; beta is not identifiable"
        )
    resid = d.ys - d.xs @ coef
    sse = float(resid @ resid)
    return FitResult(
        beta=coef,
        theta=np.zeros(0),
        residuals=resid,
        sse=sse,
        converged=True,
        iterations=1,
        sse_path=(sse,),
    )


def _index_direction(d: Dataset) -> np.ndarray:
    """Leading DEE direction, falling back to the OLS direction."""
    from .sdr import dee_matrix

    try:
        v = dee_matrix(d).directions[:, 0]
    except AdaptestError:
        v, *_ = np.linalg.lstsq(d.xs, d.ys - d.ys.mean(), rcond=None)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        v = np.zeros(d.p)
        v[0] = 1.0
        return v
    return v / nrm


def _sse(y, fitted):
    r = y - fitted
    return float(r @ r)


def default_init(d: Dataset, m: SingleIndexModel) -> np.ndarray:
    """Starting point: DEE direction for beta, 1-D profile grid for the rest."""
    b = _index_direction(d)
    t = d.xs @ b
    y = d.ys
    with np.errstate(over="ignore", invalid="ignore"):
        if m.family == "cubic-index":
            design = np.column_stack([np.ones_like(t), t, t * t, t**3])
            theta, *_ = np.linalg.lstsq(design, y, rcond=None)
            return np.concatenate([b, theta])
        if m.family == "scaled-exponential":
            best = None
            for rate in np.linspace(-3.0, 3.0, 121):
                if rate == 0:
                    continue
                e = np.exp(rate * t)
                den = e @ e
                if not np.isfinite(den) or den == 0:
                    continue
                amp = (y @ e) / den
                s = _sse(y, amp * e)
                if np.isfinite(s) and (best is None or s < best[0]):
                    best = (s, amp, rate)
            if best is None:
                return np.concatenate([b, m.default_theta])
            return np.concatenate([b, [best[1], best[2]]])
        if m.d == 0 and m.family != "linear":
            # the index scale is identified, so profile over a signed scale
            best = None
            for s in np.linspace(-3.0, 3.0, 121):
                if s == 0:
                    continue
                v = _sse(y, m.g(s * t, ()))
                if np.isfinite(v) and (best is None or v < best[0]):
                    best = (v, s)
            scale = 1.0 if best is None else best[1]
            return scale * b
    return np.concatenate([b, m.default_theta])


def fit_model(
    d: Dataset,
    m: SingleIndexModel,
    init=None,
    max_iter: int = 200,
    tol: float = 1e-10,
) -> FitResult:
    """Fit g(beta'x, theta) by damped Gauss-Newton (Levenberg) least squares.

    The linear family is solved in closed form. For other families each
    step solves ``(J'J + lam * s * I) delta = J'r`` where ``s`` is the mean
    diagonal of ``J'J``; ``lam`` starts at 1e-3 and is divided by 10 after
    an accepted step and multiplied by 10 after a rejected one. Iteration
    stops when the relative SSE decrease of an accepted step is below
    ``tol`` or the step norm falls below 1e-10.

    Families whose index is only identified up to scale return beta with
    unit norm.
    """
    if m.p != d.p:
        raise InputError(f"model expects p = {m.p}, dataset has p = {d.p}")
    npar = d.p + m.d
    if d.n <= npar:
        raise InputError(f"need n > p + d = {npar}, got n = {d.n}")
    if m.family == "linear" and init is None:
        return _fit_linear(d, m)

    params = default_init(d, m) if init is None else np.asarray(init, dtype=float).copy()
    if params.shape != (npar,):
        raise InputError(f"init must have length p + d = {npar}")
    if not np.all(np.isfinite(params)):
        raise InputError("init contains non-finite values")

    p = d.p
    xs, y = d.xs, d.ys

    def evaluate(par):
        with np.errstate(over="ignore", invalid="ignore"):
            fitted = m.mean(xs, par[:p], par[p:])
        if not np.all(np.isfinite(fitted)):
            return None, np.inf
        r = y - fitted
        return r, float(r @ r)

    r, sse = evaluate(params)
    if r is None:
        raise DomainError(f"g is non-finite at parameters {params.tolist()}")
    path = [sse]
    lam = 1e-3
    converged = sse == 0.0
    iterations = 0
    while not converged and iterations < max_iter:
        J = m.jacobian(xs, params[:p], params[p:])
        JtJ = J.T @ J
        grad = J.T @ r
        scale = max(float(np.mean(np.diag(JtJ))), np.finfo(float).tiny)
        accepted = False
        last_nonfinite = None
        while lam <= _MAX_DAMPING:
            try:
                step = np.linalg.solve(JtJ + lam * scale * np.eye(npar), grad)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            if np.linalg.norm(step) < _STEP_TOL * (1.0 + np.linalg.norm(params)):
                converged = True
                break
            trial = params + step
            r_new, sse_new = evaluate(trial)
            if r_new is None:
                last_nonfinite = trial
            if sse_new < sse:
                rel = (sse - sse_new) / sse
                params, r, sse = trial, r_new, sse_new
                path.append(sse)
                lam = max(lam / 10.0, 1e-12)
                iterations += 1
                accepted = True
                if rel < tol or sse == 0.0:
                    converged = True
                break
            lam *= 10.0
        if converged:
            break
        if not accepted:
            if last_nonfinite is not None:
                raise DomainError(
                    f"g is non-finite at parameters {last_nonfinite.tolist()}"
                )
            if not np.all(np.isfinite(JtJ)) or np.linalg.matrix_rank(J) == 0:
                raise NonIdentifiableError(
                    "normal equations are singular even at maximal damping"
                )
            break
    return _result(d, m, params[:p], params[p:], converged, iterations, path)
