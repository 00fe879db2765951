"""Residual-marked empirical process, its innovation transform and W_n^2.

Along a projection t_i = alpha' B' X_i the residual process is

    V_n(u) = n^{-1/2} sum_i e_i 1{t_i <= u},

and the empirical innovation transform removes the part of V_n explained
by the estimation of (beta, theta):

    (T f)(u) = f(u) - sum_{t_i <= u} a(t_i)' A(t_i)^{-1} w_f(t_i) sigma^2(t_i) / n,
    w_f(v)   = sum_{t_j >= v} a(t_j) df(t_j),

with a(v) = (g1(v / kappa, theta) r(v), g2(v / kappa, theta)) / sigma^2(v),
r(v) the kernel estimate of E[X | t = v], and
A(v) = n^{-1} sum_{t_j >= v} a(t_j) m_j', where m_j = (g1(beta'X_j) X_j, g2).

When the index is only identified up to scale, a and m are first projected
onto the complement of the scale direction, where A(v) can be inverted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc
from scipy.linalg import null_space
from scipy.special import ndtri

from .core import Dataset, RngSpec
from .errors import InputError, NumericalError, TransformSingularError
from .families import SingleIndexModel
from .fit import FitResult, fit_model
from .nulldist import NullTable, default_table, p_value
from .sdr import sdr_estimate
from .smooth import KernelSpec, nw_estimate, sigma2_estimate

__all__ = [
    "ProjectionFrame",
    "ProcessPath",
    "EmpiricalTransform",
    "TestOptions",
    "TestReport",
    "make_frame",
    "residual_process",
    "drift_process",
    "empirical_transform",
    "transform_process",
    "direction_grid",
    "wn_statistic",
]

COND_LIMIT = 1e10
RIDGE_START = 1e-8
RIDGE_MAX = 1e-2


@dataclass(frozen=True)
class ProjectionFrame:
    alpha: np.ndarray
    t: np.ndarray
    order: np.ndarray
    f_hat: np.ndarray


def make_frame(proj: np.ndarray, alpha) -> ProjectionFrame:
    """Frame for projections ``proj @ alpha`` where ``proj`` is X B (n x q)."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    nrm = np.linalg.norm(alpha)
    if nrm == 0:
        raise InputError("direction must be nonzero")
    alpha = alpha / nrm
    if alpha[0] < 0:
        raise InputError("direction must have a nonnegative first coordinate")
    t = np.asarray(proj, dtype=float).reshape(len(proj), -1) @ alpha
    order = np.argsort(t, kind="stable")
    ranks = np.searchsorted(t[order], t, side="right")
    return ProjectionFrame(alpha=alpha, t=t, order=order, f_hat=ranks / t.size)


@dataclass(frozen=True)
class ProcessPath:
    """Right-continuous step process on the distinct sorted projections."""

    u: np.ndarray
    values: np.ndarray
    kind: str = "raw"

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values, prepend=0.0)

    def at(self, points) -> np.ndarray:
        """Evaluate the step function (zero left of the first jump)."""
        idx = np.searchsorted(self.u, np.asarray(points, dtype=float), side="right") - 1
        out = np.where(idx >= 0, self.values[np.clip(idx, 0, None)], 0.0)
        return out


def _group(t):
    u, inverse, counts = np.unique(t, return_inverse=True, return_counts=True)
    return u, inverse, counts


def _step_path(t, marks, kind) -> ProcessPath:
    u, inv, _ = _group(t)
    incr = np.bincount(inv, weights=marks, minlength=u.size)
    return ProcessPath(u=u, values=np.cumsum(incr), kind=kind)


def residual_process(d: Dataset, fit: FitResult, frame: ProjectionFrame) -> ProcessPath:
    """V_n(u) = n^{-1/2} sum_i e_i 1{t_i <= u} at each distinct projection."""
    if frame.t.size != d.n:
        raise InputError("frame and dataset sizes differ")
    return _step_path(frame.t, fit.residuals / math.sqrt(d.n), "raw")


@dataclass(frozen=True)
class EmpiricalTransform:
    """Ingredients of the empirical innovation transform on one frame.

    Arrays with a leading ``m_all`` axis are indexed by the distinct sorted
    projections; ``A``, ``ridge`` and ``cond`` cover only the first
    ``retained`` of them (the points not above ``x0``). For scale-free
    families ``basis`` holds an orthonormal basis of the complement of the
    redundant scale direction and ``a``, ``m_incr`` and ``A`` are expressed
    in it.
    """

    u: np.ndarray
    counts: np.ndarray
    a: np.ndarray
    m_incr: np.ndarray
    sigma2: np.ndarray
    A: np.ndarray
    ridge: np.ndarray
    cond: np.ndarray
    retained: int
    kappa: float
    x0: float
    bandwidth: float
    spherical: bool = False
    n: int = 0
    basis: np.ndarray | None = None

    @property
    def ridge_events(self) -> int:
        return int(np.count_nonzero(self.ridge))

    @property
    def min_cond(self) -> float:
        return float(np.min(self.cond)) if self.cond.size else float("nan")

    @property
    def max_cond(self) -> float:
        return float(np.max(self.cond)) if self.cond.size else float("nan")


def _conditions(A):
    s = np.linalg.svd(A, compute_uv=False)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = s[..., 0] / s[..., -1]
    return np.where(np.isfinite(c), c, np.inf)


def _regularize(A):
    """Ridge levels making every A[k] + ridge_k I well conditioned."""
    D = A.shape[-1]
    cond = _conditions(A)
    ridge = np.zeros(A.shape[0])
    bad = np.flatnonzero(cond > COND_LIMIT)
    if bad.size:
        eye = np.eye(D)
        for k in bad:
            scale = abs(np.trace(A[k])) / D
            if scale == 0:
                scale = np.linalg.norm(A[k]) / D
            if scale == 0:
                raise TransformSingularError(
                    "A_n vanishes at a retained point; lower the x0 quantile"
                )
            eps = RIDGE_START * scale
            while True:
                c = _conditions((A[k] + eps * eye)[None])[0]
                if c <= COND_LIMIT:
                    break
                eps *= 10.0
                if eps > RIDGE_MAX * scale * (1 + 1e-9):
                    raise TransformSingularError(
                        f"A_n is numerically singular at u = {k}-th point even with "
                        "maximal ridge; lower the x0 quantile"
                    )
            ridge[k] = eps
            cond[k] = c
    return ridge, cond


def empirical_transform(
    d: Dataset,
    fit: FitResult,
    frame: ProjectionFrame,
    spec: KernelSpec,
    x0: float,
    model: SingleIndexModel,
    variance_mode: str = "homoscedastic",
    spherical: bool = False,
    bandwidth: float | None = None,
) -> EmpiricalTransform:
    """Build a_n, the M_n increments and A_n on the frame's distinct points.

    ``variance_mode="homoscedastic"`` uses the constant mean squared
    residual for sigma^2; ``"smoothed"`` uses the floored kernel estimate
    along the frame. With ``spherical`` the (1 + d)-dimensional reduction
    for spherically distributed covariates replaces r(v) by the index
    itself.
    """
    if variance_mode not in ("homoscedastic", "smoothed"):
        raise InputError(f"unknown variance mode {variance_mode!r}")
    n = d.n
    t = frame.t
    beta, theta = fit.beta, fit.theta
    bnorm = float(np.linalg.norm(beta))
    if bnorm == 0:
        raise NumericalError("fitted index vector is zero; kappa_n undefined")
    kappa = 1.0 / bnorm
    h = spec.resolve_bandwidth(t) if bandwidth is None else float(bandwidth)

    u, inv, counts = _group(t)
    resid = fit.residuals
    if variance_mode == "homoscedastic":
        sigma2 = np.full(u.size, max(float(np.mean(resid * resid)), 1e-12))
    else:
        sigma2 = sigma2_estimate(t, resid, u, spec, h)

    s = u / kappa
    g1u = model.g1(s, theta)
    g2u = model.g2(s, theta)
    index = d.xs @ beta
    g1x = model.g1(index, theta)
    g2x = model.g2(index, theta)
    if spherical:
        a = np.column_stack([g1u * s, g2u]) / sigma2[:, None]
        mrow = np.column_stack([g1x * index, g2x])
    else:
        r = nw_estimate(t, d.xs, u, spec, h)
        a = np.column_stack([g1u[:, None] * r, g2u]) / sigma2[:, None]
        mrow = np.column_stack([g1x[:, None] * d.xs, g2x])
    basis = None
    w = model.scale_direction(np.ones(1) if spherical else beta, theta)
    if w is not None:
        # m'w = 0 identically for scale-free families, so A_n is singular
        # in R^(p+d); work in the orthogonal complement of w instead
        basis = null_space(w[None, :])
        a = a @ basis
        mrow = mrow @ basis
    D = a.shape[1]
    m_incr = np.zeros((u.size, D))
    np.add.at(m_incr, inv, mrow)
    m_incr /= n

    retained = int(np.searchsorted(u, x0, side="right"))
    outer = a[:, :, None] * m_incr[:, None, :]
    A_all = np.cumsum(outer[::-1], axis=0)[::-1]
    A = A_all[:retained]
    ridge, cond = _regularize(A) if retained else (np.zeros(0), np.zeros(0))
    return EmpiricalTransform(
        u=u,
        counts=counts,
        a=a,
        m_incr=m_incr,
        sigma2=sigma2,
        A=A,
        ridge=ridge,
        cond=cond,
        retained=retained,
        kappa=kappa,
        x0=float(x0),
        bandwidth=h,
        spherical=spherical,
        n=n,
        basis=basis,
    )


def compensator(tr: EmpiricalTransform, increments: np.ndarray) -> np.ndarray:
    """Cumulative compensator at the retained points for a path's jumps."""
    k = tr.retained
    if k == 0:
        return np.zeros(0)
    w = np.cumsum((tr.a * increments[:, None])[::-1], axis=0)[::-1][:k]
    D = tr.a.shape[1]
    mats = tr.A + tr.ridge[:, None, None] * np.eye(D)
    x = np.linalg.solve(mats, w[:, :, None])[:, :, 0]
    weight = tr.counts[:k] * tr.sigma2[:k] / tr.n
    return np.cumsum(weight * np.einsum("kd,kd->k", tr.a[:k], x))


def transform_process(raw: ProcessPath, tr: EmpiricalTransform) -> ProcessPath:
    """Apply the empirical innovation transform to a step path on the frame."""
    if raw.u.shape != tr.u.shape or not np.array_equal(raw.u, tr.u):
        raise InputError("path and transform live on different frames")
    comp = compensator(tr, raw.increments)
    k = tr.retained
    return ProcessPath(u=tr.u[:k], values=raw.values[:k] - comp, kind="transformed")


def drift_process(tr: EmpiricalTransform, c) -> ProcessPath:
    """The step path M_n(u)' c built from the transform's M_n increments.

    ``c`` may be given in the full (p + d) coordinates; for scale-free
    families it is mapped to the reduced basis, which leaves the path
    unchanged because M_n has no component along the scale direction.
    """
    c = np.asarray(c, dtype=float)
    if tr.basis is not None and c.shape[0] == tr.basis.shape[0]:
        c = tr.basis.T @ c
    return ProcessPath(u=tr.u, values=np.cumsum(tr.m_incr @ c), kind="raw")


def direction_grid(q: int, resolution: int = 64, rng: RngSpec = RngSpec()) -> np.ndarray:
    """Unit vectors (rows) with nonnegative first coordinate.

    q = 1 gives the single vector (1); q = 2 gives ``resolution`` angles
    evenly spaced on the half circle; q >= 3 gives max(resolution, 32 q)
    scrambled Halton points mapped to the sphere, first coordinate
    reflected to be nonnegative.
    """
    if q < 1:
        raise InputError("q must be >= 1")
    if q == 1:
        return np.ones((1, 1))
    if q == 2:
        phi = np.pi * np.arange(resolution) / resolution
        return np.column_stack([np.sin(phi), -np.cos(phi)])
    count = max(int(resolution), 32 * q)
    seed = int(rng.generator(7, q).integers(2**31))
    pts = qmc.Halton(d=q, scramble=True, seed=seed).random(count)
    z = ndtri(np.clip(pts, 1e-12, 1 - 1e-12))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    z[:, 0] = np.abs(z[:, 0])
    return z


@dataclass(frozen=True)
class TestOptions:
    """Settings for :func:`wn_statistic`.

    ``frame="beta"`` freezes the projection to the fitted index (the
    single-projection test); ``integration="direction"`` integrates each
    direction over its own projections' quantile grid instead of the
    fitted index's empirical distribution.
    """

    __test__ = False

    kernel: KernelSpec = KernelSpec()
    x0_quantile: float = 0.99
    grid_resolution: int = 64
    variance_mode: str = "homoscedastic"
    spherical: bool = False
    frame: str = "adaptive"
    integration: str = "beta"
    ridge_c: float | None = None
    rng: RngSpec = RngSpec()

    def __post_init__(self):
        if not 0 < self.x0_quantile <= 1:
            raise InputError("x0 quantile must lie in (0, 1]")
        if self.variance_mode not in ("homoscedastic", "smoothed"):
            raise InputError(f"unknown variance mode {self.variance_mode!r}")
        if self.frame not in ("adaptive", "beta"):
            raise InputError(f"unknown frame {self.frame!r}")
        if self.integration not in ("beta", "direction"):
            raise InputError(f"unknown integration grid {self.integration!r}")
        if self.grid_resolution < 1:
            raise InputError("grid resolution must be >= 1")

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel.kernel,
            "bandwidth": self.kernel.bandwidth,
            "variance_floor": self.kernel.variance_floor,
            "x0_quantile": self.x0_quantile,
            "grid_resolution": self.grid_resolution,
            "variance_mode": self.variance_mode,
            "spherical": self.spherical,
            "frame": self.frame,
            "integration": self.integration,
            "ridge_c": self.ridge_c,
            "seed": self.rng.seed,
            "stream": self.rng.stream,
        }


@dataclass
class TestReport:
    __test__ = False

    w2: float
    p_value: float
    q_hat: int | None
    beta: np.ndarray | None
    theta: np.ndarray | None
    alpha_star: np.ndarray | None
    x0: float
    psi_n_x0: float
    variance_mode: str
    family: str = ""
    status: str = "ok"
    message: str = ""
    diagnostics: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    dataset: dict = field(default_factory=dict)
    grid: np.ndarray | None = field(default=None, repr=False)
    sup_path: np.ndarray | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def reject(self, level: float) -> bool:
        return self.ok and self.p_value <= level


def _x0_index(n: int, quantile: float) -> int:
    return max(1, min(n, math.ceil(quantile * n - 1e-9)))


def _orient(b: np.ndarray, beta: np.ndarray) -> np.ndarray:
    signs = np.sign(b.T @ beta)
    signs[signs == 0] = 1.0
    return b * signs


def wn_statistic(
    d: Dataset,
    m: SingleIndexModel,
    opts: TestOptions = TestOptions(),
    fit: FitResult | None = None,
    table: NullTable | None = None,
) -> TestReport:
    """Adaptive-to-model Cramer-von Mises statistic W_n^2 and its p-value.

    Numerical failures in fitting, dimension reduction or the transform
    yield a report with ``status="error"`` and NaN statistic.
    """
    d.check_size()
    if m.p != d.p:
        raise InputError(f"model expects p = {m.p}, dataset has p = {d.p}")
    n = d.n
    diag = {"seed": opts.rng.seed, "stream": opts.rng.stream}
    base = dict(
        q_hat=None, beta=None, theta=None, alpha_star=None, x0=float("nan"),
        psi_n_x0=float("nan"), variance_mode=opts.variance_mode, family=m.family,
        options=opts.to_dict(), dataset=d.metadata(), diagnostics=diag,
    )
    try:
        if fit is None:
            fit = fit_model(d, m)
        base.update(beta=fit.beta, theta=fit.theta)
        diag["fit_converged"] = fit.converged
        diag["fit_iterations"] = fit.iterations
        bnorm = float(np.linalg.norm(fit.beta))
        if bnorm == 0:
            raise NumericalError("fitted index vector is zero; kappa_n undefined")
        kappa = 1.0 / bnorm
        # one rounding of the index, shared by the grid and the beta frame
        index = d.xs @ (fit.beta * kappa)
        if opts.frame == "beta":
            q_hat = 1
            basis = (fit.beta * kappa)[:, None]
        else:
            sdr = sdr_estimate(d, opts.ridge_c)
            q_hat = sdr.q_hat
            basis = _orient(sdr.b, fit.beta)
            diag["eigenvalues"] = sdr.eigenvalues.tolist()
            diag["ridge_c"] = sdr.ridge_c
        base["q_hat"] = q_hat
        proj = index[:, None] if opts.frame == "beta" else d.xs @ basis
        alphas = direction_grid(q_hat, opts.grid_resolution, opts.rng)

        u_sorted = np.sort(index)
        k0 = _x0_index(n, opts.x0_quantile)
        x0 = float(u_sorted[k0 - 1])
        k0 = int(np.searchsorted(u_sorted, x0, side="right"))
        grid = u_sorted[:k0]
        f0 = k0 / n

        sup_sq = np.full(k0, -np.inf)
        arg = np.zeros(k0, dtype=int)
        conds, ridge_events, bandwidths = [], 0, []
        for j, alpha in enumerate(alphas):
            frame = make_frame(proj, alpha)
            if opts.integration == "beta":
                x0_frame, points = x0, grid
            else:
                own = np.sort(frame.t)
                x0_frame, points = float(own[k0 - 1]), own[:k0]
            tr = empirical_transform(
                d, fit, frame, opts.kernel, x0_frame, m,
                variance_mode=opts.variance_mode, spherical=opts.spherical,
            )
            path = transform_process(residual_process(d, fit, frame), tr)
            vals = path.at(points) ** 2
            better = vals > sup_sq
            sup_sq[better] = vals[better]
            arg[better] = j
            if tr.cond.size:
                conds.append(tr.min_cond)
            ridge_events += tr.ridge_events
            bandwidths.append(tr.bandwidth)

        resid = fit.residuals
        psi0 = float(np.sum(resid[index <= x0] ** 2) / n)
        if opts.variance_mode == "homoscedastic":
            s2 = float(np.mean(resid * resid))
            denom = s2 * f0 * f0
            w2 = float(np.sum(sup_sq) / n / denom)
        else:
            s2u = sigma2_estimate(index, resid, grid, opts.kernel)
            denom = psi0 * psi0
            w2 = float(np.sum(sup_sq * s2u) / n / denom)
        if not np.isfinite(w2):
            raise NumericalError("statistic is not finite")
        table = default_table() if table is None else table
        pv = p_value(w2, table)
        best = int(np.argmax(sup_sq)) if k0 else 0
        diag.update(
            grid_size=int(len(alphas)),
            integration_points=int(k0),
            min_condition_number=float(min(conds)) if conds else float("nan"),
            ridge_events=int(ridge_events),
            bandwidth=float(np.median(bandwidths)),
            null_table=table.describe(),
        )
        return TestReport(
            w2=w2, p_value=pv,
            **{**base, "alpha_star": alphas[arg[best]], "x0": x0, "psi_n_x0": psi0},
            grid=grid, sup_path=sup_sq,
        )
    except NumericalError as exc:
        return TestReport(
            w2=float("nan"), p_value=float("nan"), status="error",
            message=f"{type(exc).__name__}: {exc}", **base,
        )
