"""Data generators for the simulation examples and a replication engine."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .competitors import zheng_test
from .core import Dataset, RngSpec
from .errors import AdaptestError, InputError
from .families import get_family
from .fit import fit_model
from .transform import TestOptions, wn_statistic

__all__ = [
    "DEFAULT_OPTIONS",
    "SCENARIOS",
    "TESTS",
    "ScenarioSpec",
    "StudyResult",
    "generate",
    "index_vectors",
    "null_family",
    "run_study",
    "results_table",
]

SCENARIOS = (
    "EX1_p3", "EX1_p4", "H11", "H12", "H13", "H31", "H32", "H41", "H42", "H43", "LOCAL",
)
TESTS = ("wn", "wn_beta", "zheng")

# Every design draws Gaussian covariates, which are elliptically contoured,
# so the scalar transform path applies. The general vector path is
# near-singular there because the population A(u) has rank one.
DEFAULT_OPTIONS = {"spherical": True}

_DEFAULT_P = {"EX1_p3": 3, "EX1_p4": 4, "H11": 8, "H12": 8, "H13": 8, "H31": 8,
              "H32": 8, "H41": 8, "H42": 8, "H43": 8, "LOCAL": 8}
_MIN_P = {"H41": 2, "H42": 4, "H43": 8}
_NULL_FAMILY = {"EX1_p3": "exp-index", "EX1_p4": "exp-index", "H41": "scaled-exponential",
                "H42": "scaled-exponential", "H43": "scaled-exponential"}


@dataclass(frozen=True)
class ScenarioSpec:
    """One simulation design.

    ``x_law`` is ``"iso"`` for N(0, I_p) or ``"sigma"`` for N(0, Sigma) with
    Sigma_ij = 0.5^|i - j|. For ``LOCAL`` the departure is
    n^{-1/2} (beta_2'X)^2 and ``a`` is ignored.
    """

    example: str
    n: int = 100
    p: int | None = None
    a: float = 0.0
    x_law: str = "iso"

    def __post_init__(self):
        if self.example not in SCENARIOS:
            raise InputError(f"unknown scenario {self.example!r}; choose from {', '.join(SCENARIOS)}")
        p = _DEFAULT_P[self.example] if self.p is None else int(self.p)
        object.__setattr__(self, "p", p)
        ex = self.example
        if ex == "EX1_p3" and p != 3 or ex == "EX1_p4" and p != 4:
            raise InputError(f"{ex} is defined for p = {_DEFAULT_P[ex]} only")
        if ex in ("H11", "H12", "H13") and p < 1:
            raise InputError("p must be >= 1")
        if ex in ("H31", "H32", "LOCAL") and (p < 2 or p % 2):
            raise InputError(f"{ex} needs an even p >= 2")
        if ex in _MIN_P and p < _MIN_P[ex]:
            raise InputError(f"{ex} needs p >= {_MIN_P[ex]}")
        if self.x_law not in ("iso", "sigma"):
            raise InputError(f"unknown covariate law {self.x_law!r}")
        if not self.a >= 0:
            raise InputError("amplitude a must be >= 0")
        if self.n < 2:
            raise InputError("n must be >= 2")

    @property
    def label(self) -> str:
        return f"{self.example}[{self.x_law},p={self.p}]"


def null_family(example: str) -> str:
    """Family fitted under the null for each example (linear unless noted)."""
    return _NULL_FAMILY.get(example, "linear")


def index_vectors(spec: ScenarioSpec) -> tuple[np.ndarray, np.ndarray | None]:
    """The (null index, departure index) vectors of a scenario."""
    p, ex = spec.p, spec.example
    if ex == "EX1_p3":
        return np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    if ex == "EX1_p4":
        s = 1 / math.sqrt(2)
        return np.array([s, s, 0, 0]), np.array([0, 0, s, s])
    if ex in ("H11", "H12", "H13"):
        b = np.ones(p) / math.sqrt(p)
        return b, b
    if ex in ("H31", "H32", "LOCAL"):
        half = p // 2
        b1 = np.r_[np.ones(half), np.zeros(half)] / math.sqrt(half)
        b2 = np.r_[np.zeros(half), np.ones(half)] / math.sqrt(half)
        return b1, b2
    e = np.eye(p)
    return e[0], e[1]


def _sigma_root(p: int) -> np.ndarray:
    idx = np.arange(p)
    sigma = 0.5 ** np.abs(idx[:, None] - idx[None, :])
    w, v = np.linalg.eigh(sigma)
    return (v * np.sqrt(w)) @ v.T


def generate(spec: ScenarioSpec, rng: RngSpec = RngSpec()) -> Dataset:
    gen = rng.generator(0)
    n, p, a = spec.n, spec.p, spec.a
    xs = gen.standard_normal((n, p))
    if spec.x_law == "sigma":
        xs = xs @ _sigma_root(p)
    eps = gen.standard_normal(n)
    b0, b1 = index_vectors(spec)
    t0 = xs @ b0
    ex = spec.example
    if ex.startswith("EX1"):
        y = 0.25 * np.exp(2 * t0) + a * (xs @ b1)
    elif ex == "H11":
        y = t0 + a * np.cos(0.5 * np.pi * t0)
    elif ex == "H12":
        y = t0 + 0.25 * a * np.exp(t0)
    elif ex == "H13":
        y = t0 + 0.5 * a * t0**2
    elif ex == "H31":
        y = t0 + a * (xs @ b1) ** 2
    elif ex == "H32":
        y = t0 + a * np.exp(-((xs @ b1) ** 2))
    elif ex == "LOCAL":
        y = t0 + (xs @ b1) ** 2 / math.sqrt(n)
    else:
        x = lambda j: xs[:, j - 1]
        y = np.exp(0.5 * x(1))
        if ex == "H41":
            y = y + a * x(2) ** 3
        elif ex == "H42":
            y = y + a * (x(2) ** 3 + np.cos(np.pi * x(3)) + x(4))
        else:
            y = y + a * (x(2) ** 3 + np.cos(np.pi * x(3)) + x(4) - np.abs(x(5))
                         + x(6) ** 2 + x(7) * x(8))
    return Dataset(xs=xs, ys=y + eps)


@dataclass
class StudyResult:
    scenario: ScenarioSpec
    test: str
    reps: int
    level: float
    rejection_rate: float
    mean_statistic: float
    seed: int
    failures: int = 0
    q_hat_counts: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return self.failures <= 0.02 * self.reps

    def row(self) -> dict:
        s = self.scenario
        return {
            "scenario": s.example, "x_law": s.x_law, "p": s.p, "a": s.a, "test": self.test,
            "n": s.n, "reps": self.reps, "level": self.level,
            "rate": round(self.rejection_rate, 6), "mean_statistic": round(self.mean_statistic, 6),
            "failures": self.failures, "valid": self.valid, "seed": self.seed,
        }


def _one_replication(spec, tests, level, seed, rep, options):
    rng = RngSpec(seed, rep)
    d = generate(spec, rng)
    model = get_family(null_family(spec.example), spec.p)
    out = {}
    try:
        fit = fit_model(d, model)
    except AdaptestError:
        return {t: None for t in tests}
    for name in tests:
        try:
            if name == "zheng":
                rep_ = zheng_test(d, fit)
                out[name] = (rep_.statistic, rep_.p_value <= level, None)
            else:
                opts = TestOptions(**{**options, "rng": rng,
                                      "frame": "beta" if name == "wn_beta" else "adaptive"})
                r = wn_statistic(d, model, opts, fit=fit)
                out[name] = (r.w2, r.p_value <= level, r.q_hat) if r.ok else None
        except AdaptestError:
            out[name] = None
    return out


def _run_chunk(args):
    spec, tests, level, seed, reps, options = args
    return [_one_replication(spec, tests, level, seed, r, options) for r in reps]


def run_study(
    spec: ScenarioSpec,
    tests=("wn",),
    reps: int = 500,
    level: float = 0.05,
    rng: RngSpec = RngSpec(),
    workers: int = 1,
    options: dict | None = None,
) -> list[StudyResult]:
    """Rejection rates of each test over ``reps`` seeded replications.

    Replication r uses stream r of ``rng.seed`` for both data and test
    randomness, and results are gathered in replication order, so the
    output does not depend on ``workers``. Failed replications are counted
    separately and excluded from the rate. ``options`` are passed to
    :class:`TestOptions` on top of :data:`DEFAULT_OPTIONS`.
    """
    tests = tuple(tests)
    for t in tests:
        if t not in TESTS:
            raise InputError(f"unknown test {t!r}; choose from {', '.join(TESTS)}")
    if reps < 1:
        raise InputError("reps must be >= 1")
    options = {**DEFAULT_OPTIONS, **(options or {})}
    indices = list(range(reps))
    if workers > 1:
        size = max(1, math.ceil(reps / (4 * workers)))
        chunks = [indices[i:i + size] for i in range(0, reps, size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = pool.map(_run_chunk, [(spec, tests, level, rng.seed, c, options) for c in chunks])
            records = [r for part in parts for r in part]
    else:
        records = _run_chunk((spec, tests, level, rng.seed, indices, options))

    results = []
    for t in tests:
        done = [r[t] for r in records if r[t] is not None]
        fails = reps - len(done)
        rate = float(np.mean([x[1] for x in done])) if done else float("nan")
        mean = float(np.mean([x[0] for x in done])) if done else float("nan")
        qs = {}
        for x in done:
            if x[2] is not None:
                qs[x[2]] = qs.get(x[2], 0) + 1
        results.append(StudyResult(spec, t, reps, level, rate, mean, rng.seed, fails,
                                   dict(sorted(qs.items()))))
    return results


def results_table(results, delimiter: str = ",") -> str:
    """Delimited rows (scenario, x_law, p, a, test, n, ...) with a header."""
    buf = io.StringIO()
    rows = [r.row() for r in results]
    if not rows:
        return ""
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), delimiter=delimiter, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
