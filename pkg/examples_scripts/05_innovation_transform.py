"""
What the innovation transform removes
=====================================

Estimating beta and theta adds a drift to the residual-marked process,
which makes its limit depend on the model. The transform annihilates every
path of the form M_n(u)'c, so the drift disappears, while the residual
process itself becomes a time-changed Brownian motion with variance
proportional to psi_n(u).
"""

import math

import numpy as np

from adaptest import RngSpec, ScenarioSpec, fit_model, generate, get_family
from adaptest.smooth import KernelSpec
from adaptest.transform import (
    drift_process,
    empirical_transform,
    make_frame,
    residual_process,
    transform_process,
)

data = generate(ScenarioSpec("H11", n=500, a=0.0), RngSpec(seed=5))
model = get_family("linear", data.p)
fit = fit_model(data, model)

# Frame: the fitted index on the unit-norm scale, truncated at its 99% point.
kappa = 1.0 / np.linalg.norm(fit.beta)
frame = make_frame((data.xs @ (fit.beta * kappa))[:, None], [1.0])
x0 = float(np.sort(frame.t)[math.ceil(0.99 * data.n) - 1])
tr = empirical_transform(data, fit, frame, KernelSpec(), x0, model, spherical=True)

c = np.random.default_rng(0).standard_normal(tr.a.shape[1])
drift = drift_process(tr, c)
after = transform_process(drift, tr)
print("sup |drift|            :", float(np.max(np.abs(drift.values))))
print("sup |transformed drift|:", float(np.max(np.abs(after.values))))

raw = residual_process(data, fit, frame)
out = transform_process(raw, tr)
for q in (0.25, 0.5, 0.75):
    u = float(np.quantile(frame.t, q))
    print(f"u at quantile {q}: raw V = {float(raw.at(u)):+.3f}, transformed = {float(out.at(u)):+.3f}")
