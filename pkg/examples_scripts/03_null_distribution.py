"""
The limiting null law
=====================

After the innovation transform, the standardized statistic converges to the
integral of a squared standard Brownian motion over [0, 1]. Two independent
Monte Carlo oracles approximate it: discretized paths and a truncated
Karhunen-Loeve series. Their quantiles agree, and p-values come from the
series table shipped with the package.
"""

import numpy as np

from adaptest import RngSpec, default_table, p_value, simulate_null_paths, simulate_null_series
from adaptest.nulldist import EMBEDDED_QUANTILES, quantiles

paths = simulate_null_paths(50_000, 1000, RngSpec(seed=1))
series = simulate_null_series(50_000, 200, RngSpec(seed=2))
probs = [0.5, 0.9, 0.95, 0.99]
print("prob   paths   series")
for pr, a, b in zip(probs, quantiles(paths, probs), quantiles(series, probs)):
    print(f"{pr:4.2f}  {a:6.4f}  {b:6.4f}")
print("sample means:", round(float(paths.samples.mean()), 4), round(float(series.samples.mean()), 4),
      "(exact 0.5)")
print("series variance:", round(float(series.samples.var()), 4), "(exact 1/3)")

# The embedded critical values and p-values for a few statistics
print("embedded quantiles:", EMBEDDED_QUANTILES)
table = default_table()
for w in (0.2, 1.0, 1.66, 3.0):
    print(f"p-value of W2 = {w:4.2f}: {p_value(w, table):.4f}")
