"""
How the projection frame adapts
===============================

The test projects the covariates onto an estimated basis of the central
mean subspace. Its dimension q is picked by a ridge-type eigenvalue ratio
rule with ridge constant c = log(n)/n. Under the null the rule returns
q = 1, so the test is as sensitive as a single-index test. A larger frame
is chosen only when the second eigenvalue is large relative to sqrt(c),
which makes the rule conservative at moderate sample sizes.
"""

import numpy as np

from adaptest import Dataset, RngSpec, ScenarioSpec, dee_matrix, generate, mrer, sdr_estimate

null = generate(ScenarioSpec("H12", n=400, a=0.0), RngSpec(seed=10))
dm = dee_matrix(null)
print("null eigenvalues:", np.round(dm.eigenvalues, 4))
print("selected dimension:", mrer(dm.eigenvalues, null.n))

# The mean depends on two directions: y = x1 exp(x2) + noise.
rng = np.random.default_rng(11)
xs = rng.standard_normal((400, 4))
ys = xs[:, 0] * np.exp(xs[:, 1]) + 0.3 * rng.standard_normal(400)
data = Dataset(xs, ys)
est = sdr_estimate(data)
print("eigenvalues:", np.round(est.eigenvalues, 4))
print("default ridge c = %.4f gives q_hat = %d" % (est.ridge_c, est.q_hat))

# The second eigenvalue is clearly above the noise floor, but not above
# sqrt(c). A smaller ridge constant opens the second direction, and the
# estimated basis then spans the first two coordinates.
small = sdr_estimate(data, c=1e-4)
print("ridge c = 1e-4 gives q_hat =", small.q_hat)
print(np.round(small.b, 3))

# A departure that is symmetric in the second direction leaves every slice
# mean unchanged there, so this estimator cannot see it and q_hat stays 1.
# The test keeps power because the fitted index itself carries the signal
# through the residuals.
sym = generate(ScenarioSpec("H31", n=400, a=1.0), RngSpec(seed=12))
print("symmetric departure q_hat:", sdr_estimate(sym).q_hat)
