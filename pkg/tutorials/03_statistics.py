"""The four detection statistics on one null and one alternative draw.

Run: python3 tutorials/03_statistics.py
"""

import numpy as np

from sparsedetect import (
    AlternativeSpec,
    DesignSpec,
    anova_stat,
    build_design,
    estimate_sigma,
    hc_continuous,
    hc_discretized,
    max_stat,
    sample_signal,
    synthesize_observation,
)

p, alpha, r = 10_000, 0.75, 1.0
X = build_design(DesignSpec.identity(p))
beta = sample_signal(AlternativeSpec.sfem(p, alpha=alpha, r=r), seed=4).beta

for label, b in (("null", np.zeros(p)), ("alternative", beta)):
    y = synthesize_observation(X, b, seed=5)
    v = X.rmatvec(y)
    print(f"{label}:")
    print(f"  ANOVA  ||Py||^2      = {anova_stat(X, y).value:10.1f}   (null mean {p})")
    print(f"  Max    max|x_j^T y|  = {max_stat(X, y).value:10.3f}   (sqrt(2 log p) = {np.sqrt(2 * np.log(p)):.3f})")
    print(f"  HC     continuous    = {hc_continuous(v, p).value:10.3f}")
    print(f"  HC     integer grid  = {hc_discretized(v, p, s=1.0).value:10.3f}")

# With sigma unknown, statistics are computed on y / sigma_hat. The estimate
# is deliberately biased upwards so it rarely undershoots the true level.
y = synthesize_observation(X, np.zeros(p), sigma=2.0, seed=6)
est = estimate_sigma(y)
print(f"\ntrue sigma 2.0, sigma_hat {est.sigma_hat:.4f} (inflation factor 1 + a_n = {1 + est.a_n:.4f})")
