"""Designs and how far their columns are from orthogonal.

Run: python3 tutorials/01_designs.py
"""

import numpy as np

from sparsedetect import DesignSpec, build_design, coherence_lower_bound, coherence_profile, gram

# An orthonormal design keeps the problem equivalent to the sequence model,
# so Max and HC behave exactly as in the classical setting.
X = build_design(DesignSpec.random_orthonormal(200, 100), seed=1)
C = gram(X)
print("random orthonormal: max |C_ij| off the diagonal =", f"{np.abs(C - np.eye(100)).max():.2e}")

# Gaussian columns are only nearly orthogonal. Their off-diagonal
# correlations shrink like sqrt(log p / n).
for n in (100, 200, 400):
    X = build_design(DesignSpec.gaussian(n, 800), seed=2)
    prof = coherence_profile(gram(X), gamma=0.25)
    print(
        f"gaussian n={n:5d} p=800: max off-diagonal {prof.max_offdiag:.3f}",
        f"(Welch-type floor {coherence_lower_bound(n, 800):.3f})",
        f"weak-coherence ok: {prof.strong_ok}",
    )

# Constant correlation: every pair of columns has inner product gamma.
X = build_design(DesignSpec.constant_correlation(50, 0.5), seed=3)
off = gram(X)[~np.eye(50, dtype=bool)]
print(f"constant correlation: off-diagonal range [{off.min():.6f}, {off.max():.6f}]")

# Balanced one-way layouts: p groups of k replicates, columns are group indicators.
X = build_design(DesignSpec.balanced_one_way(4, 3))
print("balanced one-way (p=4, k=3):")
print(np.round(X.values * np.sqrt(3), 3).astype(int))
