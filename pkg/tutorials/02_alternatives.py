"""Sparse alternatives: fixed-effects and random-effects signals.

Run: python3 tutorials/02_alternatives.py
"""

import numpy as np

from sparsedetect import AlternativeSpec, sample_signal, sparsity_from_alpha

p = 10_000
for alpha in (0.4, 0.6, 0.75, 0.9):
    print(f"alpha={alpha:4}: S = {sparsity_from_alpha(p, alpha)} nonzero coefficients out of {p}")

# Fixed effects: the amplitude A = sqrt(2 r log p) is the same for every nonzero.
spec = AlternativeSpec.sfem(p, alpha=0.75, r=0.5)
sig = sample_signal(spec, seed=0)
print(f"\nSFEM r=0.5: A = {spec.amplitude:.4f}, support {sig.support.tolist()}")
print("values on the support:", np.round(sig.beta[sig.support], 4).tolist())

# Random effects: nonzeros are N(0, tau^2), so some are tiny and some large.
spec = AlternativeSpec.srem(p, alpha=0.75, tau=3.0)
sig = sample_signal(spec, seed=0)
print(f"\nSREM tau=3: values on the support {np.round(sig.beta[sig.support], 3).tolist()}")

# The seed fully determines the draw.
a = sample_signal(spec, seed=11).beta
b = sample_signal(spec, seed=11).beta
print("\nsame seed, same signal:", np.array_equal(a, b))
