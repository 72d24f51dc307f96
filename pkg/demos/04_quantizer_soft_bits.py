"""Bits <-> Gaussians: the quantizer's two soft conversion directions.

Forward: a Gaussian prediction of an observation turns into per-bit prior
probabilities (exact interval sums vs Monte Carlo).  Backward: per-bit
probabilities moment-match to a Gaussian reconstruction whose variance
reflects exactly which bits are uncertain.
"""

import numpy as np

from statelink import (GaussianBelief, QuantizerSpec, bit_probability_moments,
                       dequantize, exact_bit_priors, mc_bit_priors,
                       quantize_vector)

spec = QuantizerSpec(bits_per_dim=8, xmax=2.0)
print(f"8-bit quantizer over [-2, 2], step {spec.step:.4f}")

y = np.array([0.37])
bits = quantize_vector(y, spec)
print(f"y = {y[0]} -> bits {''.join(map(str, bits))} -> "
      f"reconstruction {dequantize(bits, spec)[0]:.4f}")
print()

# A prediction centered at 0.3 with sigma 0.25: the coarse bits are nearly
# decided, the fine bits are coin flips.
mu, var = 0.3, 0.25**2
exact = exact_bit_priors([(mu, var)], spec)
mc = mc_bit_priors(GaussianBelief([mu], [[var]]), spec, ns=200_000, rng=1)
print("bit priors P(bit=1) given y ~ N(0.3, 0.25^2):")
print("  bit      :", "  ".join(f"{j:6d}" for j in range(8)))
print("  exact    :", "  ".join(f"{p:6.3f}" for p in exact))
print("  monte--c :", "  ".join(f"{p:6.3f}" for p in mc))
print(f"  largest exact-vs-MC gap: {np.max(np.abs(exact - mc)):.4f}")
print()

# Moment matching: flip one mid bit to "unknown" and watch the variance grow
# by exactly that bit's squared positional weight.
certain = exact_bit_priors([(0.3, 1e-12)], spec)
mean_c, var_c = bit_probability_moments(certain, spec)
fuzzy = certain.copy()
fuzzy[2] = 0.5
mean_f, var_f = bit_probability_moments(fuzzy, spec)
w2 = (spec.step * 2 ** (8 - 1 - 2)) ** 2 * 0.25
print("moment-matched reconstruction:")
print(f"  all bits known : mean {mean_c[0]:+.4f}, var {var_c[0]:.3e}")
print(f"  bit 2 unknown  : mean {mean_f[0]:+.4f}, var {var_f[0]:.3e}")
print(f"  variance growth {var_f[0] - var_c[0]:.3e} vs bit-2 weight^2/4 = {w2:.3e}")
