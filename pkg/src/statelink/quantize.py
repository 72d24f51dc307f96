"""Uniform per-dimension quantization and the bit <-> Gaussian conversions.

Each observation dimension is quantized to B natural-binary bits, MSB first,
over the symmetric range [-xmax, xmax] (out-of-range values clip to the end
cells).  A slot's bit frame is dimension-major: bits [k*B : (k+1)*B] belong
to dimension k.

Two directions of soft conversion connect bits to the Gaussian world:

* priors: given a Gaussian over an observation dimension, the probability
  that each of its bits is 1 (exact interval sums, or Monte Carlo sampling
  of the joint for large B);
* moments: given per-bit probabilities, the mean/variance of the implied
  cell-center reconstruction, treating bits as independent.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gaussian import GaussianBelief, std_normal_cdf_array

# Probabilities are kept away from 0/1 so prior log-odds stay finite.
PRIOR_CLAMP = 1e-6


@dataclass(frozen=True)
class QuantizerSpec:
    """B bits per dimension over [-xmax, xmax], natural binary, MSB first."""

    bits_per_dim: int
    xmax: float

    def __post_init__(self):
        if self.bits_per_dim < 1:
            raise ValueError("bits_per_dim must be >= 1")
        if not self.xmax > 0:
            raise ValueError("xmax must be positive")

    @property
    def levels(self) -> int:
        return 1 << self.bits_per_dim

    @property
    def step(self) -> float:
        return 2.0 * self.xmax / self.levels

    def frame_bits(self, obs_dim: int) -> int:
        return obs_dim * self.bits_per_dim


def quantize_indices(y: np.ndarray, spec: QuantizerSpec) -> np.ndarray:
    """Cell index per dimension, clipping out-of-range values to the end cells."""
    y = np.asarray(y, dtype=float)
    idx = np.floor((y + spec.xmax) / spec.step).astype(np.int64)
    return np.clip(idx, 0, spec.levels - 1)


def indices_to_bits(idx: np.ndarray, spec: QuantizerSpec) -> np.ndarray:
    """Expand indices (...,) to bits (..., B), MSB first.

    Indices up to 16 bits go through a big-endian byte view and
    np.unpackbits, which is much faster than per-bit shifts on the hot
    Monte-Carlo path; wider quantizers fall back to shifting.
    """
    idx = np.asarray(idx)
    B = spec.bits_per_dim
    if B <= 16:
        packed = np.ascontiguousarray(idx.astype(">u2"))
        bits = np.unpackbits(packed.view(np.uint8).reshape(idx.shape + (2,)),
                             axis=-1)
        return bits[..., 16 - B:]
    shifts = np.arange(B - 1, -1, -1, dtype=np.int64)
    return ((idx[..., None].astype(np.int64) >> shifts) & 1).astype(np.uint8)


def bits_to_indices(bits: np.ndarray, spec: QuantizerSpec) -> np.ndarray:
    """Collapse bits (..., B) MSB-first back to indices (...,)."""
    bits = np.asarray(bits, dtype=np.int64)
    weights = 1 << np.arange(spec.bits_per_dim - 1, -1, -1, dtype=np.int64)
    return bits @ weights


def quantize_vector(y: np.ndarray, spec: QuantizerSpec) -> np.ndarray:
    """Quantize a K-vector into a dimension-major bit frame of length K*B."""
    return indices_to_bits(quantize_indices(y, spec), spec).ravel()


def dequantize(frame: np.ndarray, spec: QuantizerSpec) -> np.ndarray:
    """Cell-center reconstruction of a bit frame back to a K-vector."""
    frame = np.asarray(frame)
    B = spec.bits_per_dim
    if frame.size % B != 0:
        raise ValueError(f"frame length {frame.size} is not a multiple of {B}")
    idx = bits_to_indices(frame.reshape(-1, B), spec)
    return -spec.xmax + (idx + 0.5) * spec.step


def cell_centers(spec: QuantizerSpec) -> np.ndarray:
    return -spec.xmax + (np.arange(spec.levels) + 0.5) * spec.step


def exact_bit_priors(marginals, spec: QuantizerSpec) -> np.ndarray:
    """P(bit=1) per bit from per-dimension scalar Gaussians, by interval sums.

    marginals: sequence of (mean, variance) pairs or scalar GaussianBelief,
    one per observation dimension.  The two extreme cells absorb the clipped
    tails.  Cost is O(2^B) per dimension; intended for B <= ~10 and tests.
    Returns probabilities clamped to [PRIOR_CLAMP, 1 - PRIOR_CLAMP].
    """
    B = spec.bits_per_dim
    out = []
    for m in marginals:
        if isinstance(m, GaussianBelief):
            mu, var = float(m.mean[0]), float(m.cov[0, 0])
        else:
            mu, var = float(m[0]), float(m[1])
        if not var > 0:
            raise ValueError("marginal variance must be positive")
        sigma = np.sqrt(var)
        # CDF at every interior cell edge; tails absorbed by the end cells.
        edges = -spec.xmax + np.arange(1, spec.levels) * spec.step
        cdf = np.empty(spec.levels + 1)
        cdf[0], cdf[-1] = 0.0, 1.0
        cdf[1:-1] = std_normal_cdf_array((edges - mu) / sigma)
        probs = np.empty(B)
        for j in range(B):
            # Cells with bit j (MSB first) set form 2^j runs of length 2^(B-1-j).
            run = 1 << (B - 1 - j)
            starts = (2 * np.arange(1 << j) + 1) * run
            probs[j] = np.sum(cdf[starts + run] - cdf[starts])
        out.append(probs)
    return np.clip(np.concatenate(out), PRIOR_CLAMP, 1.0 - PRIOR_CLAMP)


def mc_bit_priors(g: GaussianBelief, spec: QuantizerSpec, ns: int, rng) -> np.ndarray:
    """Empirical P(bit=1) from ns samples of a (joint) observation Gaussian.

    rng may be a seed or a numpy Generator.  Sampling uses an eigh-based
    covariance square root so degenerate (rank-deficient) Gaussians work.
    """
    if ns < 1:
        raise ValueError("ns must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    vals, vecs = np.linalg.eigh(g.cov)
    root = vecs * np.sqrt(np.clip(vals, 0.0, None))
    samples = g.mean + rng.standard_normal((ns, g.dim)) @ root.T
    bits = indices_to_bits(quantize_indices(samples, spec), spec)
    freq = bits.reshape(ns, -1).mean(axis=0)
    return np.clip(freq, PRIOR_CLAMP, 1.0 - PRIOR_CLAMP)


def bit_probability_moments(bit_probs: np.ndarray, spec: QuantizerSpec):
    """Mean and variance per dimension of the reconstruction implied by bit probabilities.

    Bits are treated as independent.  With w_j the positional weight of bit j,
    the index has mean sum(p_j w_j) and variance sum(w_j^2 p_j (1-p_j));
    both map affinely to reconstruction units.  The variance is floored at
    step^2/12 (a deterministic cell still carries quantization noise).
    Returns (means (K,), variances (K,)).
    """
    p = np.asarray(bit_probs, dtype=float)
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError("bit probabilities must lie in [0, 1]")
    B = spec.bits_per_dim
    if p.size % B != 0:
        raise ValueError(f"probability vector length {p.size} is not a multiple of {B}")
    p = p.reshape(-1, B)
    w = (1 << np.arange(B - 1, -1, -1, dtype=np.int64)).astype(float)
    mean_idx = p @ w
    var_idx = (p * (1.0 - p)) @ (w * w)
    means = -spec.xmax + spec.step * (mean_idx + 0.5)
    variances = np.maximum(spec.step**2 * var_idx, spec.step**2 / 12.0)
    return means, variances
