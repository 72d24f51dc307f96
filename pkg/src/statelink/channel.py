"""BPSK over AWGN: modulation, noise, Eb/N0 bookkeeping, soft demodulation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Log-likelihood ratios are log P(b=1)/P(b=0) and saturate here.
LLR_MAX = 50.0


@dataclass(frozen=True)
class ChannelSpec:
    """Real AWGN channel with unit transmit amplitude and noise variance sigma_e2."""

    sigma_e2: float

    def __post_init__(self):
        if not self.sigma_e2 > 0:
            raise ValueError("sigma_e2 must be positive")


def bpsk_modulate(bits: np.ndarray) -> np.ndarray:
    """Map bits {0,1} to symbols {-1,+1}."""
    bits = np.asarray(bits)
    if bits.size and not np.all((bits == 0) | (bits == 1)):
        raise ValueError("bits must be 0/1")
    return 2.0 * bits - 1.0


def awgn(symbols: np.ndarray, spec: ChannelSpec, rng) -> np.ndarray:
    """Add seeded white Gaussian noise of variance sigma_e2 per symbol."""
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    symbols = np.asarray(symbols, dtype=float)
    return symbols + np.sqrt(spec.sigma_e2) * rng.standard_normal(symbols.shape)


def ebn0_to_sigma2(ebn0_db: float, code_rate: float = 1.0) -> float:
    """Noise variance for a given Eb/N0 with Es=1: sigma^2 = 1/(2 R 10^(x/10))."""
    if not 0 < code_rate <= 1:
        raise ValueError("code_rate must lie in (0, 1]")
    return 1.0 / (2.0 * code_rate * 10.0 ** (ebn0_db / 10.0))


def channel_llr(received: np.ndarray, spec: ChannelSpec) -> np.ndarray:
    """Per-symbol LLR 2 r / sigma_e2, saturated at +-LLR_MAX."""
    r = np.asarray(received, dtype=float)
    return np.clip(2.0 * r / spec.sigma_e2, -LLR_MAX, LLR_MAX)


def sigmoid(x) -> np.ndarray:
    """Numerically safe logistic function."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def logit(p) -> np.ndarray:
    """log(p/(1-p)), saturated at +-LLR_MAX."""
    p = np.asarray(p, dtype=float)
    if np.any(p <= 0) or np.any(p >= 1):
        p = np.clip(p, 1e-300, 1 - 1e-16)
    return np.clip(np.log(p) - np.log1p(-p), -LLR_MAX, LLR_MAX)


def posterior_bit_prob(channel_llr_value, prior) -> np.ndarray:
    """Posterior P(b=1) from a channel LLR and a prior probability.

    Equivalent to sigmoid(llr + logit(prior)); written in log-odds form so
    extreme priors and LLRs cannot overflow.
    """
    prior = np.asarray(prior, dtype=float)
    if np.any(prior <= 0) or np.any(prior >= 1):
        raise ValueError("prior must lie strictly inside (0, 1)")
    return sigmoid(np.asarray(channel_llr_value, dtype=float) + logit(prior))
