"""Rate-1/2 recursive systematic convolutional code with an exact Log-MAP decoder.

The encoder is systematic-plus-parity with a feedback shift register; output
order per step is (systematic, parity), followed by `memory` termination
pairs that drive the register back to zero (the termination inputs are
transmitted but are not information bits).

Polynomials are integers with bit i holding the coefficient of D^i, e.g.
0o7 = 1 + D + D^2 (feedback) and 0o5 = 1 + D^2 (feedforward) for the default
memory-2 code.

The decoder is the full forward/backward trellis recursion in the log
domain with exact max* (log-sum-exp), returning per-bit posterior LLRs and
extrinsic LLRs (posterior minus systematic channel LLR minus prior).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import LLR_MAX


@dataclass(frozen=True)
class RscCode:
    feedback_poly: int = 0o7
    feedforward_poly: int = 0o5
    terminated: bool = True

    def __post_init__(self):
        if self.feedback_poly & 1 == 0:
            raise ValueError("feedback polynomial must have a nonzero constant term")
        if self.feedforward_poly == 0:
            raise ValueError("feedforward polynomial must be nonzero")

    @property
    def memory(self) -> int:
        return max(self.feedback_poly.bit_length(), self.feedforward_poly.bit_length()) - 1

    @property
    def num_states(self) -> int:
        return 1 << self.memory

    def coded_length(self, num_info: int) -> int:
        return 2 * (num_info + (self.memory if self.terminated else 0))


class _Trellis:
    """Precomputed transition tables for one code."""

    def __init__(self, code: RscCode):
        mem, ns = code.memory, code.num_states
        fb_taps = code.feedback_poly >> 1          # taps on m1..m_mem
        ff_const = code.feedforward_poly & 1       # tap on the feedback bit a
        ff_taps = code.feedforward_poly >> 1
        nxt = np.zeros((ns, 2), dtype=np.int64)
        par = np.zeros((ns, 2), dtype=np.int64)
        tail = np.zeros(ns, dtype=np.int64)
        for s in range(ns):
            fb = bin(s & fb_taps).count("1") & 1
            for u in (0, 1):
                a = u ^ fb
                p = (ff_const & a) ^ (bin(s & ff_taps).count("1") & 1)
                nxt[s, u] = ((s << 1) | a) & (ns - 1)
                par[s, u] = p
            tail[s] = fb
        # Two predecessors per state in a binary trellis.
        pred_s = np.zeros((ns, 2), dtype=np.int64)
        pred_u = np.zeros((ns, 2), dtype=np.int64)
        fill = [0] * ns
        for s in range(ns):
            for u in (0, 1):
                sp = nxt[s, u]
                pred_s[sp, fill[sp]] = s
                pred_u[sp, fill[sp]] = u
                fill[sp] += 1
        assert fill == [2] * ns
        self.next_state, self.parity, self.tail_input = nxt, par, tail
        self.pred_state, self.pred_input = pred_s, pred_u


_TRELLIS_CACHE: dict[tuple[int, int], _Trellis] = {}


def _trellis(code: RscCode) -> _Trellis:
    key = (code.feedback_poly, code.feedforward_poly)
    if key not in _TRELLIS_CACHE:
        _TRELLIS_CACHE[key] = _Trellis(code)
    return _TRELLIS_CACHE[key]


def rsc_encode(info: np.ndarray, code: RscCode) -> np.ndarray:
    """Encode info bits; output (sys0, par0, sys1, par1, ..., tail pairs)."""
    info = np.asarray(info)
    if info.size == 0:
        raise ValueError("info must be nonempty")
    if not np.all((info == 0) | (info == 1)):
        raise ValueError("info bits must be 0/1")
    tre = _trellis(code)
    out = np.empty(code.coded_length(info.size), dtype=np.uint8)
    s = 0
    k = 0
    for u in info.astype(np.int64):
        out[k] = u
        out[k + 1] = tre.parity[s, u]
        s = tre.next_state[s, u]
        k += 2
    if code.terminated:
        for _ in range(code.memory):
            u = tre.tail_input[s]
            out[k] = u
            out[k + 1] = tre.parity[s, u]
            s = tre.next_state[s, u]
            k += 2
    return out


def logmap_decode(channel_llrs: np.ndarray, prior_llrs: np.ndarray, code: RscCode):
    """Exact Log-MAP over one terminated block.

    channel_llrs: per coded bit (sys/par interleaved), length 2*(K+memory).
    prior_llrs: per info bit, length K.
    Returns (posterior_llrs, extrinsic_llrs) over the K info bits, both
    saturated at +-LLR_MAX.
    """
    ch = np.asarray(channel_llrs, dtype=float)
    prior = np.asarray(prior_llrs, dtype=float)
    K = prior.size
    tre = _trellis(code)
    mem, ns = code.memory, code.num_states
    steps = K + (mem if code.terminated else 0)
    if ch.size != 2 * steps:
        raise ValueError(f"expected {2 * steps} channel LLRs, got {ch.size}")
    lsys, lpar = ch[0::2], ch[1::2]

    # Branch metrics: gamma[t,s,u] = u*(Lsys+prior) + parity*Lpar for info
    # steps; tail steps force u to the terminating input.
    gamma = tre.parity[None, :, :] * lpar[:, None, None]
    gamma[:K, :, 1] += (lsys[:K] + prior)[:, None]
    states = np.arange(ns)
    for t in range(K, steps):
        gamma[t, states, tre.tail_input] += tre.tail_input * lsys[t]
        gamma[t, states, 1 - tre.tail_input] = -np.inf

    alpha = np.full((steps + 1, ns), -np.inf)
    alpha[0, 0] = 0.0
    for t in range(steps):
        cand = alpha[t, tre.pred_state] + gamma[t, tre.pred_state, tre.pred_input]
        alpha[t + 1] = np.logaddexp(cand[:, 0], cand[:, 1])

    beta = np.full((steps + 1, ns), -np.inf)
    if code.terminated:
        beta[steps, 0] = 0.0
    else:
        beta[steps, :] = 0.0
    for t in range(steps - 1, -1, -1):
        cand = beta[t + 1, tre.next_state] + gamma[t]
        beta[t] = np.logaddexp(cand[:, 0], cand[:, 1])

    # Per-branch scores for the info steps, reduced over states per input.
    t_idx = np.arange(K)[:, None, None]
    score = alpha[:K, :, None] + gamma[:K] + beta[t_idx + 1, tre.next_state[None, :, :]]
    posterior = np.logaddexp.reduce(score[:, :, 1], axis=1) \
        - np.logaddexp.reduce(score[:, :, 0], axis=1)
    extrinsic = posterior - lsys[:K] - prior
    return (np.clip(posterior, -LLR_MAX, LLR_MAX),
            np.clip(extrinsic, -LLR_MAX, LLR_MAX))
