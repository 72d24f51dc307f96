"""The three end-to-end receivers: separated KF, KF with demodulation prior,
and iterative belief-propagation decoding over a sliding two-slot window.

All three consume a LinkRecord (per-slot channel LLRs plus ground truth for
scoring) and emit one SlotResult per slot.

The belief-propagation receiver keeps two active slots.  Per new slot it
runs an 11-step asynchronous schedule `iterations` times:

  1)    older state -> its observation (forward pi message)
  2-3)  observation -> bits -> observation (demodulate with Gaussian-derived
        bit priors, moment-match the extrinsic bit probabilities back to a
        per-dimension Gaussian likelihood)
  4)    observation -> state (likelihood message into the state node)
  5)    older state -> newer state (forward pi handoff)
  6-9)  the same four moves on the newer slot
  10)   newer state -> older state (backward likelihood message)
  11)   older state updates its belief

After the final iteration the older slot's belief (one-lag smoothed) is its
reported estimate, and the step-5 product is frozen as the summary message
for the next window.  Vacuous likelihood messages are represented as None,
never as zero-variance Gaussians.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import LLR_MAX, logit, sigmoid
from .coding import RscCode, logmap_decode
from .gaussian import (DegenerateProductError, GaussianBelief,
                       affine_propagate, gaussian_product, symmetrize)
from .kalman import kf_predict, kf_update
from .quantize import (QuantizerSpec, bit_probability_moments, dequantize,
                       exact_bit_priors, mc_bit_priors)
from .statespace import StateSpaceModel

# Model matrices fed to the solve-based message steps must be invertible.
BP_CONDITION_LIMIT = 1e9


class TrialCollapse(RuntimeError):
    """A receiver aborted a trial on a degenerate message product."""

    def __init__(self, slot: int, receiver: str, cause: Exception):
        super().__init__(f"{receiver} collapsed at slot {slot}: {cause}")
        self.slot = slot
        self.receiver = receiver


@dataclass(frozen=True)
class SlotResult:
    state_estimate: np.ndarray
    state_cov: np.ndarray
    decoded_bits: np.ndarray
    true_state: np.ndarray
    true_bits: np.ndarray

    def squared_error(self) -> float:
        d = self.state_estimate - self.true_state
        return float(d @ d)

    def bit_errors(self) -> int:
        return int(np.sum(self.decoded_bits != self.true_bits))


@dataclass(frozen=True)
class LinkRecord:
    """One trial's transmission: ground truth plus received channel LLRs."""

    true_states: np.ndarray    # (T, N)
    observations: np.ndarray   # (T, K)
    true_bits: np.ndarray      # (T, K*B)
    channel_llrs: np.ndarray   # (T, L); L = K*B uncoded, 2*(K*B+memory) coded

    @property
    def slots(self) -> int:
        return self.true_states.shape[0]


# ---------------------------------------------------------------------------
# Demodulation front ends (shared by all receivers)

class UncodedDemodulator:
    """Identity 'decoder': posterior LLR = channel LLR + prior LLR."""

    def decode(self, channel_llrs: np.ndarray, prior_llrs: np.ndarray) -> np.ndarray:
        return np.clip(channel_llrs + prior_llrs, -LLR_MAX, LLR_MAX)


class CodedDemodulator:
    """Log-MAP front end for the rate-1/2 RSC."""

    def __init__(self, code: RscCode):
        self.code = code

    def decode(self, channel_llrs: np.ndarray, prior_llrs: np.ndarray) -> np.ndarray:
        posterior, _ = logmap_decode(channel_llrs, prior_llrs, self.code)
        return posterior


def default_initial_belief(model: StateSpaceModel, cov_scale: float = 10.0) -> GaussianBelief:
    """Weakly informative prior on the initial state."""
    n = model.state_dim
    return GaussianBelief(np.zeros(n), cov_scale * np.eye(n))


def observation_bit_priors(obs_gauss: GaussianBelief, spec: QuantizerSpec,
                           method: str, ns: int, rng) -> np.ndarray:
    """Bit priors from a predicted observation Gaussian.

    "exact" sums Gaussian mass over quantizer cells per dimension (marginals
    only); "monte-carlo" samples the joint, which is the only tractable
    route at 16 bits per dimension.
    """
    if method == "exact":
        pairs = [(obs_gauss.mean[k], obs_gauss.cov[k, k]) for k in range(obs_gauss.dim)]
        return exact_bit_priors(pairs, spec)
    if method == "monte-carlo":
        return mc_bit_priors(obs_gauss, spec, ns, rng)
    raise ValueError(f"unknown prior method {method!r}")


# ---------------------------------------------------------------------------
# Belief-propagation message steps

def bp_forward_pi(prev_pi_out: GaussianBelief, model: StateSpaceModel,
                  lambda_bwd: GaussianBelief | None = None):
    """Step 1/6: propagate the incoming pi message through the dynamics.

    Returns (pi_local, pi_to_y).  pi_to_y additionally folds in the backward
    likelihood message when one exists (it is vacuous on the first pass of
    every window and always vacuous for the newest slot).
    """
    pi_local = affine_propagate(prev_pi_out, model.A, model.proc_noise_cov)
    pi_to_y = pi_local if lambda_bwd is None else gaussian_product(pi_local, lambda_bwd)
    return pi_local, pi_to_y


def bp_y_to_b(pi_to_y: GaussianBelief, model: StateSpaceModel, spec: QuantizerSpec,
              method: str = "exact", ns: int = 2048, rng=None) -> np.ndarray:
    """Step 2/7: predicted observation Gaussian -> per-bit prior probabilities."""
    obs_gauss = affine_propagate(pi_to_y, model.C, model.obs_noise_cov)
    return observation_bit_priors(obs_gauss, spec, method, ns, rng)


def bp_b_to_y(channel_llrs: np.ndarray, bit_priors: np.ndarray, spec: QuantizerSpec,
              demod=None):
    """Step 3/8: demodulate/decode, then moment-match the extrinsic bit
    probabilities to one Gaussian per observation dimension.

    The prior is excluded from the moment-matched message (posterior minus
    prior in the log-odds domain) so it is not counted twice when the
    message is multiplied back into the state belief.

    Returns (y_lambda_means, y_lambda_vars, posterior_probs).
    """
    demod = demod or UncodedDemodulator()
    prior_llrs = logit(bit_priors)
    posterior_llrs = demod.decode(channel_llrs, prior_llrs)
    extrinsic_probs = sigmoid(posterior_llrs - prior_llrs)
    means, variances = bit_probability_moments(extrinsic_probs, spec)
    return means, variances, sigmoid(posterior_llrs)


def bp_lambda_y_to_x(y_lambda_means: np.ndarray, y_lambda_vars: np.ndarray,
                     model: StateSpaceModel) -> GaussianBelief:
    """Step 4/9: per-dimension observation likelihoods -> state-space likelihood.

    mean = C^-1 y,  cov = C^-1 (S + obs_noise) C^-T, computed with solves.
    """
    C = model.C
    if np.linalg.cond(C) > BP_CONDITION_LIMIT:
        raise ValueError("observation matrix C is not invertible enough for BP")
    k = symmetrize(np.diag(np.asarray(y_lambda_vars, dtype=float)) + model.obs_noise_cov)
    mean = np.linalg.solve(C, np.asarray(y_lambda_means, dtype=float))
    half = np.linalg.solve(C, k)                      # C^-1 K
    cov = symmetrize(np.linalg.solve(C, half.T).T)    # (C^-1 K) C^-T
    return GaussianBelief(mean, cov)


def bp_combine_and_believe(pi_local: GaussianBelief,
                           lambda_y: GaussianBelief | None,
                           lambda_bwd: GaussianBelief | None):
    """Step 5/11: forward handoff and belief.

    pi_fwd_out = pi_local * lambda_y (vacuous lambda_y leaves pi_local);
    belief multiplies in whichever likelihood messages are present.
    """
    pi_fwd = pi_local if lambda_y is None else gaussian_product(pi_local, lambda_y)
    belief = pi_fwd if lambda_bwd is None else gaussian_product(pi_fwd, lambda_bwd)
    return pi_fwd, belief


def bp_lambda_backward(lambda_y_at_t: GaussianBelief,
                       model: StateSpaceModel) -> GaussianBelief:
    """Step 10: pull the newer slot's likelihood back through the dynamics.

    mean = A^-1 x,  cov = A^-1 (proc_noise + P) A^-T, via solves.
    """
    A = model.A
    if np.linalg.cond(A) > BP_CONDITION_LIMIT:
        raise ValueError("transition matrix A is not invertible enough for BP")
    mean = np.linalg.solve(A, lambda_y_at_t.mean)
    half = np.linalg.solve(A, symmetrize(model.proc_noise_cov + lambda_y_at_t.cov))
    cov = symmetrize(np.linalg.solve(A, half.T).T)    # (A^-1 K) A^-T
    return GaussianBelief(mean, cov)


@dataclass
class SlotMessages:
    """Live messages of one active slot in the BP window."""

    pi_local: GaussianBelief | None = None
    lambda_y: GaussianBelief | None = None
    y_lambda_means: np.ndarray | None = None
    y_lambda_vars: np.ndarray | None = None
    bit_priors: np.ndarray | None = None
    bit_posteriors: np.ndarray | None = None
    belief: GaussianBelief | None = None


@dataclass
class BpWindowState:
    """The two active slots plus the frozen summary message feeding them."""

    prev_summary: GaussianBelief
    older: SlotMessages | None = None
    newer: SlotMessages | None = None
    lambda_bwd: GaussianBelief | None = None
    pi_fwd: GaussianBelief | None = None


# ---------------------------------------------------------------------------
# End-to-end receivers

def _hard_bits(posterior_probs: np.ndarray) -> np.ndarray:
    return (posterior_probs > 0.5).astype(np.uint8)


def _slot_result(belief: GaussianBelief, bits: np.ndarray, record: LinkRecord,
                 t: int) -> SlotResult:
    return SlotResult(
        state_estimate=belief.mean,
        state_cov=belief.cov,
        decoded_bits=bits,
        true_state=record.true_states[t],
        true_bits=record.true_bits[t],
    )


def run_baseline_kf(model: StateSpaceModel, spec: QuantizerSpec, record: LinkRecord,
                    demod=None, init_belief: GaussianBelief | None = None):
    """Separated receiver: demodulate/decode without priors, then Kalman filter."""
    demod = demod or UncodedDemodulator()
    belief = init_belief or default_initial_belief(model)
    n_info = spec.frame_bits(model.obs_dim)
    flat_prior = np.zeros(n_info)
    results = []
    for t in range(record.slots):
        posterior = demod.decode(record.channel_llrs[t], flat_prior)
        bits = (posterior > 0).astype(np.uint8)
        y_hat = dequantize(bits, spec)
        prior_belief = belief if t == 0 else kf_predict(belief, model)
        try:
            belief = kf_update(prior_belief, y_hat, model)
        except DegenerateProductError as exc:
            raise TrialCollapse(t, "kf", exc) from exc
        results.append(_slot_result(belief, bits, record, t))
    return results


def run_kf_with_prior(model: StateSpaceModel, spec: QuantizerSpec, record: LinkRecord,
                      demod=None, init_belief: GaussianBelief | None = None,
                      prior_method: str = "monte-carlo", ns: int = 2048, rng=None):
    """One-shot prior-aided receiver: the Kalman prediction supplies bit
    priors for demodulation, the hard-decided reconstruction feeds the
    Kalman update.  No iteration."""
    demod = demod or UncodedDemodulator()
    belief = init_belief or default_initial_belief(model)
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    results = []
    for t in range(record.slots):
        prior_belief = belief if t == 0 else kf_predict(belief, model)
        try:
            obs_gauss = affine_propagate(prior_belief, model.C, model.obs_noise_cov)
            xi = observation_bit_priors(obs_gauss, spec, prior_method, ns, rng)
            posterior = demod.decode(record.channel_llrs[t], logit(xi))
            bits = (posterior > 0).astype(np.uint8)
            y_hat = dequantize(bits, spec)
            belief = kf_update(prior_belief, y_hat, model)
        except DegenerateProductError as exc:
            raise TrialCollapse(t, "kf-prior", exc) from exc
        results.append(_slot_result(belief, bits, record, t))
    return results


def run_pearl_bp(model: StateSpaceModel, spec: QuantizerSpec, record: LinkRecord,
                 demod=None, init_belief: GaussianBelief | None = None,
                 iterations: int = 3, prior_method: str = "monte-carlo",
                 ns: int = 2048, rng=None, window_hook=None):
    """Sliding-window belief propagation receiver.

    Slot t-1's final (one-lag smoothed) belief is reported when the window
    over (t-1, t) closes; the last slot reports its provisional belief.
    window_hook, if given, is called with (t, BpWindowState) after each
    window closes (introspection for tests and diagnostics).
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    demod = demod or UncodedDemodulator()
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    init_belief = init_belief or default_initial_belief(model)

    def demod_slot(pi_to_y, t):
        xi = bp_y_to_b(pi_to_y, model, spec, prior_method, ns, rng)
        means, variances, post = bp_b_to_y(record.channel_llrs[t], xi, spec, demod)
        lam_y = bp_lambda_y_to_x(means, variances, model)
        return SlotMessages(lambda_y=lam_y, y_lambda_means=means,
                            y_lambda_vars=variances, bit_priors=xi,
                            bit_posteriors=post)

    results: list[SlotResult | None] = [None] * record.slots
    window = BpWindowState(prev_summary=init_belief)

    # Bootstrap slot 0: its pi_local is the source prior itself.
    try:
        first = demod_slot(init_belief, 0)
        first.pi_local = init_belief
        _, first.belief = bp_combine_and_believe(first.pi_local, first.lambda_y, None)
    except DegenerateProductError as exc:
        raise TrialCollapse(0, "pearl-bp", exc) from exc
    window.older = first
    if record.slots == 1:
        results[0] = _slot_result(first.belief, _hard_bits(first.bit_posteriors),
                                  record, 0)
        return results

    for t in range(1, record.slots):
        older = window.older
        window.lambda_bwd = None
        try:
            for _ in range(iterations):
                # Steps 1-4: re-demodulate the older slot.  Its local pi is
                # frozen (step 1 happened at the previous handoff); the
                # backward message joins its demodulation prior after the
                # first pass.
                if window.lambda_bwd is None:
                    pi_to_y = older.pi_local
                else:
                    pi_to_y = gaussian_product(older.pi_local, window.lambda_bwd)
                refreshed = demod_slot(pi_to_y, t - 1)
                refreshed.pi_local = older.pi_local
                older = refreshed
                # Step 5: forward handoff (excludes the backward message).
                pi_fwd, _ = bp_combine_and_believe(older.pi_local, older.lambda_y, None)
                # Steps 6-9: the newer slot, whose backward side is vacuous.
                pi_local_new, pi_to_y_new = bp_forward_pi(pi_fwd, model, None)
                newer = demod_slot(pi_to_y_new, t)
                newer.pi_local = pi_local_new
                # Step 10: backward message from the newer slot.
                window.lambda_bwd = bp_lambda_backward(newer.lambda_y, model)
                # Step 11: the older slot's belief.
                _, older.belief = bp_combine_and_believe(older.pi_local, older.lambda_y,
                                                         window.lambda_bwd)
                window.older = older
                window.pi_fwd = pi_fwd
                window.newer = newer
        except DegenerateProductError as exc:
            raise TrialCollapse(t, "pearl-bp", exc) from exc

        results[t - 1] = _slot_result(older.belief, _hard_bits(older.bit_posteriors),
                                      record, t - 1)
        if window_hook is not None:
            window_hook(t, window)
        # Slide: the step-5 product becomes the frozen summary into slot t.
        window.prev_summary = window.pi_fwd
        window.older = window.newer
        window.lambda_bwd = None

    newest = window.older
    _, provisional = bp_combine_and_believe(newest.pi_local, newest.lambda_y, None)
    results[-1] = _slot_result(provisional, _hard_bits(newest.bit_posteriors),
                               record, record.slots - 1)
    return results
