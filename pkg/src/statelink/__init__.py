"""statelink: state estimation for linear systems observed through
quantized, noisy digital links.

The temporal redundancy of the system dynamics acts as an implicit channel
code; the receivers here exploit it to different degrees: a separated
Kalman filter, a Kalman-prediction-aided soft demodulator, and an iterative
belief-propagation decoder over a sliding two-slot window.
"""

from .channel import (ChannelSpec, LLR_MAX, awgn, bpsk_modulate, channel_llr,
                      ebn0_to_sigma2, logit, posterior_bit_prob, sigmoid)
from .coding import RscCode, logmap_decode, rsc_encode
from .gaussian import (DegenerateProductError, GaussianBelief, affine_propagate,
                       gaussian_product, marginal, std_normal_cdf)
from .harness import (CellMetrics, ConfigError, ExperimentConfig, MetricsReport,
                      emit_report, run_experiment, sweep_ebn0, transmit)
from .kalman import kf_predict, kf_update
from .quantize import (QuantizerSpec, bit_probability_moments, dequantize,
                       exact_bit_priors, mc_bit_priors, quantize_vector)
from .receivers import (BpWindowState, CodedDemodulator, LinkRecord, SlotMessages,
                        SlotResult, TrialCollapse, UncodedDemodulator,
                        bp_b_to_y, bp_combine_and_believe, bp_forward_pi,
                        bp_lambda_backward, bp_lambda_y_to_x, bp_y_to_b,
                        default_initial_belief, run_baseline_kf,
                        run_kf_with_prior, run_pearl_bp)
from .statespace import (GENERATOR7_CONTINUOUS, StateSpaceModel, Trajectory,
                         build_generator_model, simulate)

__version__ = "0.1.0"

__all__ = [
    "BpWindowState", "CellMetrics", "ChannelSpec", "CodedDemodulator",
    "ConfigError", "DegenerateProductError", "ExperimentConfig",
    "GENERATOR7_CONTINUOUS", "GaussianBelief", "LLR_MAX", "LinkRecord",
    "MetricsReport", "QuantizerSpec", "RscCode", "SlotMessages", "SlotResult",
    "StateSpaceModel", "Trajectory", "TrialCollapse", "UncodedDemodulator",
    "affine_propagate", "awgn", "bit_probability_moments", "bp_b_to_y",
    "bp_combine_and_believe", "bp_forward_pi", "bp_lambda_backward",
    "bp_lambda_y_to_x", "bp_y_to_b", "bpsk_modulate", "build_generator_model",
    "channel_llr", "default_initial_belief", "dequantize", "ebn0_to_sigma2",
    "emit_report", "exact_bit_priors", "gaussian_product", "kf_predict",
    "kf_update", "logit", "logmap_decode", "marginal", "mc_bit_priors",
    "posterior_bit_prob", "quantize_vector", "rsc_encode", "run_baseline_kf",
    "run_experiment", "run_kf_with_prior", "run_pearl_bp", "sigmoid",
    "simulate", "std_normal_cdf", "sweep_ebn0", "transmit",
]
