"""Quantizer, bit priors, and moment matching against enumeration oracles."""

import numpy as np
import pytest

from statelink.gaussian import GaussianBelief
from statelink.quantize import (PRIOR_CLAMP, QuantizerSpec, bit_probability_moments,
                                cell_centers, dequantize, exact_bit_priors,
                                mc_bit_priors, quantize_indices, quantize_vector)


def cell_masses_by_quadrature(mu, sigma, spec, points_per_cell=4001):
    """Gaussian mass in every quantizer cell by composite Simpson quadrature,
    with the end cells absorbing the tails out to mu +- 12 sigma."""
    edges = -spec.xmax + np.arange(spec.levels + 1) * spec.step
    masses = np.empty(spec.levels)
    for i in range(spec.levels):
        a = edges[i] if i > 0 else min(edges[0], mu - 12 * sigma)
        b = edges[i + 1] if i < spec.levels - 1 else max(edges[-1], mu + 12 * sigma)
        xs = np.linspace(a, b, points_per_cell)
        pdf = np.exp(-0.5 * ((xs - mu) / sigma) ** 2) / (sigma * np.sqrt(2 * np.pi))
        h = xs[1] - xs[0]
        weights = np.ones(points_per_cell)
        weights[1:-1:2], weights[2:-1:2] = 4.0, 2.0
        masses[i] = h / 3.0 * (weights @ pdf)
    return masses


def bit_patterns(spec):
    idx = np.arange(spec.levels)
    shifts = np.arange(spec.bits_per_dim - 1, -1, -1)
    return (idx[:, None] >> shifts) & 1


class TestQuantizeDequantize:
    def test_range_minimum_is_all_zero(self):
        spec = QuantizerSpec(16, 200.0)
        assert np.all(quantize_vector(np.array([-200.0]), spec) == 0)

    def test_two_bit_example(self):
        spec = QuantizerSpec(2, 2.0)
        assert spec.step == 1.0
        assert list(quantize_vector(np.array([0.3]), spec)) == [1, 0]

    def test_roundtrip_error_within_half_step(self):
        spec = QuantizerSpec(8, 100.0)
        rng = np.random.default_rng(4)
        y = rng.uniform(-100, 100, size=10_000)
        back = dequantize(quantize_vector(y, spec), spec)
        assert np.max(np.abs(back - y)) <= spec.step / 2 + 1e-12

    def test_dequantize_all_zero_frame(self):
        spec = QuantizerSpec(16, 200.0)
        y = dequantize(np.zeros(16, dtype=np.uint8), spec)
        assert y[0] == pytest.approx(-199.9969482421875, abs=1e-12)

    def test_first_cell_above_zero(self):
        spec = QuantizerSpec(8, 50.0)
        frame = np.zeros(8, dtype=np.uint8)
        frame[0] = 1  # MSB set -> index 2^(B-1)
        assert dequantize(frame, spec)[0] == pytest.approx(spec.step / 2, abs=1e-13)

    def test_monotone_per_dimension(self):
        spec = QuantizerSpec(6, 3.0)
        y = np.sort(np.random.default_rng(1).uniform(-4, 4, size=500))
        idx = quantize_indices(y, spec)
        assert np.all(np.diff(idx) >= 0)

    def test_clipping(self):
        spec = QuantizerSpec(5, 1.0)
        assert quantize_indices(np.array([-7.0]), spec)[0] == 0
        assert quantize_indices(np.array([9.0]), spec)[0] == spec.levels - 1

    def test_dimension_major_layout(self):
        spec = QuantizerSpec(3, 4.0)
        y = np.array([-4.0, 3.9])
        frame = quantize_vector(y, spec)
        assert list(frame[:3]) == [0, 0, 0]
        assert list(frame[3:]) == [1, 1, 1]

    def test_length_mismatch_raises(self):
        with pytest.raises(ValueError):
            dequantize(np.zeros(7, dtype=np.uint8), QuantizerSpec(3, 1.0))


class TestExactBitPriors:
    def test_symmetric_single_bit(self):
        spec = QuantizerSpec(1, 1.0)
        p = exact_bit_priors([(0.0, 1.0)], spec)
        assert p[0] == pytest.approx(0.5, abs=1e-12)

    def test_point_mass_hits_clamp(self):
        spec = QuantizerSpec(4, 2.0)
        centers = cell_centers(spec)
        target = 11
        p = exact_bit_priors([(centers[target], 1e-18)], spec)
        pattern = bit_patterns(spec)[target]
        expected = np.where(pattern == 1, 1.0 - PRIOR_CLAMP, PRIOR_CLAMP)
        assert np.allclose(p, expected, atol=1e-15)

    def test_matches_per_cell_quadrature(self):
        spec = QuantizerSpec(4, 2.0)
        mu, sigma = 0.3, 0.7
        masses = cell_masses_by_quadrature(mu, sigma, spec)
        patterns = bit_patterns(spec)
        expected = np.clip(patterns.T @ masses, PRIOR_CLAMP, 1 - PRIOR_CLAMP)
        got = exact_bit_priors([(mu, sigma**2)], spec)
        assert np.max(np.abs(got - expected)) < 1e-9

    def test_nonpositive_variance_rejected(self):
        with pytest.raises(ValueError):
            exact_bit_priors([(0.0, 0.0)], QuantizerSpec(2, 1.0))


class TestMcBitPriors:
    def test_degenerate_matches_exact(self):
        spec = QuantizerSpec(4, 2.0)
        center = cell_centers(spec)[5]
        g = GaussianBelief([center], [[0.0]])
        mc = mc_bit_priors(g, spec, 100, rng=np.random.default_rng(0))
        exact = exact_bit_priors([(center, 1e-18)], spec)
        assert np.allclose(mc, exact, atol=1e-15)

    def test_within_binomial_bounds_of_exact(self):
        spec = QuantizerSpec(8, 2.0)
        ns = 100_000
        for mu, var in ((0.3, 0.49), (-1.2, 0.04), (0.0, 4.0)):
            exact = exact_bit_priors([(mu, var)], spec)
            mc = mc_bit_priors(GaussianBelief([mu], [[var]]), spec, ns,
                               rng=np.random.default_rng(12))
            bound = 4 * np.sqrt(exact * (1 - exact) / ns) + 2 * PRIOR_CLAMP
            assert np.all(np.abs(mc - exact) <= bound)

    def test_single_sample_sits_at_clamp(self):
        spec = QuantizerSpec(3, 1.0)
        g = GaussianBelief([0.2], [[0.5]])
        p = mc_bit_priors(g, spec, 1, rng=np.random.default_rng(3))
        assert np.all((p == PRIOR_CLAMP) | (p == 1 - PRIOR_CLAMP))

    def test_joint_correlation_respected(self):
        # Perfectly correlated 2-D Gaussian: both dims quantize identically.
        spec = QuantizerSpec(4, 2.0)
        cov = np.array([[0.25, 0.25], [0.25, 0.25]])
        g = GaussianBelief([0.1, 0.1], cov)
        p = mc_bit_priors(g, spec, 5000, rng=np.random.default_rng(8))
        assert np.allclose(p[:4], p[4:], atol=1e-12)


class TestBitProbabilityMoments:
    def test_deterministic_cell(self):
        spec = QuantizerSpec(5, 3.0)
        target = 19
        bits = bit_patterns(spec)[target].astype(float)
        mean, var = bit_probability_moments(bits, spec)
        assert mean[0] == pytest.approx(cell_centers(spec)[target], abs=1e-13)
        assert var[0] == pytest.approx(spec.step**2 / 12, abs=1e-16)

    def test_uniform_bits_two_bit_case(self):
        spec = QuantizerSpec(2, 2.0)
        mean, var = bit_probability_moments([0.5, 0.5], spec)
        assert mean[0] == pytest.approx(0.0, abs=1e-14)
        assert var[0] == pytest.approx(1.25, abs=1e-14)

    def test_matches_exhaustive_enumeration(self):
        spec = QuantizerSpec(6, 2.0)
        rng = np.random.default_rng(14)
        for _ in range(5):
            p = rng.uniform(0.02, 0.98, size=6)
            mean, var = bit_probability_moments(p, spec)
            patterns = bit_patterns(spec)
            cell_p = np.prod(np.where(patterns == 1, p, 1 - p), axis=1)
            centers = cell_centers(spec)
            mu = centers @ cell_p
            vr = (centers - mu) ** 2 @ cell_p
            assert mean[0] == pytest.approx(mu, abs=1e-12)
            assert var[0] == pytest.approx(max(vr, spec.step**2 / 12), abs=1e-12)

    def test_reconstruction_mean_consistency(self):
        # Mean of the moment-matched reconstruction equals the mean of the
        # truncated+quantized Gaussian (linearity holds despite bit
        # dependence); tolerance covers the prior clamp only.
        spec = QuantizerSpec(8, 2.0)
        mu, sigma = 0.4, 0.6
        priors = exact_bit_priors([(mu, sigma**2)], spec)
        mean, _ = bit_probability_moments(priors, spec)
        masses = cell_masses_by_quadrature(mu, sigma, spec, points_per_cell=801)
        expected = cell_centers(spec) @ masses
        assert abs(mean[0] - expected) < 1e-5

    def test_invalid_probabilities_rejected(self):
        spec = QuantizerSpec(2, 1.0)
        with pytest.raises(ValueError):
            bit_probability_moments([0.5, 1.2], spec)
        with pytest.raises(ValueError):
            bit_probability_moments([0.5, 0.5, 0.5], spec)
