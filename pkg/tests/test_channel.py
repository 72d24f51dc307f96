"""BPSK/AWGN front end and soft-demodulation arithmetic."""

import numpy as np
import pytest

from statelink.channel import (ChannelSpec, LLR_MAX, awgn, bpsk_modulate,
                               channel_llr, ebn0_to_sigma2, logit,
                               posterior_bit_prob, sigmoid)


class TestBpsk:
    def test_mapping(self):
        assert list(bpsk_modulate(np.array([0, 1, 1, 0]))) == [-1.0, 1.0, 1.0, -1.0]

    def test_all_ones(self):
        assert np.all(bpsk_modulate(np.ones(10, dtype=int)) == 1.0)

    def test_sign_demod_inverts(self):
        rng = np.random.default_rng(0)
        bits = rng.integers(0, 2, 100)
        recovered = (bpsk_modulate(bits) > 0).astype(int)
        assert np.array_equal(recovered, bits)

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            bpsk_modulate(np.array([0, 2]))


class TestAwgn:
    def test_near_noiseless_limit(self):
        spec = ChannelSpec(1e-20)
        s = bpsk_modulate(np.random.default_rng(1).integers(0, 2, 1000))
        r = awgn(s, spec, rng=2)
        assert np.max(np.abs(r - s)) < 1e-8

    def test_empirical_variance(self):
        spec = ChannelSpec(0.37)
        s = np.zeros(1_000_000)
        r = awgn(s, spec, rng=3)
        assert abs(np.var(r) - 0.37) < 0.01 * 0.37

    def test_seed_determinism(self):
        spec = ChannelSpec(1.0)
        s = np.ones(100)
        assert np.array_equal(awgn(s, spec, rng=9), awgn(s, spec, rng=9))


class TestEbn0:
    def test_zero_db_rate_one(self):
        assert ebn0_to_sigma2(0.0, 1.0) == pytest.approx(0.5, abs=1e-15)

    def test_zero_db_rate_half(self):
        assert ebn0_to_sigma2(0.0, 0.5) == pytest.approx(1.0, abs=1e-15)

    def test_ten_db_rate_one(self):
        assert ebn0_to_sigma2(10.0, 1.0) == pytest.approx(0.05, abs=1e-15)

    def test_invalid_rate(self):
        with pytest.raises(ValueError):
            ebn0_to_sigma2(0.0, 0.0)


class TestChannelLlr:
    def test_zero_received_is_neutral(self):
        assert channel_llr(np.array([0.0]), ChannelSpec(0.7))[0] == 0.0

    def test_unit_case(self):
        assert channel_llr(np.array([1.0]), ChannelSpec(1.0))[0] == pytest.approx(2.0)

    def test_matches_density_ratio(self):
        spec = ChannelSpec(0.63)
        rng = np.random.default_rng(5)
        r = rng.uniform(-3, 3, 200)

        def log_density(x, mean):
            return -((x - mean) ** 2) / (2 * spec.sigma_e2)

        expected = log_density(r, 1.0) - log_density(r, -1.0)
        assert np.max(np.abs(channel_llr(r, spec) - expected)) < 1e-10

    def test_odd_and_linear(self):
        spec = ChannelSpec(0.5)
        r = np.linspace(-2, 2, 41)
        llr = channel_llr(r, spec)
        assert np.allclose(llr, -channel_llr(-r, spec), atol=1e-14)
        assert np.allclose(np.diff(llr), np.diff(llr)[0], atol=1e-12)

    def test_saturation(self):
        spec = ChannelSpec(1e-6)
        assert channel_llr(np.array([5.0]), spec)[0] == LLR_MAX
        assert channel_llr(np.array([-5.0]), spec)[0] == -LLR_MAX


class TestPosteriorBitProb:
    def test_uninformative_prior(self):
        llrs = np.linspace(-5, 5, 21)
        assert np.allclose(posterior_bit_prob(llrs, 0.5), sigmoid(llrs), atol=1e-15)

    def test_uninformative_channel(self):
        for xi in (0.1, 0.37, 0.9):
            assert posterior_bit_prob(0.0, xi) == pytest.approx(xi, abs=1e-14)

    def test_direct_formula(self):
        llr, xi = 2.0, 0.3
        like = np.exp(llr)
        expected = xi * like / (xi * like + (1 - xi))
        assert posterior_bit_prob(llr, xi) == pytest.approx(expected, abs=1e-12)

    def test_prior_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            posterior_bit_prob(0.0, 1.0)
        with pytest.raises(ValueError):
            posterior_bit_prob(0.0, 0.0)


class TestLogitSigmoid:
    def test_roundtrip(self):
        p = np.linspace(0.001, 0.999, 101)
        assert np.allclose(sigmoid(logit(p)), p, atol=1e-12)

    def test_logit_saturates(self):
        assert logit(np.array([1e-30]))[0] == -LLR_MAX
