"""Gaussian algebra against integration and sampling oracles."""

import math

import numpy as np
import pytest

from statelink.gaussian import (DegenerateProductError, GaussianBelief,
                                affine_propagate, gaussian_product, marginal,
                                std_normal_cdf)


def grid_product_moments(m1, c1, m2, c2, half_width=8.0, points=401):
    """Moments of the normalized pointwise product of two 2-D Gaussian
    densities, by trapezoidal integration on a square grid."""
    xs = np.linspace(-half_width, half_width, points)
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)

    def density(m, c):
        d = pts - m
        sol = np.linalg.solve(c, d.T).T
        det = np.linalg.det(2 * np.pi * c)
        return np.exp(-0.5 * np.sum(d * sol, axis=1)) / np.sqrt(det)

    w = density(m1, c1) * density(m2, c2)
    w = w / w.sum()
    mean = pts.T @ w
    centered = pts - mean
    cov = (centered * w[:, None]).T @ centered
    return mean, cov


def erf_series(x, terms=60):
    """Maclaurin series for erf, accurate far beyond 1e-13 for |x| <= 2."""
    total = 0.0
    for n in range(terms):
        total += (-1) ** n * x ** (2 * n + 1) / (math.factorial(n) * (2 * n + 1))
    return 2.0 / math.sqrt(math.pi) * total


class TestGaussianProduct:
    def test_symmetric_unit_factors(self):
        g = gaussian_product(GaussianBelief([0.0], [[1.0]]),
                             GaussianBelief([0.0], [[1.0]]))
        assert abs(g.mean[0]) < 1e-15
        assert abs(g.cov[0, 0] - 0.5) < 1e-15

    def test_equal_variances_give_midpoint_mean(self):
        g = gaussian_product(GaussianBelief([0.0], [[1.0]]),
                             GaussianBelief([2.0], [[1.0]]))
        assert abs(g.mean[0] - 1.0) < 1e-14
        assert abs(g.cov[0, 0] - 0.5) < 1e-14

    def test_matches_grid_integration_2d(self):
        rng = np.random.default_rng(17)
        for _ in range(3):
            m1 = rng.uniform(-1.5, 1.5, 2)
            m2 = rng.uniform(-1.5, 1.5, 2)
            a = rng.uniform(-0.5, 0.5, (2, 2))
            b = rng.uniform(-0.5, 0.5, (2, 2))
            c1 = a @ a.T + 0.5 * np.eye(2)
            c2 = b @ b.T + 0.5 * np.eye(2)
            g = gaussian_product(GaussianBelief(m1, c1), GaussianBelief(m2, c2))
            mean, cov = grid_product_moments(m1, c1, m2, c2)
            assert np.max(np.abs(g.mean - mean)) < 1e-6
            assert np.max(np.abs(g.cov - cov)) < 1e-6

    def test_commutative(self):
        rng = np.random.default_rng(3)
        m1, m2 = rng.normal(size=3), rng.normal(size=3)
        a = rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3))
        c1, c2 = a @ a.T + np.eye(3), b @ b.T + np.eye(3)
        p = gaussian_product(GaussianBelief(m1, c1), GaussianBelief(m2, c2))
        q = gaussian_product(GaussianBelief(m2, c2), GaussianBelief(m1, c1))
        assert np.max(np.abs(p.mean - q.mean)) < 1e-12
        assert np.max(np.abs(p.cov - q.cov)) < 1e-12

    def test_marginal_commutes_for_diagonal_factors(self):
        a = GaussianBelief([1.0, -2.0], np.diag([0.5, 2.0]))
        b = GaussianBelief([0.0, 1.0], np.diag([1.5, 0.25]))
        joint = gaussian_product(a, b)
        for d in range(2):
            scalar = gaussian_product(marginal(a, d), marginal(b, d))
            got = marginal(joint, d)
            assert abs(got.mean[0] - scalar.mean[0]) < 1e-12
            assert abs(got.cov[0, 0] - scalar.cov[0, 0]) < 1e-12

    def test_dimension_mismatch_raises(self):
        with pytest.raises(ValueError, match="dimension"):
            gaussian_product(GaussianBelief([0.0], [[1.0]]),
                             GaussianBelief([0.0, 0.0], np.eye(2)))

    def test_degenerate_product_raises(self):
        bad = GaussianBelief([0.0, 0.0], np.diag([1.0, 1e-13]))
        ok = GaussianBelief([0.0, 0.0], np.eye(2))
        with pytest.raises(DegenerateProductError, match="degenerate product"):
            gaussian_product(bad, ok)


class TestAffinePropagate:
    def test_identity_is_noop(self):
        g = GaussianBelief([1.0, 2.0], [[2.0, 0.3], [0.3, 1.0]])
        out = affine_propagate(g, np.eye(2), np.zeros((2, 2)))
        assert np.allclose(out.mean, g.mean, atol=1e-15)
        assert np.allclose(out.cov, g.cov, atol=1e-15)

    def test_scalar_case(self):
        out = affine_propagate(GaussianBelief([1.0], [[1.0]]), [[2.0]], [[1.0]])
        assert abs(out.mean[0] - 2.0) < 1e-15
        assert abs(out.cov[0, 0] - 5.0) < 1e-15

    def test_matches_sample_moments(self):
        rng = np.random.default_rng(5)
        mean = np.array([0.5, -1.0, 2.0])
        a = rng.normal(size=(3, 3))
        cov = a @ a.T + np.eye(3)
        C = rng.normal(size=(3, 3))
        q = np.diag([0.2, 0.5, 1.0])
        out = affine_propagate(GaussianBelief(mean, cov), C, q)

        n = 1_000_000
        x = rng.multivariate_normal(mean, cov, size=n)
        w = rng.multivariate_normal(np.zeros(3), q, size=n)
        y = x @ C.T + w
        sample_mean = y.mean(axis=0)
        sample_cov = np.cov(y.T)
        se_mean = np.sqrt(np.diag(out.cov) / n)
        assert np.all(np.abs(sample_mean - out.mean) < 3 * se_mean)
        d = np.sqrt(np.diag(out.cov))
        se_cov = np.sqrt((np.outer(d, d) ** 2 + out.cov**2) / n)
        assert np.all(np.abs(sample_cov - out.cov) < 3 * se_cov)

    def test_noise_additivity(self):
        g = GaussianBelief([1.0, 0.0], [[1.0, 0.2], [0.2, 2.0]])
        q = np.array([[0.3, 0.1], [0.1, 0.4]])
        twice = affine_propagate(affine_propagate(g, np.eye(2), q), np.eye(2), q)
        once = affine_propagate(g, np.eye(2), 2 * q)
        assert np.allclose(twice.mean, once.mean, atol=1e-14)
        assert np.allclose(twice.cov, once.cov, atol=1e-14)

    def test_dimension_mismatch_raises(self):
        g = GaussianBelief([0.0, 0.0], np.eye(2))
        with pytest.raises(ValueError):
            affine_propagate(g, np.eye(3), np.zeros((3, 3)))


class TestMarginal:
    def test_diagonal(self):
        g = GaussianBelief([3.0, -1.0], np.diag([1.0, 4.0]))
        m = marginal(g, 1)
        assert m.mean[0] == -1.0 and m.cov[0, 0] == 4.0

    def test_off_diagonal_ignored(self):
        g = GaussianBelief([0.0, 0.0], [[2.0, 0.9], [0.9, 1.0]])
        assert marginal(g, 0).cov[0, 0] == pytest.approx(2.0, abs=1e-15)

    def test_selector_row_consistency(self):
        rng = np.random.default_rng(8)
        a = rng.normal(size=(3, 3))
        g = GaussianBelief(rng.normal(size=3), a @ a.T + np.eye(3))
        for d in range(3):
            row = np.zeros((1, 3))
            row[0, d] = 1.0
            via_affine = affine_propagate(g, row, np.zeros((1, 1)))
            direct = marginal(g, d)
            assert abs(via_affine.mean[0] - direct.mean[0]) < 1e-14
            assert abs(via_affine.cov[0, 0] - direct.cov[0, 0]) < 1e-14

    def test_out_of_range(self):
        g = GaussianBelief([0.0], [[1.0]])
        with pytest.raises(IndexError):
            marginal(g, 1)


class TestStdNormalCdf:
    def test_symmetry_point(self):
        assert std_normal_cdf(0.0) == 0.5

    def test_reflection_identity(self):
        for z in (-3.7, -1.1, 0.4, 2.9):
            assert abs(std_normal_cdf(-z) - (1.0 - std_normal_cdf(z))) < 1e-15

    def test_against_erf_series(self):
        # Reference value frozen from the series oracle below.
        assert abs(std_normal_cdf(1.0) - 0.8413447460685429) < 1e-12
        for z in (0.25, 0.5, 1.0, 1.5, 2.0):
            ref = 0.5 * (1.0 + erf_series(z / math.sqrt(2.0)))
            assert abs(std_normal_cdf(z) - ref) < 1e-12

    def test_saturation_and_bounds(self):
        assert std_normal_cdf(41.0) == 1.0
        assert std_normal_cdf(-41.0) == 0.0
        zs = np.linspace(-39, 39, 501)
        vals = np.array([std_normal_cdf(z) for z in zs])
        assert np.all((vals >= 0) & (vals <= 1))
        assert np.all(np.diff(vals) >= 0)


class TestBeliefInvariants:
    def test_asymmetric_covariance_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            GaussianBelief([0.0, 0.0], [[1.0, 0.5], [0.1, 1.0]])

    def test_indefinite_covariance_rejected(self):
        with pytest.raises(ValueError, match="PSD"):
            GaussianBelief([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])

    def test_outputs_are_symmetric_psd(self):
        rng = np.random.default_rng(21)
        for _ in range(10):
            a = rng.normal(size=(4, 4))
            b = rng.normal(size=(4, 4))
            g1 = GaussianBelief(rng.normal(size=4), a @ a.T + 0.1 * np.eye(4))
            g2 = GaussianBelief(rng.normal(size=4), b @ b.T + 0.1 * np.eye(4))
            for out in (gaussian_product(g1, g2),
                        affine_propagate(g1, rng.normal(size=(4, 4)),
                                         0.1 * np.eye(4))):
                assert np.allclose(out.cov, out.cov.T)
                assert np.linalg.eigvalsh(out.cov)[0] >= -1e-10 * np.trace(out.cov)

    def test_immutable(self):
        g = GaussianBelief([0.0], [[1.0]])
        with pytest.raises(ValueError):
            g.mean[0] = 1.0
