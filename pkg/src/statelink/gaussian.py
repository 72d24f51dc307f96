"""Multivariate Gaussian beliefs and the two identities all messages are built from.

Every quantity exchanged between the estimator components (predictions,
likelihood messages, beliefs) is a mean vector plus a dense covariance
matrix.  State dimensions are small (7 in the built-in model), so dense
algebra with explicit symmetrization is both adequate and robust.

Two operations cover all message arithmetic:

* ``gaussian_product`` -- pointwise product of two densities on the same
  variable, renormalized (N(m1,S1) * N(m2,S2) ~ N(m3,S3) with
  S3 = (S1^-1 + S2^-1)^-1 and m3 = S3 (S1^-1 m1 + S2^-1 m2)).
* ``affine_propagate`` -- push a belief through y = C x + noise, giving
  N(C m, C S C^T + Q).

Normalization constants are dropped everywhere: messages are beliefs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Above this condition number a combined precision matrix is treated as
# numerically singular rather than inverted into garbage.
CONDITION_LIMIT = 1e12


class DegenerateProductError(ValueError):
    """Raised when a Gaussian product has a singular/ill-conditioned precision."""


def _as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise ValueError(f"covariance must be a matrix, got shape {m.shape}")
    return m


def symmetrize(m: np.ndarray) -> np.ndarray:
    """Return (M + M^T)/2; applied after every operation to kill roundoff skew."""
    return 0.5 * (m + m.T)


@dataclass(frozen=True)
class GaussianBelief:
    """Immutable mean/covariance pair.

    Invariants enforced at construction: mean and cov dimensions agree,
    cov is symmetric (symmetrized on the way in) and positive
    semi-definite up to a -1e-10 * trace eigenvalue tolerance.
    """

    mean: np.ndarray
    cov: np.ndarray = field(repr=False)

    def __post_init__(self):
        mean = np.atleast_1d(np.asarray(self.mean, dtype=float))
        cov = _as_matrix(self.cov)
        if mean.ndim != 1:
            raise ValueError(f"mean must be a vector, got shape {mean.shape}")
        n = mean.shape[0]
        if cov.shape != (n, n):
            raise ValueError(f"dimension mismatch: mean {n}, cov {cov.shape}")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValueError("non-finite entries in Gaussian belief")
        scale = max(np.max(np.abs(cov)), 1.0)
        if np.max(np.abs(cov - cov.T)) > 1e-10 * scale:
            raise ValueError("covariance is not symmetric")
        cov = symmetrize(cov)
        eigmin = float(np.linalg.eigvalsh(cov)[0])
        tol = 1e-10 * max(float(np.trace(cov)), 1.0)
        if eigmin < -tol:
            raise ValueError(f"covariance not PSD (min eigenvalue {eigmin:.3e})")
        mean = mean.copy()
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]


def _checked_inverse(m: np.ndarray, what: str) -> np.ndarray:
    """Invert a symmetric matrix, refusing when cond > CONDITION_LIMIT."""
    eigs = np.abs(np.linalg.eigvalsh(m))
    if eigs[-1] == 0.0 or eigs[0] == 0.0 or eigs[-1] / eigs[0] > CONDITION_LIMIT:
        raise DegenerateProductError(f"degenerate product: {what} is ill-conditioned")
    return np.linalg.inv(m)


def gaussian_product(a: GaussianBelief, b: GaussianBelief) -> GaussianBelief:
    """Renormalized product of two Gaussian densities on the same variable."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    pa = _checked_inverse(a.cov, "first factor covariance")
    pb = _checked_inverse(b.cov, "second factor covariance")
    prec = symmetrize(pa + pb)
    cov = symmetrize(_checked_inverse(prec, "combined precision"))
    mean = cov @ (pa @ a.mean + pb @ b.mean)
    return GaussianBelief(mean, cov)


def affine_propagate(g: GaussianBelief, C, noise_cov) -> GaussianBelief:
    """Propagate a belief through y = C x + w, w ~ N(0, noise_cov)."""
    C = np.atleast_2d(np.asarray(C, dtype=float))
    noise_cov = _as_matrix(noise_cov)
    if C.shape[1] != g.dim:
        raise ValueError(f"C has {C.shape[1]} columns, belief has dim {g.dim}")
    if noise_cov.shape != (C.shape[0], C.shape[0]):
        raise ValueError(f"noise cov {noise_cov.shape} does not match C rows {C.shape[0]}")
    mean = C @ g.mean
    cov = symmetrize(C @ g.cov @ C.T + noise_cov)
    return GaussianBelief(mean, cov)


def marginal(g: GaussianBelief, dim: int) -> GaussianBelief:
    """Scalar marginal of one coordinate."""
    if not 0 <= dim < g.dim:
        raise IndexError(f"dim {dim} out of range for belief of dim {g.dim}")
    return GaussianBelief(np.array([g.mean[dim]]), np.array([[g.cov[dim, dim]]]))


def std_normal_cdf(z: float) -> float:
    """Standard normal CDF, accurate to ~1 ulp of erfc; saturates for |z| > 40."""
    if z > 40.0:
        return 1.0
    if z < -40.0:
        return 0.0
    return 0.5 * math.erfc(-z / math.sqrt(2.0))


# Vectorized CDF for the quantizer's interval sums.
_std_normal_cdf_vec = np.vectorize(std_normal_cdf, otypes=[float])


def std_normal_cdf_array(z: np.ndarray) -> np.ndarray:
    return _std_normal_cdf_vec(np.asarray(z, dtype=float))
