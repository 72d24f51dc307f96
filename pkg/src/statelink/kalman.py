"""Kalman predict/update recursion on GaussianBelief values.

The update uses the Joseph form, which is algebraically the plain
covariance update but keeps the result symmetric PSD under roundoff.
"""

from __future__ import annotations

import numpy as np

from .gaussian import CONDITION_LIMIT, DegenerateProductError, GaussianBelief, symmetrize
from .statespace import StateSpaceModel


def kf_predict(posterior: GaussianBelief, model: StateSpaceModel) -> GaussianBelief:
    """One-step prediction: mean -> A mean, cov -> A cov A^T + proc noise."""
    if posterior.dim != model.state_dim:
        raise ValueError("belief dimension does not match model state dimension")
    mean = model.A @ posterior.mean
    cov = symmetrize(model.A @ posterior.cov @ model.A.T + model.proc_noise_cov)
    return GaussianBelief(mean, cov)


def kf_update(prior: GaussianBelief, y, model: StateSpaceModel) -> GaussianBelief:
    """Measurement update with observation y."""
    y = np.asarray(y, dtype=float)
    if y.shape != (model.obs_dim,):
        raise ValueError(f"observation must have length {model.obs_dim}")
    C, R = model.C, model.obs_noise_cov
    innov_cov = symmetrize(C @ prior.cov @ C.T + R)
    if np.linalg.cond(innov_cov) > CONDITION_LIMIT:
        raise DegenerateProductError("singular innovation covariance")
    gain = prior.cov @ C.T @ np.linalg.inv(innov_cov)
    mean = prior.mean + gain @ (y - C @ prior.mean)
    ident = np.eye(prior.dim)
    j = ident - gain @ C
    cov = symmetrize(j @ prior.cov @ j.T + gain @ R @ gain.T)
    return GaussianBelief(mean, cov)
