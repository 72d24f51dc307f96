"""Discrete-time linear system definition and seeded trajectory simulation.

    x(t+1) = A x(t) + B u(t) + n(t),   n ~ N(0, proc_noise_cov)
    y(t)   = C x(t) + w(t),            w ~ N(0, obs_noise_cov)

The control input u is carried for completeness but defaults to zero and is
never exercised by the receivers.  The built-in "generator7" model is a
7-state electric generator linearization discretized by forward Euler,
A = I + dt * A_CONT.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Continuous-time system matrix of the 7-state generator model.
# States: x1,x2 rotor swings; x3 excitation circuit; x4 d-axis damping +
# excitation; x5 q-axis damping; x6 voltage controller + excitation;
# x7 voltage controller.
GENERATOR7_CONTINUOUS = np.array([
    [0.0,     1.0, 0.0,    0.0,     0.0,     0.0,   0.0],
    [-20.316, 0.0, 0.0,    -25.048, -1.411,  0.0,   0.0],
    [-0.061,  0.0, -0.773, -0.083,  0.018,   15.06, 30.12],
    [-0.213,  0.0, 7.050,  -5.026,  0.063,   0.0,   0.0],
    [-2.654,  0.0, 0.0,    -1.463,  -12.958, 0.0,   0.0],
    [0.0,     0.0, 0.0,    0.0,     0.0,     0.0,   1.0],
    [-0.008,  0.0, 0.0,    -0.565,  0.971,   -3.33, -33.33],
])


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    """Matrix square root of a PSD covariance (eigh-based, handles zero)."""
    vals, vecs = np.linalg.eigh(m)
    vals = np.clip(vals, 0.0, None)
    return vecs @ np.diag(np.sqrt(vals)) @ vecs.T


@dataclass(frozen=True)
class StateSpaceModel:
    """Per-step transition A, control gain B, observation C plus noise covariances."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    proc_noise_cov: np.ndarray
    obs_noise_cov: np.ndarray
    dt: float = 0.0

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        Q = np.atleast_2d(np.asarray(self.proc_noise_cov, dtype=float))
        R = np.atleast_2d(np.asarray(self.obs_noise_cov, dtype=float))
        n = A.shape[0]
        if A.shape != (n, n):
            raise ValueError("A must be square")
        if B.shape[0] != n:
            raise ValueError("B rows must match state dimension")
        if C.shape[1] != n:
            raise ValueError("C must have one column per state")
        k = C.shape[0]
        for name, m, d in (("proc_noise_cov", Q, n), ("obs_noise_cov", R, k)):
            if m.shape != (d, d):
                raise ValueError(f"{name} must be {d}x{d}")
            if np.max(np.abs(m - m.T)) > 1e-10 * max(np.max(np.abs(m)), 1.0):
                raise ValueError(f"{name} must be symmetric")
            if np.linalg.eigvalsh(m)[0] < -1e-10 * max(np.trace(m), 1.0):
                raise ValueError(f"{name} must be PSD")
        for name, m in (("A", A), ("B", B), ("C", C), ("proc_noise_cov", Q),
                        ("obs_noise_cov", R)):
            m.flags.writeable = False
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "proc_noise_cov", Q)
        object.__setattr__(self, "obs_noise_cov", R)

    @property
    def state_dim(self) -> int:
        return self.A.shape[0]

    @property
    def obs_dim(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True)
class Trajectory:
    """One simulated realization: states (T,N), observations (T,K)."""

    states: np.ndarray
    observations: np.ndarray
    seed: int

    def __post_init__(self):
        if self.states.shape[0] != self.observations.shape[0]:
            raise ValueError("states and observations must have equal length")

    @property
    def slots(self) -> int:
        return self.states.shape[0]


def build_generator_model(dt: float, proc_var: float, obs_var: float) -> StateSpaceModel:
    """7-state generator model: A = I + dt*A_cont, C = I, B = 0, isotropic noise."""
    if dt < 0:
        raise ValueError("dt must be nonnegative")
    if proc_var < 0 or obs_var < 0:
        raise ValueError("variances must be nonnegative")
    n = GENERATOR7_CONTINUOUS.shape[0]
    A = np.eye(n) + dt * GENERATOR7_CONTINUOUS
    return StateSpaceModel(
        A=A,
        B=np.zeros((n, 1)),
        C=np.eye(n),
        proc_noise_cov=proc_var * np.eye(n),
        obs_noise_cov=obs_var * np.eye(n),
        dt=dt,
    )


def simulate(model: StateSpaceModel, x0, T: int, seed: int) -> Trajectory:
    """Simulate T slots from x0 with independently seeded Gaussian noise.

    The same seed always reproduces bit-identical arrays: all noise is drawn
    up front in a fixed order from one Generator.
    """
    if T < 1:
        raise ValueError("T must be >= 1")
    x0 = np.asarray(x0, dtype=float)
    n, k = model.state_dim, model.obs_dim
    if x0.shape != (n,):
        raise ValueError(f"x0 must have length {n}")
    rng = np.random.default_rng(seed)
    sq = _psd_sqrt(model.proc_noise_cov)
    sr = _psd_sqrt(model.obs_noise_cov)
    proc_noise = rng.standard_normal((T, n)) @ sq.T
    obs_noise = rng.standard_normal((T, k)) @ sr.T

    states = np.empty((T, n))
    states[0] = x0
    for t in range(T - 1):
        states[t + 1] = model.A @ states[t] + proc_noise[t]
    observations = states @ model.C.T + obs_noise
    return Trajectory(states=states, observations=observations, seed=seed)
