"""Experiment configuration, seeded sweep execution, metrics, and report files.

A sweep evaluates every configured receiver on every (trial, Eb/N0) cell.
Each cell gets its own deterministic random streams keyed on
(master_seed, trial index, Eb/N0 value), so rerunning a sweep -- or adding
grid points -- never perturbs existing cells.  Within a cell all receivers
see the same trajectory and the same channel noise.

Metrics per (receiver, Eb/N0): mean squared state-estimation error per slot
(averaged over slots and completed trials), average information-bit error
rate, and the number of trials aborted by receiver collapse (collapsed
trials are excluded from the averages and reported separately).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .channel import ChannelSpec, awgn, bpsk_modulate, channel_llr, ebn0_to_sigma2
from .coding import RscCode, rsc_encode
from .quantize import QuantizerSpec, indices_to_bits, quantize_indices
from .receivers import (CodedDemodulator, LinkRecord, TrialCollapse,
                        UncodedDemodulator, default_initial_belief,
                        run_baseline_kf, run_kf_with_prior, run_pearl_bp)
from .statespace import StateSpaceModel, Trajectory, build_generator_model, simulate

RECEIVER_NAMES = ("kf", "kf-prior", "pearl-bp")

# Fixed role tags for per-cell random streams; receiver streams start at 10.
_ROLE_X0 = 0
_ROLE_TRAJECTORY = 1
_ROLE_CHANNEL = 2
_ROLE_RECEIVER_BASE = 10


class ConfigError(ValueError):
    """Invalid experiment configuration; message names the offending field."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one sweep.  Defaults follow the built-in
    generator model study: dt=0.01, isotropic 0.05 noise, 16-bit
    quantization over [-200, 200], 1000 slots."""

    model: str = "generator7"
    dt: float = 0.01
    proc_var: float = 0.05
    obs_var: float = 0.05
    custom_model: dict | None = None
    x0_policy: str = "noise-draw"        # noise-draw | zero | fixed
    x0_values: tuple[float, ...] | None = None
    quantizer_bits: int = 16
    xmax: float = 200.0
    coded: bool = False
    feedback_poly: int = 0o7
    feedforward_poly: int = 0o5
    receivers: tuple[str, ...] = RECEIVER_NAMES
    ebn0_grid_db: tuple[float, ...] = (0.0, 2.0, 4.0, 6.0, 8.0)
    slots: int = 1000
    trials: int = 1
    master_seed: int = 0
    iterations: int = 3
    ns_samples: int = 2048
    prior_method: str = "monte-carlo"    # monte-carlo | exact
    init_cov_scale: float = 10.0
    out_dir: str = "results"

    def validate(self) -> None:
        if self.slots < 1:
            raise ConfigError("slots must be >= 1")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if len(self.ebn0_grid_db) == 0:
            raise ConfigError("ebn0_grid_db must be nonempty")
        if self.quantizer_bits < 1:
            raise ConfigError("quantizer_bits must be >= 1")
        if not self.xmax > 0:
            raise ConfigError("xmax must be positive")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if self.ns_samples < 1:
            raise ConfigError("ns_samples must be >= 1")
        if self.prior_method not in ("monte-carlo", "exact"):
            raise ConfigError(f"prior_method must be monte-carlo or exact, "
                              f"got {self.prior_method!r}")
        unknown = [r for r in self.receivers if r not in RECEIVER_NAMES]
        if unknown:
            raise ConfigError(f"unknown receivers {unknown}; valid: {RECEIVER_NAMES}")
        if not self.receivers:
            raise ConfigError("receivers must be nonempty")
        if self.model not in ("generator7", "custom"):
            raise ConfigError(f"model must be generator7 or custom, got {self.model!r}")
        if self.model == "custom" and not self.custom_model:
            raise ConfigError("custom_model matrices required when model='custom'")
        if self.x0_policy not in ("noise-draw", "zero", "fixed"):
            raise ConfigError(f"x0_policy must be noise-draw, zero or fixed, "
                              f"got {self.x0_policy!r}")
        if self.x0_policy == "fixed" and self.x0_values is None:
            raise ConfigError("x0_values required when x0_policy='fixed'")
        if self.coded:
            try:
                RscCode(self.feedback_poly, self.feedforward_poly)
            except ValueError as exc:
                raise ConfigError(f"invalid code polynomials: {exc}") from exc

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        data = dict(data)
        for key in ("receivers", "ebn0_grid_db", "x0_values"):
            if key in data and data[key] is not None:
                data[key] = tuple(data[key])
        cfg = cls(**data)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path: str) -> "ExperimentConfig":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"config file is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        return cls.from_dict(data)

    def with_overrides(self, **kwargs) -> "ExperimentConfig":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        for key in ("receivers", "ebn0_grid_db", "x0_values"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        cfg = replace(self, **kwargs)
        cfg.validate()
        return cfg

    # -- assembled pieces ---------------------------------------------------

    def build_model(self) -> StateSpaceModel:
        if self.model == "generator7":
            return build_generator_model(self.dt, self.proc_var, self.obs_var)
        m = self.custom_model
        try:
            return StateSpaceModel(
                A=np.asarray(m["A"], dtype=float),
                B=np.asarray(m.get("B", np.zeros((len(m["A"]), 1))), dtype=float),
                C=np.asarray(m["C"], dtype=float),
                proc_noise_cov=np.asarray(m["proc_noise_cov"], dtype=float),
                obs_noise_cov=np.asarray(m["obs_noise_cov"], dtype=float),
                dt=self.dt,
            )
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"invalid custom_model: {exc}") from exc

    def build_quantizer(self) -> QuantizerSpec:
        return QuantizerSpec(self.quantizer_bits, self.xmax)

    def build_code(self) -> RscCode | None:
        if not self.coded:
            return None
        return RscCode(self.feedback_poly, self.feedforward_poly)

    def build_demodulator(self):
        code = self.build_code()
        return UncodedDemodulator() if code is None else CodedDemodulator(code)

    @property
    def code_rate(self) -> float:
        return 0.5 if self.coded else 1.0


@dataclass
class CellMetrics:
    """Aggregated results for one (receiver, Eb/N0) cell."""

    receiver: str
    ebn0_db: float
    mean_mse: float
    per_slot_mse: np.ndarray
    per_trial_mse: np.ndarray
    ber: float
    trial_count: int
    collapse_count: int
    bit_count: int
    bit_error_count: int


@dataclass
class MetricsReport:
    config: ExperimentConfig
    cells: list[CellMetrics] = field(default_factory=list)

    def cell(self, receiver: str, ebn0_db: float) -> CellMetrics:
        for c in self.cells:
            if c.receiver == receiver and c.ebn0_db == ebn0_db:
                return c
        raise KeyError(f"no cell for ({receiver}, {ebn0_db})")


def cell_seed_sequence(master_seed: int, trial: int, ebn0_db: float,
                       role: int) -> np.random.SeedSequence:
    """Deterministic stream key for one role inside one (trial, Eb/N0) cell.

    Keyed on the Eb/N0 value (in milli-dB) rather than its grid position so
    reordering or extending the grid leaves existing cells untouched.
    """
    ebn0_key = int(round(ebn0_db * 1000.0)) & 0xFFFFFFFF
    return np.random.SeedSequence([master_seed, trial, ebn0_key, role])


def draw_initial_state(config: ExperimentConfig, model: StateSpaceModel,
                       trial: int, ebn0_db: float) -> np.ndarray:
    n = model.state_dim
    if config.x0_policy == "zero":
        return np.zeros(n)
    if config.x0_policy == "fixed":
        x0 = np.asarray(config.x0_values, dtype=float)
        if x0.shape != (n,):
            raise ConfigError(f"x0_values must have length {n}")
        return x0
    rng = np.random.default_rng(
        cell_seed_sequence(config.master_seed, trial, ebn0_db, _ROLE_X0))
    vals, vecs = np.linalg.eigh(model.proc_noise_cov)
    root = vecs * np.sqrt(np.clip(vals, 0.0, None))
    return root @ rng.standard_normal(n)


def transmit(trajectory: Trajectory, spec: QuantizerSpec, chan: ChannelSpec,
             code: RscCode | None, rng) -> LinkRecord:
    """Quantize, (optionally) encode, BPSK-modulate and push every slot's
    observation through the AWGN channel."""
    obs = trajectory.observations
    T, K = obs.shape
    idx = quantize_indices(obs, spec)
    bits = indices_to_bits(idx, spec).reshape(T, K * spec.bits_per_dim)
    if code is None:
        tx = bits
    else:
        tx = np.empty((T, code.coded_length(bits.shape[1])), dtype=np.uint8)
        for t in range(T):
            tx[t] = rsc_encode(bits[t], code)
    received = awgn(bpsk_modulate(tx), chan, rng)
    return LinkRecord(
        true_states=trajectory.states,
        observations=obs,
        true_bits=bits,
        channel_llrs=channel_llr(received, chan),
    )


def _run_receiver(name: str, config: ExperimentConfig, model, spec, record,
                  demod, trial: int, ebn0_db: float):
    init = default_initial_belief(model, config.init_cov_scale)
    if name == "kf":
        return run_baseline_kf(model, spec, record, demod, init)
    role = _ROLE_RECEIVER_BASE + RECEIVER_NAMES.index(name)
    rng = np.random.default_rng(
        cell_seed_sequence(config.master_seed, trial, ebn0_db, role))
    if name == "kf-prior":
        return run_kf_with_prior(model, spec, record, demod, init,
                                 config.prior_method, config.ns_samples, rng)
    if name == "pearl-bp":
        return run_pearl_bp(model, spec, record, demod, init, config.iterations,
                            config.prior_method, config.ns_samples, rng)
    raise ConfigError(f"unknown receiver {name!r}")


def run_experiment(config: ExperimentConfig) -> MetricsReport:
    """Evaluate every configured receiver over the full (trial, Eb/N0) grid."""
    config.validate()
    model = config.build_model()
    spec = config.build_quantizer()
    code = config.build_code()
    demod = config.build_demodulator()
    T = config.slots
    info_bits_per_slot = spec.frame_bits(model.obs_dim)

    report = MetricsReport(config=config)
    for ebn0_db in config.ebn0_grid_db:
        chan = ChannelSpec(ebn0_to_sigma2(ebn0_db, config.code_rate))
        acc = {name: {"mse": np.zeros(T), "trial_mse": [], "trials": 0,
                      "collapses": 0, "bits": 0, "errors": 0}
               for name in config.receivers}
        for trial in range(config.trials):
            x0 = draw_initial_state(config, model, trial, ebn0_db)
            traj_seed = int(cell_seed_sequence(
                config.master_seed, trial, ebn0_db, _ROLE_TRAJECTORY).generate_state(1)[0])
            traj = simulate(model, x0, T, traj_seed)
            chan_rng = np.random.default_rng(
                cell_seed_sequence(config.master_seed, trial, ebn0_db, _ROLE_CHANNEL))
            record = transmit(traj, spec, chan, code, chan_rng)
            for name in config.receivers:
                a = acc[name]
                try:
                    slots = _run_receiver(name, config, model, spec, record,
                                          demod, trial, ebn0_db)
                except TrialCollapse:
                    a["collapses"] += 1
                    continue
                sq = np.array([s.squared_error() for s in slots])
                a["mse"] += sq
                a["trial_mse"].append(float(np.mean(sq)))
                a["errors"] += sum(s.bit_errors() for s in slots)
                a["bits"] += T * info_bits_per_slot
                a["trials"] += 1
        for name in config.receivers:
            a = acc[name]
            completed = a["trials"]
            per_slot = a["mse"] / completed if completed else np.full(T, np.nan)
            report.cells.append(CellMetrics(
                receiver=name,
                ebn0_db=float(ebn0_db),
                mean_mse=float(np.mean(per_slot)) if completed else float("nan"),
                per_slot_mse=per_slot,
                per_trial_mse=np.array(a["trial_mse"]),
                ber=(a["errors"] / a["bits"]) if a["bits"] else float("nan"),
                trial_count=config.trials,
                collapse_count=a["collapses"],
                bit_count=a["bits"],
                bit_error_count=a["errors"],
            ))
    return report


def sweep_ebn0(config: ExperimentConfig) -> MetricsReport:
    """Alias of run_experiment over the configured Eb/N0 grid."""
    return run_experiment(config)


def _fmt(x: float) -> str:
    return repr(float(x))


def emit_report(report: MetricsReport, out_dir, fmt: str = "csv") -> list[str]:
    """Write report files; returns the paths written.

    fmt="csv": report.csv with one row per (receiver, Eb/N0) cell plus
    per-metric tables mse.csv and ber.csv (one column per receiver).
    fmt="plot-table": the same per-metric tables as whitespace-separated
    mse.dat and ber.dat, plus the per-slot MSE series mse_slots.dat.
    """
    os.makedirs(out_dir, exist_ok=True)
    receivers = list(report.config.receivers)
    grid = [c.ebn0_db for c in report.cells if c.receiver == receivers[0]]
    paths = []

    def metric_rows(attr):
        for ebn0 in grid:
            yield [ebn0] + [getattr(report.cell(r, ebn0), attr) for r in receivers]

    if fmt == "csv":
        path = os.path.join(out_dir, "report.csv")
        with open(path, "w") as fh:
            fh.write("receiver,ebn0_db,mean_mse,ber,trials,collapses\n")
            for r in receivers:
                for ebn0 in grid:
                    c = report.cell(r, ebn0)
                    fh.write(f"{c.receiver},{_fmt(c.ebn0_db)},{_fmt(c.mean_mse)},"
                             f"{_fmt(c.ber)},{c.trial_count},{c.collapse_count}\n")
        paths.append(path)
        for metric, attr in (("mse", "mean_mse"), ("ber", "ber")):
            path = os.path.join(out_dir, f"{metric}.csv")
            with open(path, "w") as fh:
                fh.write(",".join(["ebn0_db"] + receivers) + "\n")
                for row in metric_rows(attr):
                    fh.write(",".join(_fmt(v) for v in row) + "\n")
            paths.append(path)
    elif fmt == "plot-table":
        for metric, attr in (("mse", "mean_mse"), ("ber", "ber")):
            path = os.path.join(out_dir, f"{metric}.dat")
            with open(path, "w") as fh:
                fh.write("# " + " ".join(["ebn0_db"] + receivers) + "\n")
                for row in metric_rows(attr):
                    fh.write(" ".join(_fmt(v) for v in row) + "\n")
            paths.append(path)
        # Per-slot MSE series (one column per receiver/Eb/N0 cell), mainly
        # for eyeballing collapse onset.
        path = os.path.join(out_dir, "mse_slots.dat")
        with open(path, "w") as fh:
            cols = [f"{r}@{_fmt(e)}dB" for r in receivers for e in grid]
            fh.write("# slot " + " ".join(cols) + "\n")
            if report.cells:
                series = [report.cell(r, e).per_slot_mse
                          for r in receivers for e in grid]
                for t in range(len(series[0])):
                    fh.write(" ".join([str(t)] + [_fmt(s[t]) for s in series])
                             + "\n")
        paths.append(path)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
    return paths


def parse_report_csv(path: str) -> list[dict]:
    """Read back a report.csv into dicts (used by tests and tooling)."""
    rows = []
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        for line in fh:
            parts = line.strip().split(",")
            if not parts or parts == [""]:
                continue
            row = dict(zip(header, parts))
            for key in ("ebn0_db", "mean_mse", "ber"):
                row[key] = float(row[key])
            for key in ("trials", "collapses"):
                row[key] = int(row[key])
            rows.append(row)
    return rows
