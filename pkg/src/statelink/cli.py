"""Command line harness: `statelink run` sweeps, `statelink selftest` oracles."""

from __future__ import annotations

import argparse
import sys

from .harness import ConfigError, ExperimentConfig, emit_report, run_experiment


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip() != "")
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers: {exc}")


def _parse_name_list(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="statelink",
        description="Simulate state estimation over quantized noisy links.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run a receiver sweep")
    run_p.add_argument("--config", help="JSON config file (defaults otherwise)")
    run_p.add_argument("--ebn0", type=_parse_float_list, metavar="DB,DB,...",
                       help="Eb/N0 grid in dB")
    run_p.add_argument("--receivers", type=_parse_name_list,
                       metavar="kf,kf-prior,pearl-bp", help="receivers to run")
    run_p.add_argument("--coded", action="store_true", default=None,
                       help="enable the rate-1/2 convolutional code")
    run_p.add_argument("--slots", type=int, help="time slots per trial")
    run_p.add_argument("--trials", type=int, help="trials per grid point")
    run_p.add_argument("--seed", type=int, help="master seed")
    run_p.add_argument("--iterations", type=int, help="BP iterations per slot")
    run_p.add_argument("--ns", type=int, help="Monte-Carlo prior sample count")
    run_p.add_argument("--prior-method", choices=("monte-carlo", "exact"))
    run_p.add_argument("--out", help="output directory")

    sub.add_parser("selftest", help="run the built-in oracle checks")
    return parser


def _cmd_run(args) -> int:
    try:
        config = (ExperimentConfig.from_json(args.config) if args.config
                  else ExperimentConfig())
        config = config.with_overrides(
            ebn0_grid_db=args.ebn0,
            receivers=args.receivers,
            coded=args.coded,
            slots=args.slots,
            trials=args.trials,
            master_seed=args.seed,
            iterations=args.iterations,
            ns_samples=args.ns,
            prior_method=args.prior_method,
            out_dir=args.out,
        )
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    report = run_experiment(config)
    paths = emit_report(report, config.out_dir, "csv")
    paths += emit_report(report, config.out_dir, "plot-table")

    print(f"{'receiver':<10} {'ebn0_db':>8} {'mean_mse':>14} {'ber':>12} "
          f"{'trials':>7} {'collapses':>10}")
    for cell in report.cells:
        print(f"{cell.receiver:<10} {cell.ebn0_db:>8.2f} {cell.mean_mse:>14.6g} "
              f"{cell.ber:>12.4e} {cell.trial_count:>7d} {cell.collapse_count:>10d}")
    for path in paths:
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "selftest":
        from .selftest import run_selftest
        return 0 if run_selftest() else 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
