"""Command-line front end for the experiment runner.

Each subcommand builds an :class:`~bctsim.harness.ExperimentConfig`, runs the
sweep, and writes the table to ``--out`` (or stdout). Grid flags use the form
``lo:hi:steps`` with inclusive endpoints, values in radians. Exit status is 0
on success and 2 on configuration or I/O problems; measured anomalies are
data in the table, never an error.
"""

from __future__ import annotations

import argparse
import sys

from .harness import (
    STRATEGY_TOKENS,
    ConfigError,
    EmitError,
    ExperimentConfig,
    emit,
    render_text,
    run_experiment,
)
from .protocol import CoinMode, FlipSemantics, Strategy

__all__ = ["main", "build_parser", "parse_grid"]

_SEMANTICS_TOKENS = {
    "continue": FlipSemantics.CONTINUE,
    "terminate": FlipSemantics.TERMINATE,
}

_DEFAULT_GRIDS = {
    "correlation": dict(angle_grid="0:6.283185307179586:25"),
    "calibrate": dict(angle_grid="0:6.283185307179586:25"),
    "opposite-axes": dict(nu_grid="0:0.6283185307179586:11"),
    "remedy": dict(nu_grid="0.3141592653589793:0.3141592653589793:1"),
    "visibility": dict(visibility_grid="0.5:1:6", nu_grid="0.3141592653589793:0.3141592653589793:1"),
    "audit": dict(theta_grid="0.9424777960769379:1.5707963267948966:21"),
}


def parse_grid(spec: str) -> tuple[float, ...]:
    """Parse ``lo:hi:steps`` into an inclusive linear grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must look like lo:hi:steps, got {spec!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
        steps = int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"bad grid {spec!r}: {exc}") from exc
    if steps < 1:
        raise ConfigError(f"grid needs at least one step, got {spec!r}")
    if steps == 1:
        return (lo,)
    return tuple(lo + (hi - lo) * i / (steps - 1) for i in range(steps))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bctsim",
        description="Monte Carlo experiments on the slot-message simulation of Bell correlations.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--trials", type=int, default=100_000, metavar="N")
    common.add_argument(
        "--seed", type=int, default=0, metavar="S",
        help="master seed; batches derive deterministic substreams from it",
    )
    common.add_argument(
        "--strategy", choices=sorted(STRATEGY_TOKENS), default="paper-iic",
        help="reading of the axis-reflection step (paper-iic = no reflection, the walkthrough variant)",
    )
    common.add_argument(
        "--flip-semantics", choices=sorted(_SEMANTICS_TOKENS), default="continue",
        help="continue on the reflected axis and negate, or terminate with the negated sign",
    )
    common.add_argument("--coin", choices=[m.value for m in CoinMode], default="independent",
                        help="whether the two evaluations of a two-Bob round share the step coin")
    common.add_argument("--angle-grid", metavar="LO:HI:STEPS", help="setting angles (correlation, calibrate)")
    common.add_argument("--nu-grid", metavar="LO:HI:STEPS", help="offsets above 2*pi/5 in [0, pi/5]")
    common.add_argument("--theta-grid", metavar="LO:HI:STEPS", help="conditioned shared angles in [0, 3*pi/5)")
    common.add_argument("--visibility-grid", metavar="LO:HI:STEPS", help="visibility factors in [0, 1]")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", metavar="PATH", help="output file; stdout when omitted")
    common.add_argument("--workers", type=int, default=1, metavar="K")
    common.add_argument("--batch-size", type=int, default=250_000, metavar="B")

    sub = parser.add_subparsers(dest="experiment", required=True)
    sub.add_parser("correlation", parents=[common],
                   help="equal-outcome rate vs the cos^2 law over an angle grid")
    sub.add_parser("opposite-axes", parents=[common],
                   help="equal outputs on antipodal axes vs the closed form over a nu grid")
    sub.add_parser("visibility", parents=[common],
                   help="visibility arithmetic and its erasure simulation over a (V, nu) grid")
    sub.add_parser("audit", parents=[common],
                   help="per-theta conservation-law audit with conditioned replays")
    sub.add_parser("remedy", parents=[common],
                   help="reflection remedies: anomaly rate and correlation damage per reading")
    sub.add_parser("calibrate", parents=[common],
                   help="score every reflection reading against the cos^2 law")
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    grids = {}
    for name in ("angle_grid", "nu_grid", "theta_grid", "visibility_grid"):
        spec = getattr(args, name)
        if spec is None:
            spec = _DEFAULT_GRIDS.get(args.experiment, {}).get(name)
        grids[name] = parse_grid(spec) if spec else ()
    return ExperimentConfig(
        experiment=args.experiment,
        trials=args.trials,
        seed=args.seed,
        strategy=Strategy(STRATEGY_TOKENS[args.strategy], _SEMANTICS_TOKENS[args.flip_semantics]),
        coin_mode=CoinMode(args.coin),
        out_format=args.format,
        out_path=args.out,
        workers=args.workers,
        batch_size=args.batch_size,
        **grids,
    )


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _config_from_args(args).validate()
        table = run_experiment(config)
        if config.out_path:
            emit(table, config.out_format, config.out_path)
            print(f"wrote {len(table.rows)} rows to {config.out_path}", file=sys.stderr)
        else:
            sys.stdout.write(render_text(table, config.out_format))
        if args.experiment == "calibrate" and table.rows:
            best = min(table.rows, key=lambda r: r["strategy_max_deviation"])
            print(
                f"best fit: {best['strategy']} "
                f"(max deviation {best['strategy_max_deviation']:.6g})",
                file=sys.stderr,
            )
    except (ConfigError, EmitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
