"""Command line harness.

Subcommands: ``gen`` (export a synthetic dataset), ``run`` (first schedule
entry only), ``sweep`` (full schedule), ``table1`` (robustness-constants
table), ``faults`` (fault study).  Each accepts --config, --seed (overrides
the config's master seed) and --out (overrides the config's output path).
Exit status is 0 on success and 1 on configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .experiments import (
    ConfigError,
    ExperimentConfig,
    derive_seed,
    run_fault_study,
    run_sweep,
    table_rows,
    write_csv,
)
from .synth import dataset_to_csv

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drlearn",
        description="Distributed robust learning experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
        p.add_argument("--config", required=config_required,
                       help="YAML experiment configuration")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config's master seed")
        p.add_argument("--out", default=None,
                       help="output CSV path (overrides the config)")

    common(sub.add_parser("gen", help="export the synthetic dataset of the first schedule entry"))
    run_p = sub.add_parser("run", help="run a single experiment (first schedule entry)")
    common(run_p)
    run_p.add_argument("--dump-estimates", default=None,
                       help="also write the per-node estimates of each distributed run")
    common(sub.add_parser("sweep", help="run the full lambda schedule"))
    common(sub.add_parser("faults", help="fault study: median vs average fusion"))
    common(sub.add_parser("table1", help="emit the robustness-constants table"),
           config_required=False)
    return parser


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.from_file(args.config)
    if args.seed is not None:
        config = replace(config, master_seed=args.seed)
    if args.out is not None:
        config = replace(config, output_path=args.out)
    return config


def _output_path(config: ExperimentConfig, command: str) -> str:
    if config.output_path is None:
        raise ConfigError(
            f"'{command}' needs an output path: set output_path in the config or pass --out"
        )
    return config.output_path


def _cmd_gen(args: argparse.Namespace) -> None:
    from .experiments import _generate  # internal reuse of the scenario builder

    config = _load_config(args)
    out = _output_path(config, "gen")
    lam, placement = config.lambda_schedule[0]
    seed = derive_seed(config.master_seed, 0, 0)
    dataset = _generate(config, lam, placement, seed)
    dataset_to_csv(dataset, out)
    print(f"wrote {dataset.n_total} samples to {out}")


def _cmd_run(args: argparse.Namespace) -> None:
    config = _load_config(args)
    out = _output_path(config, "run")
    config = replace(config, lambda_schedule=config.lambda_schedule[:1])
    sink = [] if args.dump_estimates else None
    rows = run_sweep(config, estimate_sink=sink)
    write_csv(rows, out)
    if sink is not None:
        header = [["lambda", "repetition", "node", "kind", "rows", "cols", "values..."]]
        write_csv(header + sink, args.dump_estimates)
        print(f"wrote per-node estimates to {args.dump_estimates}")
    print(f"wrote {len(rows) - 1} rows to {out}")


def _cmd_sweep(args: argparse.Namespace) -> None:
    config = _load_config(args)
    out = _output_path(config, "sweep")
    rows = run_sweep(config)
    write_csv(rows, out)
    print(f"wrote {len(rows) - 1} rows to {out}")


def _cmd_faults(args: argparse.Namespace) -> None:
    config = _load_config(args)
    out = _output_path(config, "faults")
    rows = run_fault_study(config)
    write_csv(rows, out)
    print(f"wrote {len(rows) - 1} rows to {out}")


def _cmd_table1(args: argparse.Namespace) -> None:
    rows = table_rows()
    if args.out is not None:
        write_csv(rows, args.out)
        print(f"wrote {len(rows) - 1} rows to {args.out}")
    else:
        sys.stdout.write(write_csv(rows))


_COMMANDS = {
    "gen": _cmd_gen,
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "faults": _cmd_faults,
    "table1": _cmd_table1,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        _COMMANDS[args.command](args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
