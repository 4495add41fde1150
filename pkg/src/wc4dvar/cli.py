"""Command-line interface: run, ensemble, singvals, config."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments
from .pcg import write_trace_csv
from .precond import VARIANTS

_CQ_CHOICES = {"0.75dx": 0.75, "2dx": 2.0}


def _config_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--case", type=int, choices=sorted(experiments.CASES), default=1)
    parser.add_argument("--precond", choices=VARIANTS, default="none")
    parser.add_argument("--rank", type=int, default=30)
    parser.add_argument("--oversample", type=int, default=5)
    parser.add_argument("--iters", type=int, default=100)
    parser.add_argument("--seed-truth", type=int, default=1000)
    parser.add_argument("--seed-noise", type=int, default=2000)
    parser.add_argument("--seed-sketch", type=int, default=3000)
    parser.add_argument(
        "--large-model-error",
        action="store_true",
        help="double the model-error std and widen its correlation length scale",
    )
    parser.add_argument(
        "--cq-lengthscale",
        choices=sorted(_CQ_CHOICES),
        default=None,
        help="pin the model-error correlation length scale explicitly",
    )


def _resolve_config(args: argparse.Namespace) -> experiments.ExperimentConfig:
    factor = _CQ_CHOICES[args.cq_lengthscale] if args.cq_lengthscale else None
    return experiments.ExperimentConfig.for_case(
        case=args.case,
        large_model_error=args.large_model_error,
        cq_lengthscale_factor=factor,
        precond=args.precond,
        rank=args.rank,
        oversample=args.oversample,
        iterations=args.iters,
        seed_truth=args.seed_truth,
        seed_noise=args.seed_noise,
        seed_sketch=args.seed_sketch,
    )


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    twin = experiments.generate_twin(cfg)
    trace = experiments.run_inner(cfg, twin)
    write_trace_csv(trace, args.out)
    print(f"wrote {args.out} ({len(trace)} records, status {trace.status})")
    return 0


def _cmd_ensemble(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    twin = experiments.generate_twin(cfg)
    result = experiments.run_ensemble(cfg, twin, args.realisations)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for m, trace in enumerate(result.member_traces):
        write_trace_csv(trace, out_dir / f"member_{m:03d}.csv")
    experiments.write_ensemble_csv(result, out_dir / "aggregate.csv")
    print(
        f"wrote {len(result.member_traces)} member traces and aggregate.csv to {out_dir}"
        + (f" ({result.breakdown_count} breakdowns excluded)" if result.breakdown_count else "")
    )
    return 0


def _cmd_singvals(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    ranks = tuple(int(r) for r in args.ranks.split(","))
    table = experiments.singular_value_table(
        cfg, args.which, ranks, seed=args.seed_sketch, reduced_scale=args.reduced_scale
    )
    experiments.write_singular_values_csv(table, args.out)
    print(f"wrote {args.out} (ranks {ranks}, exact={'yes' if table.exact is not None else 'no'})")
    return 0


def _cmd_config(args: argparse.Namespace) -> int:
    cfg = _resolve_config(args)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            experiments.write_config_dump(cfg, fh)
        print(f"wrote {args.out}")
    else:
        experiments.write_config_dump(cfg, sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wc4dvar",
        description="Twin experiments for the matrix-free weak-constraint solver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one traced inner solve, trace written as CSV")
    _config_arguments(run)
    run.add_argument("--out", required=True)
    run.set_defaults(fn=_cmd_run)

    ens = sub.add_parser("ensemble", help="repeat the solve over sketch realisations")
    _config_arguments(ens)
    ens.add_argument("--realisations", type=int, default=100)
    ens.add_argument("--out-dir", required=True)
    ens.set_defaults(fn=_cmd_ensemble)

    sv = sub.add_parser("singvals", help="singular-value table of the sketched operators")
    _config_arguments(sv)
    sv.add_argument("--which", choices=("P", "W"), required=True)
    sv.add_argument("--ranks", default="30,60,90", help="comma-separated ranks")
    sv.add_argument("--reduced-scale", action="store_true")
    sv.add_argument("--out", required=True)
    sv.set_defaults(fn=_cmd_singvals)

    cfg = sub.add_parser("config", help="dump the resolved configuration")
    _config_arguments(cfg)
    cfg.add_argument("--dump", action="store_true", help="write the resolved configuration")
    cfg.add_argument("--out", default=None)
    cfg.set_defaults(fn=_cmd_config)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
