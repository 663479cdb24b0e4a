"""Command-line interface: one subcommand per operation or experiment.

Output discipline: machine-readable CSV on stdout (or written to --out with
a JSON manifest sidecar and, for experiment tables, a rendered PNG next to
the CSV), human diagnostics and the resolved run configuration on stderr.
Exit codes: 0 success, 1 runtime/guard failure (one-line reason on stderr),
2 usage error.  Identical argv implies identical stdout bytes.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Any, Sequence

import numpy as np

from .bounds import (
    BoundParams,
    band_edge,
    band_probability,
    lower_scaling_ratio,
    sumrate_lower_bound,
    sumrate_upper_bound,
    upper_scaling_ratio,
)
from .coeffs import GuardError, best_sumrate_coeff, optimal_coeff
from .experiments import (
    ExperimentConfig,
    run_beta_angle_check,
    run_completion_time,
    run_fixed_a_comparison,
    run_rate_scatter,
    run_sumrate_scatter,
    run_sumrate_vs_L,
    sample_channel,
)
from .rates import computation_rate, mmse_alpha
from .reporting import (
    Table,
    figure_path_for,
    to_csv_text,
    write_csv,
    write_manifest,
)
from .scheduling import (
    ScheduleResult,
    exhaustive_allones_schedule,
    exhaustive_schedule,
    min_angle_schedule,
    sorted_window_schedule,
)

__all__ = ["main"]


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated real list: {text!r}")


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}")


def _echo_config(payload: dict[str, Any]) -> None:
    sys.stderr.write("# config " + json.dumps(payload, sort_keys=True) + "\n")


def _print_table(table: Table) -> None:
    sys.stdout.write(to_csv_text(table))


def _emit_experiment(table: Table, cfg: ExperimentConfig,
                     args: argparse.Namespace) -> None:
    _echo_config(cfg.to_dict())
    if args.out:
        csv_path = write_csv(table, args.out)
        print(csv_path)
        print(write_manifest(table, csv_path, cfg.to_dict()))
        if not args.no_plot:
            from .figures import render

            print(render(table, figure_path_for(csv_path)))
    else:
        _print_table(table)


def _channel(args: argparse.Namespace) -> list[float]:
    if getattr(args, "h", None):
        return list(args.h)
    if getattr(args, "L", None):
        seq = np.random.SeedSequence(args.seed)
        return [float(x) for x in sample_channel(args.L, seq)]
    raise ValueError("provide a channel with --h or draw one with --L/--seed")


def _join(values: Sequence[float | int]) -> str:
    return " ".join(str(v) for v in values)


def _schedule_table(res: ScheduleResult) -> Table:
    t = Table("schedule", ["users", "channel", "coeffs", "rate", "sum_rate"])
    t.append(_join(res.user_indices),
             _join(f"{v:.17g}" for v in res.sub_channel),
             _join(res.coeffs), res.rate, res.sum_rate)
    return t


# ============================================================
# subcommand handlers
# ============================================================

def _cmd_rate(args: argparse.Namespace) -> None:
    _echo_config({"h": args.h, "a": args.a, "P": args.P})
    res = computation_rate(args.h, args.a, args.P)
    t = Table("rate", ["rate", "alpha", "angle", "nnz", "sum_rate"])
    t.append(res.rate, res.alpha, res.angle, res.nnz, res.sum_rate)
    _print_table(t)


def _cmd_coeff_opt(args: argparse.Namespace) -> None:
    h = _channel(args)
    _echo_config({"h": h, "P": args.P, "objective": args.objective,
                  "seed": args.seed, "L": args.L})
    search = optimal_coeff if args.objective == "rate" else best_sumrate_coeff
    a, res = search(h, args.P)
    t = Table("coeff_opt", ["a", "norm_sq", "rate", "alpha", "angle", "nnz", "sum_rate"])
    t.append(_join(a), sum(x * x for x in a), res.rate, res.alpha, res.angle,
             res.nnz, res.sum_rate)
    _print_table(t)


def _cmd_schedule(args: argparse.Namespace) -> None:
    h = _channel(args)
    _echo_config({"h": h, "k": args.k, "P": args.P, "seed": args.seed,
                  "L": args.L})
    _print_table(_schedule_table(sorted_window_schedule(h, args.k, args.P)))


def _cmd_oracle(args: argparse.Namespace) -> None:
    h = _channel(args)
    _echo_config({"h": h, "k": args.k, "P": args.P, "mode": args.mode,
                  "seed": args.seed, "L": args.L})
    fn = exhaustive_schedule if args.mode == "full" else exhaustive_allones_schedule
    _print_table(_schedule_table(fn(h, args.k, args.P)))


def _cmd_min_angle(args: argparse.Namespace) -> None:
    h = _channel(args)
    k = len(args.a)
    _echo_config({"h": h, "a": args.a, "k": k, "P": args.P, "seed": args.seed,
                  "L": args.L})
    _print_table(_schedule_table(min_angle_schedule(h, k, args.a, args.P)))


def _cmd_bounds(args: argparse.Namespace) -> None:
    _echo_config({"L": args.L, "k": args.k, "P": args.P, "delta": args.delta})
    params = BoundParams(L=args.L, k=args.k, P=args.P, delta=args.delta)
    t = Table("bounds", [
        "L", "k", "P", "delta", "band_edge", "band_probability",
        "lower_bound", "upper_bound", "chernoff_premise_ok",
    ])
    t.append(args.L, args.k, args.P, args.delta, params.u, params.band_p,
             sumrate_lower_bound(args.L, args.k, args.P, args.delta),
             sumrate_upper_bound(args.L, args.k, args.P),
             int(params.chernoff_premise_ok()))
    _print_table(t)


def _cmd_scaling(args: argparse.Namespace) -> None:
    grid = [int(x) for x in (args.grid or [10**4, 10**6, 10**9, 10**12])]
    _echo_config({"grid": grid, "k": args.k, "P": args.P, "delta": args.delta})
    t = Table("scaling", ["L", "lower_ratio", "upper_ratio"])
    for L in grid:
        t.append(L, lower_scaling_ratio(L, args.k, args.P, args.delta),
                 upper_scaling_ratio(L, args.k, args.P))
    _print_table(t)


def _experiment_config(args: argparse.Namespace, **overrides: Any) -> ExperimentConfig:
    fields: dict[str, Any] = {
        "seed": args.seed,
        "trials": getattr(args, "trials", 500),
        "k": getattr(args, "k", 3),
        "P": getattr(args, "P", 100.0),
        "threads": args.threads,
    }
    fields.update(overrides)
    return ExperimentConfig(**fields)


def _cmd_fig1(args: argparse.Namespace) -> None:
    grid = tuple(int(x) for x in (args.grid or [10, 20, 45, 100, 200]))
    cfg = _experiment_config(args, L_grid=grid, delta=args.delta,
                             oracle_max_L=args.oracle_max_L)
    _emit_experiment(run_sumrate_vs_L(cfg), cfg, args)


def _cmd_fig2(args: argparse.Namespace) -> None:
    grid = tuple(int(x) for x in (args.grid or [15, 45]))
    cfg = _experiment_config(args, L_grid=grid, max_norm_sq=args.max_norm_sq)
    _emit_experiment(run_rate_scatter(cfg), cfg, args)


def _cmd_fig3(args: argparse.Namespace) -> None:
    cfg = _experiment_config(args, L=args.L, max_norm_sq=args.max_norm_sq)
    _emit_experiment(run_sumrate_scatter(cfg), cfg, args)


def _cmd_fig4(args: argparse.Namespace) -> None:
    p_grid = tuple(float(x) for x in (args.grid or [1.0, 10.0, 100.0, 1000.0]))
    profiles = tuple(tuple(a) for a in args.a) if args.a else \
        ((2, 1, 1), (2, 2, 1), (3, 2, 1))
    cfg = _experiment_config(args, L=args.L, P_grid=p_grid,
                             coeff_sets=profiles)
    _emit_experiment(run_fixed_a_comparison(cfg), cfg, args)


def _cmd_beta_check(args: argparse.Namespace) -> None:
    cfg = _experiment_config(args, L=args.L)
    _emit_experiment(run_beta_angle_check(cfg), cfg, args)


def _cmd_completion_time(args: argparse.Namespace) -> None:
    grid = tuple(int(x) for x in (args.grid or [args.L]))
    cfg = _experiment_config(args, L=args.L, L_grid=grid, policy=args.policy,
                             rank_field=args.field, k_rule=args.k_rule)
    _emit_experiment(run_completion_time(cfg), cfg, args)


# ============================================================
# parser
# ============================================================

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cfsched",
        description="Compute-and-forward user scheduling: rates, integer "
                    "coefficient search, closed-form bounds and seeded "
                    "Monte-Carlo experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, handler, *, seeded: bool = False,
            experiment: bool = False):
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.set_defaults(handler=handler)
        if seeded or experiment:
            p.add_argument("--seed", type=int, default=0,
                           help="root seed for all randomness (default 0)")
        if experiment:
            p.add_argument("--out", type=str, default=None,
                           help="write CSV here (plus .manifest.json and .png) "
                                "instead of stdout")
            p.add_argument("--threads", type=int,
                           default=max(1, os.cpu_count() or 1),
                           help="worker processes; never changes results")
            p.add_argument("--no-plot", action="store_true",
                           help="skip rendering the PNG next to --out")
        return p

    p = add("rate", "rate, scaling factor and angle for one (h, a, P) triple",
            _cmd_rate)
    p.add_argument("--h", type=_floats, required=True,
                   help="channel vector, comma-separated reals")
    p.add_argument("--a", type=_ints, required=True,
                   help="integer coefficient vector, comma-separated")
    p.add_argument("--P", type=float, required=True, help="transmit power")

    for name, handler, extra in [
        ("coeff-opt", _cmd_coeff_opt,
         "exact best integer coefficients for a channel"),
        ("schedule", _cmd_schedule,
         "sorted-magnitude window schedule over L users"),
        ("oracle", _cmd_oracle,
         "exhaustive subset scan (all-ones or full coefficient search)"),
        ("min-angle", _cmd_min_angle,
         "best subset for a fixed coefficient profile by angle"),
    ]:
        p = add(name, extra, handler, seeded=True)
        p.add_argument("--h", type=_floats, default=None,
                       help="explicit channel vector (overrides --L)")
        p.add_argument("--L", type=int, default=None,
                       help="draw a standard normal channel of this size")
        p.add_argument("--P", type=float, default=100.0,
                       help="transmit power (default 100)")
        if name == "coeff-opt":
            p.add_argument("--objective", choices=("rate", "sum-rate"),
                           default="rate",
                           help="maximise the rate or nnz*rate (default rate)")
        if name in ("schedule", "oracle"):
            p.add_argument("--k", type=int, default=3,
                           help="scheduled subset size (default 3)")
        if name == "oracle":
            p.add_argument("--mode", choices=("allones", "full"),
                           default="full",
                           help="all-ones window objective or full per-subset "
                                "coefficient search (default full)")
        if name == "min-angle":
            p.add_argument("--a", type=_ints, required=True,
                           help="fixed coefficient profile; its length sets k")
            p.set_defaults(P=None)

    p = add("bounds", "closed-form lower/upper sum-rate bounds at one L",
            _cmd_bounds)
    p.add_argument("--L", type=int, required=True, help="population size")
    p.add_argument("--k", type=int, default=3, help="scheduled users (default 3)")
    p.add_argument("--P", type=float, default=100.0, help="power (default 100)")
    p.add_argument("--delta", type=float, default=0.005,
                   help="magnitude band width (default 0.005)")

    p = add("scaling", "bound-to-scaling-law ratios across a population grid",
            _cmd_scaling)
    p.add_argument("--grid", type=_ints, default=None,
                   help="comma-separated L values "
                        "(default 1e4,1e6,1e9,1e12)")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--P", type=float, default=100.0)
    p.add_argument("--delta", type=float, default=0.005)

    p = add("fig1", "mean scheduled sum rate vs L with oracle and bounds",
            _cmd_fig1, experiment=True)
    p.add_argument("--grid", type=_ints, default=None,
                   help="L values (default 10,20,45,100,200)")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--P", type=float, default=100.0)
    p.add_argument("--delta", type=float, default=0.005)
    p.add_argument("--oracle-max-L", type=int, default=20,
                   help="largest L for the exhaustive oracle column")

    p = add("fig2", "per-subset rate scatter with the angle/norm ceiling",
            _cmd_fig2, experiment=True)
    p.add_argument("--grid", type=_ints, default=None,
                   help="L values, one channel draw each (default 15,45)")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--P", type=float, default=1000.0)
    p.add_argument("--max-norm-sq", type=int, default=5,
                   help="candidate coefficient norm cap (default 5)")

    p = add("fig3", "per-subset best sum rate vs coefficient norm",
            _cmd_fig3, experiment=True)
    p.add_argument("--L", type=int, default=45)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--P", type=float, default=1000.0)
    p.add_argument("--max-norm-sq", type=int, default=5,
                   help="coefficient family norm cap; 0 runs the unbounded "
                        "per-subset sum-rate search")

    p = add("fig4", "fixed-coefficient scheduling policies across powers",
            _cmd_fig4, experiment=True)
    p.add_argument("--L", type=int, default=20)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--grid", type=_floats, default=None,
                   help="power values (default 1,10,100,1000)")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--a", type=_ints, action="append", default=None,
                   help="coefficient profile, repeatable "
                        "(default 2,1,1 / 2,2,1 / 3,2,1)")

    p = add("beta-check", "squared-cosine law of Gaussian channels vs Beta",
            _cmd_beta_check, experiment=True)
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--L", type=int, default=20,
                   help="population for the dependent shared-channel row")

    p = add("completion-time", "phases until collected rows reach full rank",
            _cmd_completion_time, experiment=True)
    p.add_argument("--L", type=int, default=30)
    p.add_argument("--grid", type=_ints, default=None,
                   help="sweep of L values (default just --L)")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--P", type=float, default=100.0)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--policy",
                   choices=("unit", "random", "scheduled", "dense"),
                   default="unit")
    p.add_argument("--field", choices=("rational", "gf2"), default="rational")
    p.add_argument("--k-rule", choices=("fixed", "log2"), default="fixed",
                   help="fixed k, or k = ceil(log2 L) per grid point")

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        args.handler(args)
    except (ValueError, GuardError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
