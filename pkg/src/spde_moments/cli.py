"""Command line harness: preset tables, custom runs, grid dumps, MC checks."""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import monte_carlo
from .exceptions import ConfigError, SpdeMomentsError
from .harness import ExperimentConfig, PRESETS, preset, resolve_reference, run
from .problems import build_example
from .reporting import format_table, report_to_csv, report_to_json
from .sparse_grid import smolyak_rule

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3


def _add_run_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", default="reports", help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="RNG seed (mc only)")
    parser.add_argument(
        "--parallel", action="store_true", help="run delta rows concurrently"
    )
    parser.add_argument(
        "--no-figures", action="store_true", help="skip figure rendering"
    )


def _execute(configs, args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for config in configs:
        if args.seed is not None:
            config = ExperimentConfig.from_dict(
                {**_config_dict(config), "seed": args.seed}
            )
        report = run(config, parallel=args.parallel)
        csv_path = out_dir / f"{report.label}.csv"
        report_to_csv(report, csv_path)
        report_to_json(report, out_dir / f"{report.label}.json")
        if not args.no_figures:
            from .figures import save_convergence_figure, save_moment_figure

            save_convergence_figure(report, out_dir / f"{report.label}_convergence.png")
            save_moment_figure(
                _moment_curves(report),
                out_dir / f"{report.label}_moments.png",
                title=f"{report.label}: second moments at T",
            )
        print(format_table(report))
        print(f"wrote {csv_path}")
    return EXIT_OK


def _config_dict(config: ExperimentConfig) -> dict:
    data = {
        "example": config.example,
        "method": config.method,
        "T": config.horizon,
        "grid_points": config.grid_points,
        "modes": config.modes,
        "deltas": list(config.deltas),
        "truncations": list(config.truncations),
        "dt_ratio": config.dt_ratio,
        "constants": config.constants,
        "seed": config.seed,
        "paths": config.paths,
        "label": config.label,
    }
    ref = config.reference
    data["reference"] = {
        key: value
        for key, value in (
            ("mode", ref.mode),
            ("delta", ref.delta),
            ("dt", ref.dt),
            ("order", ref.order),
            ("grid_points", ref.grid_points),
            ("modes", ref.modes),
            ("path", ref.path),
        )
        if value is not None
    }
    return data


def _moment_curves(report) -> dict:
    """Reference plus the finest-delta field of each truncation."""
    curves = {}
    for label, info in report.reference_info["per_truncation"].items():
        key = f"reference ({info['mode']})"
        if key not in curves:
            pts = 2 * math.pi * np.arange(info["grid_points"]) / info["grid_points"]
            curves[key] = (pts, info["moments"])
    by_label: dict = {}
    for row in report.rows:
        best = by_label.get(row.trunc_label)
        if best is None or row.delta < best.delta:
            by_label[row.trunc_label] = row
    grid_pts = report.config["grid_points"]
    xs = 2 * math.pi * np.arange(grid_pts) / grid_pts
    for label, row in by_label.items():
        curves[f"{label} (delta={row.delta:g})"] = (xs, row.diagnostics["moments"])
    return curves


def _cmd_run(args) -> int:
    config = ExperimentConfig.from_json(args.config)
    return _execute([config], args)


def _cmd_table(name):
    def handler(args) -> int:
        return _execute(preset(name), args)

    return handler


def _cmd_dump_grid(args) -> int:
    rule = smolyak_rule(args.level, args.dim)
    if args.out:
        rule.to_csv(args.out)
        print(f"wrote {args.out} ({len(rule)} points)")
    else:
        coords = ",".join(f"x{j + 1}" for j in range(rule.dimension))
        print(f"kappa,{coords},weight")
        for i, (pt, w) in enumerate(zip(rule.points, rule.weights)):
            xs = ",".join(repr(float(x)) for x in pt)
            print(f"{i + 1},{xs},{float(w)!r}")
    return EXIT_OK


def _cmd_mc_check(args) -> int:
    config = ExperimentConfig.from_dict(
        {
            "example": args.example,
            "method": "mc",
            "T": args.T,
            "grid_points": args.grid_points,
            "deltas": [args.T],
            "seed": args.seed,
            "paths": args.paths,
            "reference": {
                "mode": "fine",
                "order": 4,
                "delta": 1e-4,
                "dt": 1e-5,
                "grid_points": 30,
            },
            "label": "mc_check",
        }
    )
    problem = build_example(config.example, config.grid_points, config.constants)
    reference = resolve_reference(config, None)
    estimate = monte_carlo.second_moments(
        problem, config.paths, config.horizon, args.dt, config.seed
    )
    gap = abs(estimate.norm_l2 - reference.l2)
    sigma = max(estimate.norm_l2_stderr, 1e-300)
    print(f"MC     |E u^2|_l2 = {estimate.norm_l2:.6f} +- {estimate.norm_l2_stderr:.2e}")
    print(f"ref    |E u^2|_l2 = {reference.l2:.6f}")
    print(f"gap = {gap:.3e} = {gap / sigma:.2f} standard errors")
    if gap <= 3 * sigma:
        print("PASS: within 3 standard errors")
        return EXIT_OK
    print("FAIL: outside 3 standard errors")
    return EXIT_SOLVER


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spde-moments",
        description=(
            "Second moments of linear advection-diffusion-reaction SPDEs by "
            "recursive multi-stage Wiener chaos and sparse-grid collocation."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a JSON-configured experiment")
    p_run.add_argument("--config", required=True, help="path to config JSON")
    _add_run_options(p_run)
    p_run.set_defaults(handler=_cmd_run)

    for name in PRESETS:
        if name.startswith("table5"):
            continue
        p_tab = sub.add_parser(name, help=f"run the {name} preset")
        _add_run_options(p_tab)
        p_tab.set_defaults(handler=_cmd_table(name))
    p_t5 = sub.add_parser("table5", help="run the table5 preset (wce and scm)")
    _add_run_options(p_t5)
    p_t5.set_defaults(handler=_cmd_table("table5"))

    p_grid = sub.add_parser("dump-grid", help="dump sparse-grid nodes/weights as CSV")
    p_grid.add_argument("--level", type=int, required=True)
    p_grid.add_argument("--dim", type=int, required=True)
    p_grid.add_argument("--out", default=None, help="CSV path (default: stdout)")
    p_grid.set_defaults(handler=_cmd_dump_grid)

    p_mc = sub.add_parser("mc-check", help="Monte Carlo vs fine reference check")
    p_mc.add_argument("--example", default="single")
    p_mc.add_argument("--T", type=float, default=5.0)
    p_mc.add_argument("--grid-points", type=int, default=20, dest="grid_points")
    p_mc.add_argument("--dt", type=float, default=1e-3)
    p_mc.add_argument("--paths", type=int, default=10000)
    p_mc.add_argument("--seed", type=int, default=20150153)
    p_mc.set_defaults(handler=_cmd_mc_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SpdeMomentsError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
