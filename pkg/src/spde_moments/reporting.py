"""Report serialization: delimited output, JSON artifacts, console tables."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .harness import ConvergenceReport

CSV_COLUMNS = (
    "delta",
    "dt",
    "trunc_label",
    "rho2_abs",
    "rho2_rel",
    "rhoinf_abs",
    "rhoinf_rel",
    "order_l2",
    "order_linf",
    "wall_seconds",
)


def _fmt_order(value: float | None) -> str:
    return "" if value is None else f"{value:.4f}"


def report_to_csv(report: ConvergenceReport, path) -> None:
    lines = [",".join(CSV_COLUMNS)]
    for row in report.rows:
        lines.append(
            ",".join(
                (
                    repr(row.delta),
                    repr(row.dt),
                    row.trunc_label,
                    f"{row.rho2_abs:.10e}",
                    f"{row.rho2_rel:.10e}",
                    f"{row.rhoinf_abs:.10e}",
                    f"{row.rhoinf_rel:.10e}",
                    _fmt_order(row.order_l2),
                    _fmt_order(row.order_linf),
                    f"{row.wall_seconds:.3f}",
                )
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def report_to_json(report: ConvergenceReport, path) -> None:
    payload = {
        "label": report.label,
        "config": report.config,
        "reference": report.reference_info,
        "rows": [
            {
                "delta": row.delta,
                "dt": row.dt,
                "trunc_label": row.trunc_label,
                "rho2_abs": row.rho2_abs,
                "rho2_rel": row.rho2_rel,
                "rhoinf_abs": row.rhoinf_abs,
                "rhoinf_rel": row.rhoinf_rel,
                "order_l2": row.order_l2,
                "order_linf": row.order_linf,
                "wall_seconds": row.wall_seconds,
                **row.diagnostics,
            }
            for row in report.rows
        ],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def reference_to_json(
    info: dict, moments: np.ndarray, grid_points: int, norm_l2: float, norm_linf: float, path
) -> None:
    """Persist a reference field so later runs can load it with mode=file."""
    payload = {
        **info,
        "grid_points": grid_points,
        "norm_l2": norm_l2,
        "norm_linf": norm_linf,
        "moments": [float(v) for v in moments],
    }
    Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def format_table(report: ConvergenceReport) -> str:
    """Console table mirroring the benchmark layout."""
    header = (
        f"{'delta':>9} {'dt':>9} {'trunc':>10} {'rho2_rel':>12} {'order':>7} "
        f"{'rhoinf_rel':>12} {'order':>7} {'time(s)':>9}"
    )
    lines = [f"== {report.label} ==", header, "-" * len(header)]
    previous = None
    for row in report.rows:
        if previous is not None and previous != row.trunc_label:
            lines.append("-" * len(header))
        previous = row.trunc_label
        lines.append(
            f"{row.delta:>9.1e} {row.dt:>9.1e} {row.trunc_label:>10} "
            f"{row.rho2_rel:>12.4e} {_fmt_order(row.order_l2) or '--':>7} "
            f"{row.rhoinf_rel:>12.4e} {_fmt_order(row.order_linf) or '--':>7} "
            f"{row.wall_seconds:>9.2f}"
        )
    return "\n".join(lines)
