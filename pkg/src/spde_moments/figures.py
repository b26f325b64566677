"""Matplotlib rendering of convergence reports, written next to the CSVs."""

from __future__ import annotations

from collections import defaultdict

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import ConvergenceReport

_MARKERS = ("o", "s", "^", "d", "v", "x")


def save_convergence_figure(report: ConvergenceReport, path) -> None:
    """Log-log error-vs-delta plot, one curve per truncation, with
    first/second order slope guides."""
    groups: dict[str, list] = defaultdict(list)
    for row in report.rows:
        groups[row.trunc_label].append(row)
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.6), sharex=True)
    for ax, attr, title in zip(
        axes, ("rho2_rel", "rhoinf_rel"), (r"relative $l^2$ error", r"relative $l^\infty$ error")
    ):
        for marker, (label, rows) in zip(_MARKERS, sorted(groups.items())):
            deltas = [r.delta for r in rows]
            errors = [getattr(r, attr) for r in rows]
            ax.loglog(deltas, errors, marker=marker, label=label)
        all_deltas = sorted({r.delta for r in report.rows})
        anchor = max(
            getattr(r, attr) for r in report.rows if r.delta == all_deltas[-1]
        )
        guide = np.array(all_deltas)
        ax.loglog(guide, anchor * guide / guide[-1], "k:", lw=0.8, label=r"slope 1")
        ax.loglog(guide, anchor * (guide / guide[-1]) ** 2, "k--", lw=0.8, label=r"slope 2")
        ax.set_xlabel(r"$\Delta$")
        ax.set_title(title, fontsize=10)
        ax.grid(True, which="both", alpha=0.3)
    axes[0].legend(fontsize=8)
    fig.suptitle(report.label, fontsize=11)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_moment_figure(curves: dict, path, title: str = "") -> None:
    """Second-moment fields over the spatial grid.

    curves maps a label to a (points, values) pair; curves from grids of
    different resolution can share the figure.
    """
    fig, ax = plt.subplots(figsize=(5.6, 3.4))
    for marker, (label, (points, values)) in zip(_MARKERS, curves.items()):
        xs = np.asarray(points)
        ax.plot(xs, values, marker=marker, ms=3, lw=1, label=label)
    ax.set_xlabel("x")
    ax.set_ylabel(r"second moment")
    if title:
        ax.set_title(title, fontsize=10)
    ax.grid(alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
