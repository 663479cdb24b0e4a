"""Figure rendering for experiment tables.

Every table the experiments module produces has a matching renderer keyed
by ``table.name``; :func:`render` dispatches and writes a PNG next to the
CSV.  Rendering is read-only sugar over the tables — no numbers are
computed here beyond what's needed to draw (envelope curves, harmonic-mean
reference lines).
"""

from __future__ import annotations

import math
from typing import Callable

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
import numpy as np  # noqa: E402

from .reporting import Table  # noqa: E402

__all__ = ["render"]

_STYLE = {
    "figure.figsize": (7.0, 4.5),
    "figure.dpi": 110,
    "savefig.dpi": 150,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.axisbelow": True,
    "font.size": 10,
}


def _col(table: Table, name: str) -> list:
    i = table.columns.index(name)
    return [row[i] for row in table.rows]


def _render_sumrate_vs_L(table: Table, ax: plt.Axes) -> None:
    L = _col(table, "L")
    ax.errorbar(L, _col(table, "alg_mean"), yerr=_col(table, "alg_stderr"),
                marker="o", capsize=3, label="sorted-window schedule")
    oracle_pts = [
        (l, m, s) for l, m, s in zip(L, _col(table, "oracle_mean"),
                                     _col(table, "oracle_stderr"))
        if m is not None
    ]
    if oracle_pts:
        ol, om, os_ = zip(*oracle_pts)
        ax.errorbar(ol, om, yerr=os_, marker="s", capsize=3,
                    label="exhaustive oracle")
    ax.plot(L, _col(table, "lower_bound"), "--", color="gray",
            label="closed-form lower bound")
    ax.plot(L, _col(table, "upper_bound"), ":", color="black",
            label="closed-form upper bound")
    ax.set_xscale("log")
    ax.set_xlabel("number of users L")
    ax.set_ylabel("mean sum rate [bits/channel use]")
    ax.legend()


def _render_rate_scatter(table: Table, ax: plt.Axes) -> None:
    ang = np.degrees(np.asarray(_col(table, "angle"), dtype=float))
    rate = np.asarray(_col(table, "rate"), dtype=float)
    norm = np.asarray(_col(table, "norm_sq"), dtype=float)
    finite = np.isfinite(rate)
    sc = ax.scatter(ang[finite], rate[finite], c=norm[finite], s=4,
                    alpha=0.35, cmap="viridis", linewidths=0)
    plt.colorbar(sc, ax=ax, label="coefficient squared norm")
    grid = np.radians(np.linspace(0.5, 90.0, 400))
    for n in sorted(set(norm[finite].astype(int))):
        ceil_vals = [
            max(0.0, 0.5 * math.log2(1.0 / (n * math.sin(t) ** 2)))
            for t in grid
        ]
        ax.plot(np.degrees(grid), ceil_vals, lw=1, alpha=0.8)
    finite_rates = rate[finite]
    if finite_rates.size:
        ax.set_ylim(0.0, float(finite_rates.max()) * 1.1 + 0.1)
    ax.set_xlabel("angle between sub-channel and coefficients [deg]")
    ax.set_ylabel("rate [bits/channel use]")


def _render_sumrate_scatter(table: Table, ax: plt.Axes) -> None:
    norm = np.asarray(_col(table, "norm_sq"), dtype=float)
    sr = np.asarray(_col(table, "sum_rate"), dtype=float)
    finite = np.isfinite(sr)
    jitter = (np.arange(norm.size) % 17 - 8) / 40.0
    ax.scatter(norm[finite] + jitter[finite], sr[finite], s=5, alpha=0.3,
               linewidths=0)
    best = int(np.nanargmax(np.where(finite, sr, -np.inf)))
    ax.scatter([norm[best]], [sr[best]], marker="*", s=140, color="crimson",
               zorder=3, label=f"max at squared norm {int(norm[best])}")
    ax.set_xlabel("squared norm of the best coefficient vector")
    ax.set_ylabel("sum rate [bits/channel use]")
    ax.legend()


def _render_fixed_a(table: Table, fig: plt.Figure) -> None:
    labels = sorted(set(_col(table, "a")))
    axes = fig.subplots(1, len(labels), sharey=True)
    if len(labels) == 1:
        axes = [axes]
    for ax, label in zip(axes, labels):
        rows = [r for r in table.rows if r[table.columns.index("a")] == label]
        policies = sorted({r[table.columns.index("policy")] for r in rows})
        for policy in policies:
            pts = sorted(
                (r[0], r[3], r[4]) for r in rows
                if r[table.columns.index("policy")] == policy
            )
            P, mean, err = zip(*pts)
            ax.errorbar(P, mean, yerr=err, marker="o", capsize=3, label=policy)
        ax.set_xscale("log")
        ax.set_title(f"coefficients {label}")
        ax.set_xlabel("power P")
    axes[0].set_ylabel("mean rate [bits/channel use]")
    axes[0].legend()


def _render_beta_angle(table: Table, ax: plt.Axes) -> None:
    labels = [
        f"k={k} {mode}" for k, mode in zip(_col(table, "k"), _col(table, "mode"))
    ]
    ks = _col(table, "ks_distance")
    bars = ax.bar(range(len(ks)), ks, width=0.6)
    for bar, dep in zip(bars, _col(table, "dependent")):
        if dep:
            bar.set_hatch("//")
            bar.set_alpha(0.5)
    ax.axhline(0.02, color="crimson", ls="--", lw=1,
               label="0.02 acceptance line (independent rows)")
    ax.set_xticks(range(len(labels)), labels)
    ax.set_ylabel("KS distance to Beta(1/2, (k-1)/2)")
    ax.legend()


def _render_completion_time(table: Table, ax: plt.Axes) -> None:
    L = _col(table, "L")
    ax.errorbar(L, _col(table, "mean_phases"), yerr=_col(table, "stderr"),
                marker="o", capsize=3,
                label=f"policy={table.rows[0][2]}, field={table.rows[0][3]}")
    if table.rows and table.rows[0][2] == "unit":
        grid = np.linspace(min(L), max(L), 200)
        coupon = [l * sum(1.0 / i for i in range(1, int(round(l)) + 1))
                  for l in grid.astype(int)]
        ax.plot(grid.astype(int), coupon, "--", color="gray",
                label="coupon-collector mean L*H_L")
    ax.plot(L, L, ":", color="black", label="hard floor L")
    ax.set_xlabel("number of users L")
    ax.set_ylabel("phases until full rank")
    ax.legend()


def render(table: Table, path: str) -> str:
    """Draw the figure matching ``table.name`` and write it to ``path``."""
    with plt.rc_context(_STYLE):
        fig = plt.figure()
        try:
            if table.name == "fixed_a_comparison":
                fig.set_size_inches(10.5, 4.0)
                _render_fixed_a(table, fig)
            else:
                ax = fig.add_subplot(111)
                simple: dict[str, Callable[[Table, plt.Axes], None]] = {
                    "sumrate_vs_L": _render_sumrate_vs_L,
                    "rate_scatter": _render_rate_scatter,
                    "sumrate_scatter": _render_sumrate_scatter,
                    "beta_angle": _render_beta_angle,
                    "completion_time": _render_completion_time,
                }
                if table.name not in simple:
                    raise ValueError(f"no renderer for table {table.name!r}")
                simple[table.name](table, ax)
            fig.suptitle(table.name.replace("_", " "))
            fig.tight_layout()
            fig.savefig(path)
        finally:
            plt.close(fig)
    return path
