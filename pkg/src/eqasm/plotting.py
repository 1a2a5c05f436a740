"""Figures for sweep reports (rendered off-screen)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_sweep(rows, path, title: str | None = None) -> None:
    """Grouped bars of normalized instruction count per config, one bar per VLIW width.

    ``rows`` are dicts with at least benchmark, config_id, w and normalized.
    One panel per benchmark.
    """
    benchmarks = sorted({r["benchmark"] for r in rows})
    widths = sorted({int(r["w"]) for r in rows})
    fig, axes = plt.subplots(len(benchmarks), 1, figsize=(8, 2.6 * len(benchmarks)), squeeze=False,
                             sharex=True)
    bar = 0.8 / len(widths)
    for ax, bench in zip(axes[:, 0], benchmarks):
        sub = [r for r in rows if r["benchmark"] == bench]
        configs = sorted({int(r["config_id"]) for r in sub})
        for k, w in enumerate(widths):
            pts = {int(r["config_id"]): float(r["normalized"]) for r in sub if int(r["w"]) == w}
            xs = [c + (k - (len(widths) - 1) / 2) * bar for c in configs if c in pts]
            ax.bar(xs, [pts[c] for c in configs if c in pts], width=bar, label=f"w={w}")
        ax.set_ylabel("normalized #instr")
        ax.set_title(bench, fontsize=10, loc="left")
        ax.set_ylim(0, 1.05)
        ax.grid(axis="y", alpha=0.3)
    axes[-1, 0].set_xticks(range(1, 11))
    axes[-1, 0].set_xlabel("config")
    axes[0, 0].legend(ncol=len(widths), fontsize=8, loc="upper right")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
