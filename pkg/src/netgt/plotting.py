"""Figures for sweep results: mean tests vs seed probability with bound curves."""

from __future__ import annotations

from pathlib import Path
from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .algorithms import BINARY_SPLITTING, GRAPH_AWARE  # noqa: E402

STYLE = {
    BINARY_SPLITTING: dict(color="tab:blue", marker="o", label="binary splitting"),
    GRAPH_AWARE: dict(color="tab:orange", marker="s", label="graph-aware"),
}

RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 7,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (5.0, 3.4),
    "savefig.dpi": 150,
}


def plot_sweep(rows: Sequence, path, title: Optional[str] = None) -> Path:
    """Error bars are +/- one standard deviation of the test counts."""
    ps = [r.p for r in rows]
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        for alg in rows[0].tests:
            style = STYLE.get(alg, dict(label=alg))
            ax.errorbar(ps, [r.tests[alg].mean for r in rows],
                        yerr=[r.tests[alg].std_dev for r in rows],
                        capsize=2, markersize=3, linewidth=1, **style)
            ax.plot(ps, [r.upper_bound(alg) for r in rows], linestyle="--",
                    linewidth=0.9, color=style.get("color"),
                    label=f"upper bound ({style['label']})")
        ax.plot(ps, [r.lb_estimate for r in rows], color="black", linestyle=":",
                linewidth=1, label="entropy lower bound")
        ax.set_xlabel("seed probability p")
        ax.set_ylabel("tests")
        if title:
            ax.set_title(title)
        ax.legend(loc="upper left", frameon=False)
        fig.tight_layout()
        path = Path(path)
        fig.savefig(path)
        plt.close(fig)
    return path
