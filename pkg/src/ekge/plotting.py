"""Report figures written next to the CSV / JSON outputs."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import evaluation  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.6),
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "legend.frameon": False,
    "font.size": 9,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def training_history(report, path, title=""):
    """Loss and validation MRR at each evaluation."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        if report.history:
            epochs, loss, mrr = (np.array(c, dtype=float) for c in zip(*report.history))
            ax.plot(epochs, loss, "o-", color="tab:blue", label="train loss")
            ax2 = ax.twinx()
            ax2.plot(epochs, mrr, "s--", color="tab:red", label="valid MRR")
            ax2.set_ylim(0, 1.02)
            ax.set_ylabel("loss", color="tab:blue")
            ax2.set_ylabel("filtered MRR", color="tab:red")
            lines = ax.get_lines() + ax2.get_lines()
            ax.legend(lines, [ln.get_label() for ln in lines], loc="center right")
        ax.set_xlabel("epoch")
        ax.set_title(title)
        _save(fig, path)


def hits_curves(metrics: dict, path, title=""):
    """Hits@k against k for each evaluated slot."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for slot, m in metrics.items():
            if m.ranks is None or len(m.ranks) == 0:
                continue
            ks, hits = evaluation.hits_curve(m.ranks)
            ax.step(ks, hits, where="post", label=f"{slot} (MRR {m.mrr:.3f})")
        ax.set_xscale("log")
        ax.set_xlabel("k")
        ax.set_ylabel("Hits@k")
        ax.set_ylim(0, 1.02)
        ax.legend()
        ax.set_title(title)
        _save(fig, path)


def pr_curves(curves: dict, path, title=""):
    """Precision-recall curves; ``curves`` maps label -> (scores, labels)."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, (scores, labels) in curves.items():
            prec, rec, _ = evaluation.pr_curve(scores, labels)
            area = evaluation.auprc(scores, labels)
            ax.step(np.r_[0.0, rec], np.r_[prec[0], prec], where="pre", label=f"{label} (AUPRC {area:.3f})")
        ax.set_xlabel("recall")
        ax.set_ylabel("precision")
        ax.set_xlim(0, 1)
        ax.set_ylim(0, 1.02)
        ax.legend()
        ax.set_title(title)
        _save(fig, path)


def metric_vs_rank(rows: list[dict], metric: str, path, group: str = "series", title=""):
    """One line per ``group`` value of ``metric`` against model rank."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for name in dict.fromkeys(r[group] for r in rows):
            sel = sorted((r["rank"], r[metric]) for r in rows if r[group] == name)
            ax.plot(*zip(*sel), "o-", label=name)
        ax.set_xlabel("rank")
        ax.set_ylabel(metric)
        ax.legend()
        ax.set_title(title)
        _save(fig, path)
