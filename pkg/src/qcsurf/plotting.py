"""Figures for the CLI report paths.  Rendered off-screen to image files."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_STYLE = {
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    # fixed metadata keeps repeated renders byte-identical
    "svg.hashsalt": "qcsurf",
}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, metadata={"Software": None} if path.suffix == ".png" else None)
    plt.close(fig)
    return path


def plot_pentagon_scan(rows: Sequence, path, tol: float = 1e-9) -> Path:
    """Slack d - (c - a) against c - a, one curve per value of a."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        by_a: dict[float, list] = {}
        for r in rows:
            by_a.setdefault(r.a, []).append(r)
        for a, rs in sorted(by_a.items()):
            ax.plot([r.c - a for r in rs], [r.slack for r in rs], marker=".", ms=3, lw=1, label=f"a = {a:g}")
        ax.axhline(-tol, color="k", lw=0.6, ls="--")
        ax.set_xlabel("c - a")
        ax.set_ylabel("slack  d - (c - a)")
        ax.legend(frameon=False, fontsize=7, ncol=2)
        return _save(fig, path)


def plot_certificate(cert, path) -> Path:
    """Log margin of every ledger row: log(returning bound) - log(K (2k+1)!)."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 3.4))
        ns = [r.n for r in cert.ledger]
        margins = [r.log_margin for r in cert.ledger]
        colors = ["tab:green" if r.verdict == "contradiction established" else "tab:red" for r in cert.ledger]
        ax.bar(ns, margins, color=colors, width=0.7)
        ax.axhline(0.0, color="k", lw=0.6)
        ax.set_xlabel("n")
        ax.set_ylabel("log margin")
        ax.set_title(f"K = {cert.K:g}, N = {cert.N}, {cert.case_tag}", fontsize=9)
        return _save(fig, path)
