"""Figure rendering for sweep output.

Each panel compares one quantity across the non-neutral, neutral and (when
present) bargaining columns of a sweep, drawn against the dominant rate.
Rendering uses the Agg backend and writes plain PNG files next to the CSV.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

from .cli import SweepRow


def _series(rows: Sequence[SweepRow], name: str) -> tuple[list[float], list[float]]:
    xs, ys = [], []
    for row in rows:
        value = getattr(row, name)
        if value is not None:
            xs.append(row.r1)
            ys.append(value)
    return xs, ys


def _bargaining_total_effort(rows: Sequence[SweepRow]) -> tuple[list[float], list[float]]:
    # bargaining shares induce the common neutral effort; the CSV carries the
    # shares, so the effort is reconstructed here
    xs, ys = [], []
    for row in rows:
        if row.beta1_b is None or row.beta2_b is None:
            continue
        pooled = row.beta1_b * row.r1 + row.beta2_b * row.r2
        effort = max(pooled / (2.0 * row.c) - 1.0, 0.0)
        xs.append(row.r1)
        ys.append(2.0 * effort)
    return xs, ys


_PANELS = [
    ("beta1", "share of CP1", ("beta1_nn", "beta1_n", "beta1_b")),
    ("beta2", "share of CP2", ("beta2_nn", "beta2_n", "beta2_b")),
    ("total_effort", "total ISP effort", ("total_effort_nn", "total_effort_n", None)),
    ("ucp1", "utility of CP1", ("ucp1_nn", "ucp1_n", "ucp1_b")),
    ("ucp2", "utility of CP2", ("ucp2_nn", "ucp2_n", "ucp2_b")),
    ("uisp", "ISP net utility", ("uisp_nn", "uisp_n", "uisp_b")),
    ("su", "social utility", ("su_nn", "su_n", "su_b")),
]

_STYLES = [
    ("non-neutral", "tab:red", "-"),
    ("neutral", "tab:blue", "--"),
    ("bargaining", "tab:green", "-."),
]


def render_figures(
    rows: Sequence[SweepRow], outdir: Path, prefix: str
) -> list[Path]:
    """Write one PNG per panel; returns the written paths in panel order."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []
    for panel, ylabel, columns in _PANELS:
        fig, ax = plt.subplots(figsize=(5.0, 3.4), dpi=150)
        for (label, color, style), column in zip(_STYLES, columns):
            if column is None and panel == "total_effort":
                xs, ys = _bargaining_total_effort(rows)
            elif column is None:
                continue
            else:
                xs, ys = _series(rows, column)
            if not xs:
                continue
            ax.plot(xs, ys, style, color=color, label=label, linewidth=1.6)
        ax.set_xlabel("dominant rate r1")
        ax.set_ylabel(ylabel)
        ax.legend(frameon=False)
        fig.tight_layout()
        path = outdir / f"{prefix}_{panel}.png"
        fig.savefig(path)
        plt.close(fig)
        written.append(path)
    return written
