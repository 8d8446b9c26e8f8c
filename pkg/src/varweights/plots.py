"""SVG figures for sweep-style results.

Uses the non-interactive Agg backend and pins the SVG hash salt and
metadata so the same data yields the same bytes.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

matplotlib.rcParams["svg.hashsalt"] = "varweights"

__all__ = ["render_sweep_svg", "render_trace_svg"]

_FINITE_STYLE = dict(color="#1f6fb4", marker="o", linestyle="-")
_DIVERGENT_STYLE = dict(color="#c23b22", marker="x", s=90, zorder=5)


def _save(fig, path: str) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def render_sweep_svg(rows, path: str, x_label: str = "scale s",
                     y_label: str = "characteristic",
                     title: str = "openness sweep") -> None:
    """Line plot of (x, value) with divergent points marked on the top edge.

    ``rows`` are dicts with keys ``s`` (or ``r``), ``value``, ``divergent``.
    """
    xs_fin, ys_fin, xs_div = [], [], []
    for row in rows:
        x = row.get("s", row.get("r"))
        value = row.get("value")
        divergent = bool(row.get("divergent")) or value is None \
            or (isinstance(value, float) and not math.isfinite(value))
        if divergent:
            xs_div.append(x)
        else:
            xs_fin.append(x)
            ys_fin.append(value)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if xs_fin:
        ax.plot(xs_fin, ys_fin, **_FINITE_STYLE, label="finite")
    if xs_div:
        top = max(ys_fin) * 1.15 if ys_fin else 1.0
        ax.scatter(xs_div, [top] * len(xs_div), **_DIVERGENT_STYLE,
                   label="divergent")
        for x in xs_div:
            ax.axvline(x, color="#c23b22", alpha=0.25, linestyle="--")
    ax.set_xlabel(x_label)
    ax.set_ylabel(y_label)
    ax.set_title(title)
    if xs_fin or xs_div:
        ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def render_trace_svg(rows, path: str, budget: float | None = None,
                     title: str = "reverse Holder exponent search") -> None:
    """Scatter of the search trace: (r, minimal multiplier), pass/fail colored."""
    xs_pass, ys_pass, xs_fail, ys_fail = [], [], [], []
    for row in rows:
        r = row.get("r")
        c = row.get("minimal_c")
        ok = bool(row.get("passed"))
        finite_c = c is not None and (not isinstance(c, float)
                                      or math.isfinite(c))
        target = (xs_pass, ys_pass) if ok else (xs_fail, ys_fail)
        if finite_c:
            target[0].append(r)
            target[1].append(c)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if xs_pass:
        ax.scatter(xs_pass, ys_pass, color="#2a7d2e", marker="o",
                   label="within budget")
    if xs_fail:
        ax.scatter(xs_fail, ys_fail, color="#c23b22", marker="x",
                   label="over budget")
    if budget is not None and math.isfinite(budget):
        ax.axhline(budget, color="#555555", linestyle=":", label="budget")
    ax.set_xlabel("candidate exponent r")
    ax.set_ylabel("smallest multiplier over the family")
    ax.set_title(title)
    if xs_pass or xs_fail:
        ax.legend(loc="best")
    ax.grid(True, alpha=0.3)
    _save(fig, path)
