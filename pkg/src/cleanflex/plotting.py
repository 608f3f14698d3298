"""SVG figures of functions, osculating polynomials, curves and their osculating objects.

All figures are built on bare :class:`matplotlib.figure.Figure` objects (no
pyplot state) and written with a fixed hash salt and no date stamp, so
identical input gives byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import numpy as np
from matplotlib.figure import Figure

from .chebyshev import TWO_PI

STYLE = {
    "svg.hashsalt": "cleanflex",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.linewidth": 0.8,
    "lines.linewidth": 1.2,
    "path.simplify": False,
}

MARKERS = {
    "clean-max": dict(marker="^", color="tab:red", label="clean max"),
    "clean-min": dict(marker="v", color="tab:blue", label="clean min"),
    "global-max": dict(marker="^", color="tab:red", mfc="none", label="global max"),
    "global-min": dict(marker="v", color="tab:blue", mfc="none", label="global min"),
    "plain": dict(marker="x", color="0.4", label="plain"),
}


def _figure(width: float = 6.0, height: float | None = None) -> Figure:
    golden = (math.sqrt(5) - 1.0) / 2.0
    return Figure(figsize=(width, height or width * golden))


def save_svg(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with matplotlib.rc_context(STYLE):
        fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def _mark(ax, xs, ys, kind, seen):
    style = dict(MARKERS.get(kind, MARKERS["plain"]))
    label = style.pop("label")
    ax.plot(xs, ys, linestyle="none", markersize=7,
            label=None if kind in seen else label, **style)
    seen.add(kind)


def plot_function(u, records, path=None, title: str = "", samples: int = 1024) -> Figure:
    """``u`` on one period with the osculating polynomials of its clean flexes."""
    with matplotlib.rc_context(STYLE):
        fig = _figure()
        ax = fig.add_subplot(111)
        t = np.linspace(0.0, TWO_PI, samples + 1)
        ax.plot(t, u(t), color="k", label="u")
        seen: set = set()
        for rec in records:
            if rec.kind.startswith("clean"):
                style = MARKERS[rec.kind]
                ax.plot(t, rec.osculating(t), linestyle="--", linewidth=0.8,
                        color=style["color"], alpha=0.7)
        for rec in records:
            s = rec.location.midpoint
            _mark(ax, [s], [float(u(np.array([s]))[0])], rec.kind, seen)
        ax.set_xlim(0.0, TWO_PI)
        lo, hi = float(np.min(u(t))), float(np.max(u(t)))
        pad = 0.25 * (hi - lo or 1.0)
        ax.set_ylim(lo - pad, hi + pad)
        ax.set_xticks([0, math.pi / 2, math.pi, 3 * math.pi / 2, TWO_PI])
        ax.set_xticklabels(["0", "π/2", "π", "3π/2", "2π"])
        ax.set_xlabel("t")
        if title:
            ax.set_title(title)
        if seen:
            ax.legend(loc="upper right", frameon=False, fontsize=7)
        fig.tight_layout()
    if path is not None:
        save_svg(fig, path)
    return fig


def _curve_axes(curve, samples: int):
    fig = _figure(5.0, 5.0)
    ax = fig.add_subplot(111)
    t = np.linspace(0.0, TWO_PI, samples + 1)
    p = curve.points(t)
    ax.plot(p[:, 0], p[:, 1], color="k")
    ax.set_aspect("equal")
    return fig, ax, p


def _frame(ax, p, pad: float = 0.35):
    lo, hi = p.min(axis=0), p.max(axis=0)
    span = float(np.max(hi - lo))
    c = 0.5 * (lo + hi)
    ax.set_xlim(c[0] - (0.5 + pad) * span, c[0] + (0.5 + pad) * span)
    ax.set_ylim(c[1] - (0.5 + pad) * span, c[1] + (0.5 + pad) * span)


def plot_vertices(curve, records, path=None, title: str = "", samples: int = 720) -> Figure:
    """The curve with osculating circles at its vertices."""
    with matplotlib.rc_context(STYLE):
        fig, ax, p = _curve_axes(curve, samples)
        if not records:
            ax.set_title((title + "\n" if title else "") + "degenerate: no isolated vertices")
        s = np.linspace(0.0, TWO_PI, 361)
        seen: set = set()
        for rec in records:
            cx, cy = rec.center
            ls = "-" if rec.inscribed else "--"
            color = MARKERS.get(rec.kind, MARKERS["plain"])["color"]
            ax.plot(cx + rec.radius * np.cos(s), cy + rec.radius * np.sin(s),
                    linestyle=ls, linewidth=0.7, color=color)
            q = curve.points(np.array([rec.location.midpoint]))[0]
            _mark(ax, [q[0]], [q[1]], rec.kind, seen)
        _frame(ax, p)
        if title and records:
            ax.set_title(title)
        if seen:
            ax.legend(loc="upper right", frameon=False, fontsize=7)
        fig.tight_layout()
    if path is not None:
        save_svg(fig, path)
    return fig


def _conic_grid(ax, conic, color, ls):
    x0, x1 = ax.get_xlim()
    y0, y1 = ax.get_ylim()
    X, Y = np.meshgrid(np.linspace(x0, x1, 301), np.linspace(y0, y1, 301))
    Z = conic(np.stack([X, Y], axis=-1))
    ax.contour(X, Y, Z, levels=[0.0], colors=[color], linestyles=[ls], linewidths=0.7)


def plot_conics(curve, records, path=None, title: str = "", samples: int = 720) -> Figure:
    """The curve with the osculating conics of its non-plain sextactic points."""
    with matplotlib.rc_context(STYLE):
        fig, ax, p = _curve_axes(curve, samples)
        _frame(ax, p)
        seen: set = set()
        for rec in records:
            if rec.kind == "plain":
                continue
            color = MARKERS.get(rec.kind, MARKERS["plain"])["color"]
            _conic_grid(ax, rec.conic, color, "-" if rec.kind.endswith("max") else "--")
        for rec in records:
            q = curve.points(np.array([rec.location.midpoint]))[0]
            _mark(ax, [q[0]], [q[1]], rec.kind, seen)
        _frame(ax, p)
        if title:
            ax.set_title(title)
        if seen:
            ax.legend(loc="upper right", frameon=False, fontsize=7)
        fig.tight_layout()
    if path is not None:
        save_svg(fig, path)
    return fig
