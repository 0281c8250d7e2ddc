"""Deterministic SVG scatter plots of 2D cluster projections."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from newsimpact.errors import InputError

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)

WIDTH, HEIGHT = 640, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 60, 130, 20, 50
N_TICKS = 5


def _fmt(v: float) -> str:
    return f"{v:.4g}"


def _ticks(lo: float, hi: float) -> list[float]:
    return [lo + (hi - lo) * i / (N_TICKS - 1) for i in range(N_TICKS)]


def render_scatter(points, labels, title: str = "Topic clusters") -> str:
    """Render one circle per point, colored by label, with axes and a legend."""
    pts = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if pts.size == 0:
        raise InputError("no points to plot")
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise InputError(f"expected (n, 2) points, got shape {pts.shape}")
    if labels.shape[0] != pts.shape[0]:
        raise InputError(f"{labels.shape[0]} labels for {pts.shape[0]} points")

    xmin, xmax = float(pts[:, 0].min()), float(pts[:, 0].max())
    ymin, ymax = float(pts[:, 1].min()), float(pts[:, 1].max())
    xpad = (xmax - xmin) * 0.05 or 1.0
    ypad = (ymax - ymin) * 0.05 or 1.0
    xmin, xmax = xmin - xpad, xmax + xpad
    ymin, ymax = ymin - ypad, ymax + ypad
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(x: float) -> str:
        return f"{MARGIN_L + (x - xmin) / (xmax - xmin) * plot_w:.2f}"

    def sy(y: float) -> str:
        return f"{MARGIN_T + (ymax - y) / (ymax - ymin) * plot_h:.2f}"

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{MARGIN_L}" y="14" font-family="sans-serif" font-size="13">{title}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#333"/>',
    ]
    for tx in _ticks(xmin, xmax):
        px = sx(tx)
        out.append(
            f'<line x1="{px}" y1="{MARGIN_T + plot_h}" x2="{px}" '
            f'y2="{MARGIN_T + plot_h + 5}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{px}" y="{MARGIN_T + plot_h + 18}" font-family="sans-serif" '
            f'font-size="10" text-anchor="middle">{_fmt(tx)}</text>'
        )
    for ty in _ticks(ymin, ymax):
        py = sy(ty)
        out.append(
            f'<line x1="{MARGIN_L - 5}" y1="{py}" x2="{MARGIN_L}" y2="{py}" stroke="#333"/>'
        )
        out.append(
            f'<text x="{MARGIN_L - 8}" y="{py}" font-family="sans-serif" font-size="10" '
            f'text-anchor="end" dominant-baseline="middle">{_fmt(ty)}</text>'
        )
    for (x, y), lab in zip(pts, labels):
        color = PALETTE[int(lab) % len(PALETTE)]
        out.append(f'<circle cx="{sx(x)}" cy="{sy(y)}" r="3" fill="{color}" fill-opacity="0.8"/>')
    legend_x = WIDTH - MARGIN_R + 15
    for i, lab in enumerate(sorted(set(labels.tolist()))):
        ly = MARGIN_T + 15 + i * 18
        color = PALETTE[int(lab) % len(PALETTE)]
        out.append(f'<rect x="{legend_x}" y="{ly - 9}" width="10" height="10" fill="{color}"/>')
        out.append(
            f'<text x="{legend_x + 15}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">Topic {lab}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_scatter(points, labels, path: str | Path, title: str = "Topic clusters") -> None:
    Path(path).write_text(render_scatter(points, labels, title), encoding="utf-8")
