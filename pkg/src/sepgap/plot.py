"""Minimal self-contained SVG line and scatter plots."""

from __future__ import annotations

from dataclasses import dataclass, field
from html import escape
from pathlib import Path
from typing import Sequence

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"]


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    kind: str = "line"  # "line" or "points"
    color: str | None = None


@dataclass
class Figure:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series] = field(default_factory=list)
    hlines: list[tuple[float, str]] = field(default_factory=list)
    vlines: list[tuple[float, str]] = field(default_factory=list)
    width: int = 640
    height: int = 420


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi <= lo:
        return np.array([lo])
    step = 10 ** np.floor(np.log10((hi - lo) / n))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (m * step) <= n:
            step *= m
            break
    return np.arange(np.ceil(lo / step) * step, hi + 0.5 * step, step)


def render_svg(fig: Figure) -> str:
    ml, mr, mt, mb = 70, 150, 40, 50
    pw, ph = fig.width - ml - mr, fig.height - mt - mb
    xs = [float(v) for s in fig.series for v in s.x] + [v for v, _ in fig.vlines]
    ys = [float(v) for s in fig.series for v in s.y] + [v for v, _ in fig.hlines]
    xs = [v for v in xs if np.isfinite(v)] or [0.0, 1.0]
    ys = [v for v in ys if np.isfinite(v)] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def X(v):
        return ml + (v - x0) / (x1 - x0) * pw

    def Y(v):
        return mt + (y1 - v) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{fig.width}" height="{fig.height}" '
           f'font-family="sans-serif" font-size="12">',
           f'<rect width="100%" height="100%" fill="white"/>',
           f'<text x="{ml + pw / 2:.1f}" y="20" text-anchor="middle" font-size="14">{escape(fig.title)}</text>',
           f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
    for t in _ticks(x0, x1):
        out.append(f'<line x1="{X(t):.1f}" y1="{mt + ph}" x2="{X(t):.1f}" y2="{mt + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{X(t):.1f}" y="{mt + ph + 18}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<line x1="{ml - 5}" y1="{Y(t):.1f}" x2="{ml}" y2="{Y(t):.1f}" stroke="black"/>')
        out.append(f'<text x="{ml - 8}" y="{Y(t) + 4:.1f}" text-anchor="end">{t:.3g}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{fig.height - 10}" text-anchor="middle">{escape(fig.xlabel)}</text>')
    out.append(f'<text x="15" y="{mt + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 15 {mt + ph / 2:.1f})">{escape(fig.ylabel)}</text>')
    for v, label in fig.hlines:
        out.append(f'<line x1="{ml}" y1="{Y(v):.1f}" x2="{ml + pw}" y2="{Y(v):.1f}" stroke="gray" stroke-dasharray="4 3"/>')
        out.append(f'<text x="{ml + pw + 4}" y="{Y(v) + 4:.1f}" fill="gray">{escape(label)}</text>')
    for v, label in fig.vlines:
        out.append(f'<line x1="{X(v):.1f}" y1="{mt}" x2="{X(v):.1f}" y2="{mt + ph}" stroke="gray" stroke-dasharray="4 3"/>')
        out.append(f'<text x="{X(v) + 3:.1f}" y="{mt + 12}" fill="gray">{escape(label)}</text>')
    for k, s in enumerate(fig.series):
        color = s.color or PALETTE[k % len(PALETTE)]
        pts = [(X(float(a)), Y(float(b))) for a, b in zip(s.x, s.y) if np.isfinite(a) and np.isfinite(b)]
        if s.kind == "line" and pts:
            path = " ".join(f"{a:.1f},{b:.1f}" for a, b in pts)
            out.append(f'<polyline points="{path}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for a, b in pts:
            out.append(f'<circle cx="{a:.1f}" cy="{b:.1f}" r="2.5" fill="{color}"/>')
        ly = mt + 15 + 16 * k
        out.append(f'<circle cx="{ml + pw + 10}" cy="{ly}" r="4" fill="{color}"/>')
        out.append(f'<text x="{ml + pw + 18}" y="{ly + 4}">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(fig: Figure, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(render_svg(fig), encoding="utf-8")
    return path
