"""Minimal hand-written SVG line charts."""

from dataclasses import dataclass, field
import math
from typing import List, Optional, Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


@dataclass
class Series:
    label: str
    x: Sequence[float]
    y: Sequence[float]
    color: Optional[str] = None
    dashed: bool = False


@dataclass
class Chart:
    title: str
    xlabel: str
    ylabel: str
    series: List[Series] = field(default_factory=list)
    markers: List[tuple] = field(default_factory=list)  # (x, y)
    marker_label: str = "Nodes"
    width: int = 720
    height: int = 480


def nice_ticks(lo, hi, n=6):
    """Round tick positions covering ``[lo, hi]``."""
    if not hi > lo:
        return [lo]
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(v) < 1e-12 * step else v)
        v += step
    return ticks


def _fmt(v):
    return f"{v:.4g}"


def render(chart: Chart) -> str:
    left, right, top, bottom = 70, 20, 40, 55
    w, h = chart.width, chart.height
    pw, ph = w - left - right, h - top - bottom
    xs = [np.asarray(s.x, dtype=float) for s in chart.series]
    ys = [np.asarray(s.y, dtype=float) for s in chart.series]
    allx = np.concatenate(xs + [np.array([m[0] for m in chart.markers], dtype=float)])
    ally = np.concatenate(ys + [np.array([m[1] for m in chart.markers], dtype=float)])
    allx, ally = allx[np.isfinite(allx)], ally[np.isfinite(ally)]
    x0, x1 = (float(allx.min()), float(allx.max())) if allx.size else (0.0, 1.0)
    y0, y1 = (float(ally.min()), float(ally.max())) if ally.size else (0.0, 1.0)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad = 0.05 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad

    def px(v):
        return left + (v - x0) / (x1 - x0) * pw

    def py(v):
        return top + (1 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<text x="{w / 2:.1f}" y="22" text-anchor="middle" font-size="14">'
        f'{escape(chart.title)}</text>',
        f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
    ]
    for t in nice_ticks(x0, x1):
        if x0 <= t <= x1:
            X = px(t)
            out.append(f'<line x1="{X:.2f}" y1="{top + ph}" x2="{X:.2f}" y2="{top + ph + 5}" '
                       'stroke="black"/>')
            out.append(f'<text x="{X:.2f}" y="{top + ph + 18}" text-anchor="middle">'
                       f'{_fmt(t)}</text>')
    for t in nice_ticks(y0, y1):
        if y0 <= t <= y1:
            Y = py(t)
            out.append(f'<line x1="{left - 5}" y1="{Y:.2f}" x2="{left}" y2="{Y:.2f}" '
                       'stroke="black"/>')
            out.append(f'<text x="{left - 8}" y="{Y + 4:.2f}" text-anchor="end">'
                       f'{_fmt(t)}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{h - 12}" text-anchor="middle">'
               f'{escape(chart.xlabel)}</text>')
    out.append(f'<text x="16" y="{top + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 16 {top + ph / 2:.1f})">{escape(chart.ylabel)}</text>')
    out.append(f'<clipPath id="plot"><rect x="{left}" y="{top}" width="{pw}" '
               f'height="{ph}"/></clipPath>')

    legend = []
    for i, (s, sx, sy) in enumerate(zip(chart.series, xs, ys)):
        color = s.color or PALETTE[i % len(PALETTE)]
        ok = np.isfinite(sx) & np.isfinite(sy)
        pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(sx[ok], sy[ok]))
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        out.append(f'<polyline clip-path="url(#plot)" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"{dash} points="{pts}"/>')
        legend.append((s.label, color, s.dashed, False))
    if chart.markers:
        for mx, my in chart.markers:
            out.append(f'<circle cx="{px(mx):.2f}" cy="{py(my):.2f}" r="3.5" fill="black"/>')
        legend.append((chart.marker_label, "black", False, True))

    ly = top + 16
    for label, color, dashed, dot in legend:
        lx = left + 12
        if dot:
            out.append(f'<circle cx="{lx + 12}" cy="{ly - 4}" r="3.5" fill="{color}"/>')
        else:
            dash = ' stroke-dasharray="6,4"' if dashed else ""
            out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 24}" y2="{ly - 4}" '
                       f'stroke="{color}" stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{lx + 30}" y="{ly}">{escape(label)}</text>')
        ly += 16
    out.append("</svg>")
    return "\n".join(out) + "\n"
