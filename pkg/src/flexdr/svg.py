"""Minimal deterministic SVG 1.1 charts (line and grouped bar).

Output depends only on the inputs: coordinates are printed with fixed
precision and there are no timestamps, ids or random colors.
"""
from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 720, 360
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 150, 30, 40
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f")


def _f(x: float) -> str:
    return f"{x:.2f}"


def _header(title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="18" text-anchor="middle" font-size="13">{escape(title)}</text>',
    ]


def _y_range(values: Sequence[float]) -> tuple[float, float]:
    finite = [v for v in values if math.isfinite(v)]
    lo = min(finite + [0.0])
    hi = max(finite + [0.0])
    if hi == lo:
        hi = lo + 1.0
    return lo, hi


def _axes(lo: float, hi: float, y_label: str) -> list[str]:
    x0, x1 = MARGIN_L, WIDTH - MARGIN_R
    y0, y1 = HEIGHT - MARGIN_B, MARGIN_T
    out = [f'<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" fill="none" stroke="black"/>']
    for i in range(5):
        v = lo + (hi - lo) * i / 4
        y = y0 - (y0 - y1) * i / 4
        out.append(f'<text x="{x0 - 4}" y="{_f(y + 4)}" text-anchor="end">{v:.4g}</text>')
    out.append(f'<text x="14" y="{(y0 + y1) / 2:.0f}" transform="rotate(-90 14 {(y0 + y1) / 2:.0f})" '
               f'text-anchor="middle">{escape(y_label)}</text>')
    return out


def _legend(labels: Sequence[str]) -> list[str]:
    out = []
    x = WIDTH - MARGIN_R + 10
    for i, label in enumerate(labels):
        y = MARGIN_T + 14 * i + 6
        color = PALETTE[i % len(PALETTE)]
        out.append(f'<rect x="{x}" y="{y - 8}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{x + 14}" y="{y + 1}">{escape(label)}</text>')
    return out


def line_chart(series: Sequence[tuple[str, Sequence[float]]], title: str = "",
               y_label: str = "kW") -> str:
    """Overlay of equally spaced series; shorter series are stretched to the full width."""
    lines = _header(title)
    lo, hi = _y_range([v for _, vals in series for v in vals])
    lines += _axes(lo, hi, y_label)
    x0, x1 = MARGIN_L, WIDTH - MARGIN_R
    y0, y1 = HEIGHT - MARGIN_B, MARGIN_T
    for i, (label, vals) in enumerate(series):
        n = len(vals)
        if n == 0:
            continue
        pts = []
        for j, v in enumerate(vals):
            x = x0 + (x1 - x0) * (j / (n - 1) if n > 1 else 0.5)
            y = y0 - (y0 - y1) * (v - lo) / (hi - lo)
            pts.append(f"{_f(x)},{_f(y)}")
        lines.append(f'<polyline fill="none" stroke="{PALETTE[i % len(PALETTE)]}" stroke-width="1.5" '
                     f'points="{" ".join(pts)}"/>')
    lines += _legend([label for label, _ in series])
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def bar_chart(groups: Sequence[str], series: Sequence[tuple[str, Sequence[float]]],
              title: str = "", y_label: str = "kWh") -> str:
    """Grouped bars: one group per entry of ``groups``, one bar per series inside it."""
    lines = _header(title)
    lo, hi = _y_range([v for _, vals in series for v in vals])
    lines += _axes(lo, hi, y_label)
    x0, x1 = MARGIN_L, WIDTH - MARGIN_R
    y0, y1 = HEIGHT - MARGIN_B, MARGIN_T
    zero = y0 - (y0 - y1) * (0 - lo) / (hi - lo)
    gw = (x1 - x0) / max(len(groups), 1)
    bw = gw * 0.8 / max(len(series), 1)
    for g, name in enumerate(groups):
        gx = x0 + g * gw + gw * 0.1
        lines.append(f'<text x="{_f(x0 + (g + 0.5) * gw)}" y="{y0 + 14}" text-anchor="middle">{escape(name)}</text>')
        for s, (_, vals) in enumerate(series):
            v = vals[g] if g < len(vals) and math.isfinite(vals[g]) else 0.0
            y = y0 - (y0 - y1) * (v - lo) / (hi - lo)
            top, h = min(y, zero), abs(zero - y)
            lines.append(f'<rect x="{_f(gx + s * bw)}" y="{_f(top)}" width="{_f(bw)}" height="{_f(h)}" '
                         f'fill="{PALETTE[s % len(PALETTE)]}"/>')
    lines += _legend([label for label, _ in series])
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
