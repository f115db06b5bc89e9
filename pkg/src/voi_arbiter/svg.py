"""Minimal SVG line charts for learning curves and arbitration counts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")
WIDTH, HEIGHT = 720, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 150, 40, 50


@dataclass
class Series:
    label: str
    y: Sequence[float]
    band: Sequence[float] | None = None  # half-width of a shaded band around y


def _nice_ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    return [float(t) for t in np.arange(start, hi + step * 1e-9, step)]


def line_chart(series: Sequence[Series], title: str, ylabel: str, xlabel: str = "episode") -> str:
    """Render series against episodes 1..N (N taken from the first series)."""
    n = len(series[0].y)
    xs = np.arange(1, n + 1, dtype=float)
    lows, highs = [], []
    for s in series:
        y = np.asarray(s.y, dtype=float)
        b = np.zeros_like(y) if s.band is None else np.asarray(s.band, dtype=float)
        lows.append((y - b).min())
        highs.append((y + b).max())
    ymin, ymax = min(lows), max(highs)
    if ymax == ymin:
        ymin, ymax = ymin - 1, ymax + 1
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B
    x0, x1 = 1.0, float(max(n, 2))

    def px(x):
        return MARGIN_L + (x - x0) / (x1 - x0) * pw

    def py(y):
        return MARGIN_T + (ymax - y) / (ymax - ymin) * ph

    def points(x, y):
        return " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in zip(x, y))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" data-x-min="1" data-x-max="{n}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T + ph}" x2="{MARGIN_L + pw}" y2="{MARGIN_T + ph}" stroke="black"/>',
        f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" x2="{MARGIN_L}" y2="{MARGIN_T + ph}" stroke="black"/>',
    ]
    xticks = sorted({1, n} | {int(t) for t in _nice_ticks(1, n) if 1 < t < n})
    for t in xticks:
        out.append(f'<text x="{px(t):.2f}" y="{MARGIN_T + ph + 18}" text-anchor="middle" font-size="11">{t}</text>')
    for t in _nice_ticks(ymin, ymax):
        out.append(
            f'<line x1="{MARGIN_L}" y1="{py(t):.2f}" x2="{MARGIN_L + pw}" y2="{py(t):.2f}" stroke="#ddd"/>'
            f'<text x="{MARGIN_L - 6}" y="{py(t) + 4:.2f}" text-anchor="end" font-size="11">{t:g}</text>'
        )
    out.append(f'<text x="{MARGIN_L + pw / 2:.0f}" y="{HEIGHT - 10}" text-anchor="middle" font-size="12">{escape(xlabel)}</text>')
    out.append(
        f'<text x="16" y="{MARGIN_T + ph / 2:.0f}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {MARGIN_T + ph / 2:.0f})">{escape(ylabel)}</text>'
    )
    for i, s in enumerate(series):
        color = PALETTE[i % len(PALETTE)]
        y = np.asarray(s.y, dtype=float)
        if s.band is not None:
            b = np.asarray(s.band, dtype=float)
            poly = points(xs, y + b) + " " + points(xs[::-1], (y - b)[::-1])
            out.append(f'<polygon points="{poly}" fill="{color}" fill-opacity="0.18" stroke="none"/>')
        out.append(f'<polyline points="{points(xs, y)}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = MARGIN_T + 16 + 18 * i
        out.append(
            f'<line x1="{MARGIN_L + pw + 12}" y1="{ly}" x2="{MARGIN_L + pw + 32}" y2="{ly}" stroke="{color}" stroke-width="3"/>'
            f'<text x="{MARGIN_L + pw + 38}" y="{ly + 4}" font-size="12">{escape(s.label)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out)
