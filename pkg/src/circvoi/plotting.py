"""Minimal deterministic SVG line charts (value against information)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import escape

# blue, yellow, green first, matching the usual n = 8, 16, large-n ordering
PALETTE = ("#1f5fbf", "#e0b000", "#2a9d3a", "#c03030", "#8040b0", "#606060")

WIDTH, HEIGHT = 640, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 170, 30, 55


@dataclass(frozen=True)
class Series:
    label: str
    x: tuple
    y: tuple


def _fmt(v):
    return f"{v:.2f}"


def _nice_ticks(lo, hi, count=5):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-12 * span:
        ticks.append(round(t, 12))
        t += step
    return ticks


def render_svg(curves, dots=(), xlabel="information (bits)", ylabel="value of information", title=None):
    """Render polylines for ``curves`` and black circles for ``dots``.

    Both arguments are sequences of :class:`Series`. Output depends only on
    the inputs, so identical data gives byte-identical files.
    """
    if not curves and not dots:
        raise ValueError("nothing to plot: empty input")
    xs = [v for s in (*curves, *dots) for v in s.x]
    ys = [v for s in (*curves, *dots) for v in s.y]
    x_lo, x_hi = 0.0, max(max(xs), 1e-12)
    y_lo, y_hi = min(0.0, min(ys)), max(max(ys), 1e-12)
    y_hi += 0.05 * (y_hi - y_lo)

    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B
    px = lambda v: MARGIN_L + (v - x_lo) / (x_hi - x_lo) * pw  # noqa: E731
    py = lambda v: MARGIN_T + ph - (v - y_lo) / (y_hi - y_lo) * ph  # noqa: E731

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="18" text-anchor="middle">{escape(title)}</text>')
    out.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>'
    )
    for t in _nice_ticks(x_lo, x_hi):
        out.append(f'<line x1="{_fmt(px(t))}" y1="{MARGIN_T + ph}" x2="{_fmt(px(t))}" y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px(t))}" y="{MARGIN_T + ph + 18}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{_fmt(py(t))}" x2="{MARGIN_L}" y2="{_fmt(py(t))}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{_fmt(py(t) + 4)}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="{HEIGHT - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="18" y="{MARGIN_T + ph / 2:.2f}" text-anchor="middle" '
        f'transform="rotate(-90 18 {MARGIN_T + ph / 2:.2f})">{escape(ylabel)}</text>'
    )

    legend_x = MARGIN_L + pw + 15
    for k, s in enumerate(curves):
        color = PALETTE[k % len(PALETTE)]
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(s.x, s.y))
        out.append(f'<polyline class="curve" fill="none" stroke="{color}" stroke-width="2" points="{pts}"/>')
        ly = MARGIN_T + 15 + 20 * k
        out.append(f'<line x1="{legend_x}" y1="{ly}" x2="{legend_x + 20}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{legend_x + 26}" y="{ly + 4}">{escape(s.label)}</text>')
    for s in dots:
        for a, b in zip(s.x, s.y):
            out.append(f'<circle class="hartley" cx="{_fmt(px(a))}" cy="{_fmt(py(b))}" r="4" fill="black"/>')
    if dots:
        ly = MARGIN_T + 15 + 20 * len(curves)
        out.append(f'<circle cx="{legend_x + 10}" cy="{ly}" r="4" fill="black"/>')
        out.append(f'<text x="{legend_x + 26}" y="{ly + 4}">Hartley</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
