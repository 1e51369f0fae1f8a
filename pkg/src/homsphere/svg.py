"""Bare-bones SVG line plots (one polyline per series)."""

from __future__ import annotations

import math

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def line_plot(x, series: dict, title: str = "", log_x: bool = False, log_y: bool = False,
              width: int = 640, height: int = 420) -> str:
    margin = 50
    tx = (lambda v: math.log10(v)) if log_x else float
    ty = (lambda v: math.log10(v)) if log_y else float
    xs = [tx(v) for v in x]
    ys_all = [ty(v) for ys in series.values() for v in ys if math.isfinite(v)]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    px = lambda v: margin + (v - x0) / (x1 - x0) * (width - 2 * margin)
    py = lambda v: height - margin - (v - y0) / (y1 - y0) * (height - 2 * margin)
    out = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d" '
           'viewBox="0 0 %d %d">' % (width, height, width, height),
           '<rect width="100%" height="100%" fill="white"/>',
           '<path d="M %d %d L %d %d L %d %d" stroke="black" fill="none"/>'
           % (margin, margin, margin, height - margin, width - margin, height - margin)]
    if title:
        out.append('<text x="%d" y="%d" font-size="14">%s</text>' % (margin, margin - 15, title))
    for i, (name, ys) in enumerate(series.items()):
        pts = ["%.3f %.3f" % (px(a), py(ty(b))) for a, b in zip(xs, ys) if math.isfinite(b)]
        color = _COLORS[i % len(_COLORS)]
        out.append('<path d="M %s" stroke="%s" fill="none" stroke-width="1.5"/>'
                   % (" L ".join(pts), color))
        out.append('<text x="%d" y="%d" font-size="12" fill="%s">%s</text>'
                   % (width - margin - 160, margin + 15 * (i + 1), color, name))
    out.append('<text x="%d" y="%d" font-size="11">x: %.4g .. %.4g%s</text>'
               % (margin, height - 15, x[0], x[-1], " (log)" if log_x else ""))
    out.append("</svg>")
    return "\n".join(out) + "\n"
