"""SVG rendering of planar decision boundaries and training trends.

Coordinates are rendered at 6 significant digits; counts are never
recomputed here.
"""
from __future__ import annotations

from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .counting import BoundarySegment2D

VIEW = 600.0
MARGIN = 40.0
LABEL_COLORS = {1: "#d62728", -1: "#1f77b4"}
SERIES_COLORS = {"boundary": "#d62728", "total": "#2ca02c", "fnorm": "#9467bd"}


def _num(v: float) -> str:
    return f"{v:.6g}"


def clip_segment(seg: BoundarySegment2D, box: Sequence[float]):
    """Float endpoints of ``seg`` clipped to ``box = (xmin, xmax, ymin, ymax)``, or ``None``."""
    xmin, xmax, ymin, ymax = box
    base = np.array([float(c) for c in seg.base])
    d = np.array([float(c) for c in seg.direction])
    lo = -np.inf if seg.t_min is None else float(seg.t_min)
    hi = np.inf if seg.t_max is None else float(seg.t_max)
    # Liang-Barsky against the four box sides
    for p, q in ((-d[0], base[0] - xmin), (d[0], xmax - base[0]),
                 (-d[1], base[1] - ymin), (d[1], ymax - base[1])):
        if p == 0:
            if q < 0:
                return None
            continue
        t = q / p
        if p < 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
    if not (lo < hi) or not np.isfinite(lo) or not np.isfinite(hi):
        return None
    return tuple(base + lo * d), tuple(base + hi * d)


class _Frame:
    """Maps a data box onto the fixed square view box (y axis pointing up)."""

    def __init__(self, box):
        self.xmin, self.xmax, self.ymin, self.ymax = (float(v) for v in box)
        if not (self.xmin < self.xmax and self.ymin < self.ymax):
            raise ValueError("box must satisfy xmin < xmax and ymin < ymax")
        self.span = VIEW - 2 * MARGIN

    def __call__(self, x, y):
        u = MARGIN + (x - self.xmin) / (self.xmax - self.xmin) * self.span
        v = MARGIN + (self.ymax - y) / (self.ymax - self.ymin) * self.span
        return _num(u), _num(v)


def _header(width=VIEW, height=VIEW):
    return [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {_num(width)} {_num(height)}" '
            f'width="{_num(width)}" height="{_num(height)}">',
            f'<rect x="0" y="0" width="{_num(width)}" height="{_num(height)}" fill="white"/>']


def boundary_svg(segments: Sequence[BoundarySegment2D], box: Sequence[float], *, data=None,
                 caption: str | None = None) -> str:
    """Boundary pieces clipped to ``box``; optional labelled points ``data`` (a Dataset)."""
    fr = _Frame(box)
    out = _header()
    x0, y0 = fr(fr.xmin, fr.ymax)
    out.append(f'<rect id="frame" x="{x0}" y="{y0}" width="{_num(fr.span)}" height="{_num(fr.span)}" '
               'fill="none" stroke="#888888" stroke-width="1"/>')
    if data is not None:
        out.append('<g id="data" stroke="none" fill-opacity="0.6">')
        for (x, y), label in zip(data.x.tolist(), data.y.tolist()):
            if fr.xmin <= x <= fr.xmax and fr.ymin <= y <= fr.ymax:
                u, v = fr(x, y)
                out.append(f'<circle cx="{u}" cy="{v}" r="2" fill="{LABEL_COLORS[int(label)]}"/>')
        out.append('</g>')
    out.append('<g id="boundary" stroke="black" stroke-width="1.5" fill="none">')
    drawn = 0
    for seg in segments:
        ends = clip_segment(seg, (fr.xmin, fr.xmax, fr.ymin, fr.ymax))
        if ends is None:
            continue
        (ax, ay), (bx, by) = ends
        (u1, v1), (u2, v2) = fr(ax, ay), fr(bx, by)
        out.append(f'<line class="piece" x1="{u1}" y1="{v1}" x2="{u2}" y2="{v2}"/>')
        drawn += 1
    out.append('</g>')
    if caption is None:
        caption = f"#Boundary = {len(segments)} ({drawn} visible in box)"
    out.append(f'<text id="caption" x="{_num(VIEW / 2)}" y="{_num(VIEW - 12)}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="14">{escape(caption)}</text>')
    out.append('</svg>')
    return "\n".join(out) + "\n"


def trend_svg(iterations: Sequence[float], series: dict, *, title: str = "") -> str:
    """One panel per named series (``boundary``, ``total``, ``fnorm``), each on its own y scale."""
    names = list(series)
    panel_h = 160.0
    width, height = 640.0, 40.0 + panel_h * len(names) + 30.0
    out = _header(width, height)
    if title:
        out.append(f'<text x="{_num(width / 2)}" y="24" text-anchor="middle" font-family="sans-serif" '
                   f'font-size="15">{escape(title)}</text>')
    xs = np.asarray(iterations, dtype=float)
    xlo, xhi = (xs.min(), xs.max()) if len(xs) else (0.0, 1.0)
    xspan = (xhi - xlo) or 1.0
    left, right = 70.0, width - 20.0
    for k, name in enumerate(names):
        ys = np.asarray(series[name], dtype=float)
        top = 40.0 + k * panel_h
        bottom = top + panel_h - 30.0
        lo, hi = (float(np.nanmin(ys)), float(np.nanmax(ys))) if len(ys) else (0.0, 1.0)
        pad = (hi - lo) * 0.05 or max(abs(hi), 1.0) * 0.05
        lo, hi = lo - pad, hi + pad
        out.append(f'<g id="panel-{escape(name)}">')
        out.append(f'<rect x="{_num(left)}" y="{_num(top)}" width="{_num(right - left)}" '
                   f'height="{_num(bottom - top)}" fill="none" stroke="#888888"/>')
        out.append(f'<text x="{_num(left - 6)}" y="{_num(top + 12)}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="11">{_num(hi)}</text>')
        out.append(f'<text x="{_num(left - 6)}" y="{_num(bottom)}" text-anchor="end" font-family="sans-serif" '
                   f'font-size="11">{_num(lo)}</text>')
        out.append(f'<text x="{_num(left + 6)}" y="{_num(top + 14)}" font-family="sans-serif" font-size="12" '
                   f'fill="{SERIES_COLORS.get(name, "black")}">{escape(name)}</text>')
        pts = []
        for x, y in zip(xs, ys):
            if np.isnan(y):
                continue
            u = left + (x - xlo) / xspan * (right - left)
            v = bottom - (y - lo) / (hi - lo) * (bottom - top)
            pts.append(f"{_num(u)},{_num(v)}")
        out.append(f'<polyline class="series" data-name="{escape(name)}" fill="none" stroke-width="1.5" '
                   f'stroke="{SERIES_COLORS.get(name, "black")}" points="{" ".join(pts)}"/>')
        out.append('</g>')
    out.append(f'<text x="{_num((left + right) / 2)}" y="{_num(height - 8)}" text-anchor="middle" '
               f'font-family="sans-serif" font-size="12">iteration ({_num(xlo)} to {_num(xhi)})</text>')
    out.append('</svg>')
    return "\n".join(out) + "\n"
