"""Minimal deterministic SVG line charts.

Byte-identical output for identical inputs: floats are formatted with %.6g,
no timestamps, insertion-ordered series.
"""

from __future__ import annotations

import math

__all__ = ["emit_svg", "Series"]

WIDTH = 720
HEIGHT = 480
MARGIN_L = 64
MARGIN_R = 16
MARGIN_T = 24
MARGIN_B = 44

_DASH = {"solid": None, "dashed": "8,5", "dotted": "2,4"}


class Series:
    def __init__(self, name, x, y, line="solid", color="#000000"):
        self.name = name
        self.x = [float(v) for v in x]
        self.y = [float(v) for v in y]
        if len(self.x) != len(self.y) or not self.x:
            raise ValueError(f"series {name!r} needs matching nonempty x and y")
        for v in self.x + self.y:
            if not math.isfinite(v):
                raise ValueError(f"series {name!r} contains a non-finite value")
        if line not in _DASH:
            raise ValueError(f"series {name!r}: unknown line style {line!r}")
        self.line = line
        self.color = color


def _fmt(v: float) -> str:
    return format(v, ".6g")


def _ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        hi = lo + 1.0
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / n))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (step * mult) <= n:
            step *= mult
            break
    first = math.ceil(lo / step) * step
    out = []
    t = first
    while t <= hi + 1e-12 * span:
        out.append(0.0 if abs(t) < 1e-12 * span else t)
        t += step
    return out


def _log_ticks(lo: float, hi: float):
    out = []
    e = math.floor(math.log10(lo))
    while 10.0 ** e <= hi * (1 + 1e-12):
        if 10.0 ** e >= lo * (1 - 1e-12):
            out.append(10.0 ** e)
        e += 1
    return out or [lo, hi]


def emit_svg(series_list, *, title: str = "", log_x: bool = False, log_y: bool = False) -> bytes:
    """Render line series into a standalone SVG document."""
    if not series_list:
        raise ValueError("at least one series is required")
    xs = [v for s in series_list for v in s.x]
    ys = [v for s in series_list for v in s.y]
    if log_x and min(xs) <= 0.0:
        raise ValueError("log_x requires positive x values")
    if log_y and min(ys) <= 0.0:
        raise ValueError("log_y requires positive y values")
    fx = math.log10 if log_x else (lambda v: v)
    fy = math.log10 if log_y else (lambda v: v)
    x0, x1 = min(map(fx, xs)), max(map(fx, xs))
    y0, y1 = min(map(fy, ys)), max(map(fy, ys))
    if x1 == x0:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 == y0:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(v):
        return MARGIN_L + pw * (fx(v) - x0) / (x1 - x0)

    def py(v):
        return MARGIN_T + ph * (1.0 - (fy(v) - y0) / (y1 - y0))

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" '
        f'fill="none" stroke="#444444"/>',
    ]
    if title:
        parts.append(
            f'<text x="{WIDTH // 2}" y="16" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{title}</text>'
        )
    xticks = _log_ticks(min(xs), max(xs)) if log_x else _ticks(x0, x1)
    yticks = _log_ticks(min(ys), max(ys)) if log_y else _ticks(y0, y1)
    for t in xticks:
        X = px(t) if log_x else MARGIN_L + pw * (t - x0) / (x1 - x0)
        parts.append(
            f'<line x1="{_fmt(X)}" y1="{MARGIN_T + ph}" x2="{_fmt(X)}" '
            f'y2="{MARGIN_T + ph + 5}" stroke="#444444"/>'
        )
        parts.append(
            f'<text x="{_fmt(X)}" y="{MARGIN_T + ph + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    for t in yticks:
        Y = py(t) if log_y else MARGIN_T + ph * (1.0 - (t - y0) / (y1 - y0))
        parts.append(
            f'<line x1="{MARGIN_L - 5}" y1="{_fmt(Y)}" x2="{MARGIN_L}" '
            f'y2="{_fmt(Y)}" stroke="#444444"/>'
        )
        parts.append(
            f'<text x="{MARGIN_L - 8}" y="{_fmt(Y)}" text-anchor="end" '
            f'dominant-baseline="middle" font-family="sans-serif" font-size="11">{_fmt(t)}</text>'
        )
    for s in series_list:
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(s.x, s.y))
        dash = _DASH[s.line]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        parts.append(
            f'<polyline fill="none" stroke="{s.color}" stroke-width="1.5"'
            f'{dash_attr} points="{pts}"/>'
        )
    ly = MARGIN_T + 14
    for s in series_list:
        dash = _DASH[s.line]
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        lx = MARGIN_L + 10
        parts.append(
            f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 28}" y2="{ly - 4}" '
            f'stroke="{s.color}" stroke-width="1.5"{dash_attr}/>'
        )
        parts.append(
            f'<text x="{lx + 34}" y="{ly}" font-family="sans-serif" '
            f'font-size="11">{s.name}</text>'
        )
        ly += 16
    parts.append("</svg>")
    return ("\n".join(parts) + "\n").encode()
