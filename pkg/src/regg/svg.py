"""Minimal SVG line plots with no plotting dependency.

Just enough for the sweep reports: one axes rectangle, optional log scales,
polyline series with a small legend, tick labels in scientific notation.
"""

from __future__ import annotations

import math

from .errors import InvalidParametersError

__all__ = ["line_plot"]

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 70, 20, 30, 50


def _transform(value: float, lo: float, hi: float, log: bool) -> float:
    if log:
        value, lo, hi = math.log10(value), math.log10(lo), math.log10(hi)
    if hi == lo:
        return 0.5
    return (value - lo) / (hi - lo)


def _ticks(lo: float, hi: float, log: bool, count: int = 5) -> list[float]:
    if log:
        k0, k1 = math.floor(math.log10(lo)), math.ceil(math.log10(hi))
        return [10.0 ** k for k in range(k0, k1 + 1)]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def line_plot(series: list[tuple[list[float], list[float], str]], path: str,
              title: str = "", xlabel: str = "", ylabel: str = "",
              xlog: bool = False, ylog: bool = False) -> None:
    """Write a standalone SVG with one polyline per (xs, ys, label)."""
    if not series:
        raise InvalidParametersError("need at least one series")
    xs_all = [x for xs, _, _ in series for x in xs]
    ys_all = [y for _, ys, _ in series for y in ys]
    if not xs_all:
        raise InvalidParametersError("series must be nonempty")
    if (xlog and min(xs_all) <= 0) or (ylog and min(ys_all) <= 0):
        raise InvalidParametersError("log scale needs positive data")
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if y_lo == y_hi:
        y_lo, y_hi = y_lo - 1, y_hi + 1

    def px(x: float) -> float:
        return _ML + _transform(x, x_lo, x_hi, xlog) * (_W - _ML - _MR)

    def py(y: float) -> float:
        return _H - _MB - _transform(y, y_lo, y_hi, ylog) * (_H - _MT - _MB)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="monospace" font-size="11">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
        f'height="{_H - _MT - _MB}" fill="none" stroke="black"/>',
    ]
    if title:
        parts.append(f'<text x="{_W / 2}" y="18" text-anchor="middle">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{_W / 2}" y="{_H - 10}" '
                     f'text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="14" y="{_H / 2}" text-anchor="middle" '
                     f'transform="rotate(-90 14 {_H / 2})">{ylabel}</text>')
    for t in _ticks(x_lo, x_hi, xlog):
        if not x_lo <= t <= x_hi:
            continue
        parts.append(f'<line x1="{px(t):.1f}" y1="{_H - _MB}" x2="{px(t):.1f}" '
                     f'y2="{_H - _MB + 4}" stroke="black"/>')
        parts.append(f'<text x="{px(t):.1f}" y="{_H - _MB + 16}" '
                     f'text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y_lo, y_hi, ylog):
        if not y_lo <= t <= y_hi:
            continue
        parts.append(f'<line x1="{_ML - 4}" y1="{py(t):.1f}" x2="{_ML}" '
                     f'y2="{py(t):.1f}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 6}" y="{py(t):.1f}" text-anchor="end" '
                     f'dominant-baseline="middle">{t:.3g}</text>')
    for k, (xs, ys, label) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        pts = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        ly = _MT + 14 + 14 * k
        parts.append(f'<line x1="{_W - _MR - 120}" y1="{ly}" '
                     f'x2="{_W - _MR - 100}" y2="{ly}" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        parts.append(f'<text x="{_W - _MR - 95}" y="{ly + 4}">{label}</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
