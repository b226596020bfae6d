"""Minimal deterministic SVG charts.

Hand-rolled emitters for time-series and planar-trace plots so runs can
be inspected without a plotting stack. Output is a pure function of the
input: fixed palette, fixed float formatting, no timestamps, so byte
identity across reruns is part of the contract. Long series are thinned
to a fixed point budget before drawing.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#17becf",
    "#8c564b",
    "#e377c2",
)

MAX_POINTS = 2000


def _fmt(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".")


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
    """Round tick positions covering [lo, hi] at a 1/2/5 step."""
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        step = mult * mag
        if raw <= step:
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _thin(xs: np.ndarray, ys: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if len(xs) <= MAX_POINTS:
        return xs, ys
    idx = np.linspace(0, len(xs) - 1, MAX_POINTS).round().astype(int)
    return xs[idx], ys[idx]


class _Canvas:
    def __init__(self, width: int, height: int, title: str):
        self.width = width
        self.height = height
        self.parts: list[str] = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
            f'height="{height}" viewBox="0 0 {width} {height}">',
            f'<rect width="{width}" height="{height}" fill="white"/>',
            f'<text x="{width / 2:.0f}" y="18" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{_escape(title)}</text>',
        ]

    def finish(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _axes(
    canvas: _Canvas,
    box: tuple[float, float, float, float],
    xlim: tuple[float, float],
    ylim: tuple[float, float],
    xlabel: str,
    ylabel: str,
) -> None:
    x0, y0, x1, y1 = box  # pixel corners, y grows downward
    canvas.parts.append(
        f'<rect x="{_fmt(x0)}" y="{_fmt(y0)}" width="{_fmt(x1 - x0)}" '
        f'height="{_fmt(y1 - y0)}" fill="none" stroke="#333333" stroke-width="1"/>'
    )
    for t in _nice_ticks(*xlim):
        px = x0 + (t - xlim[0]) / (xlim[1] - xlim[0]) * (x1 - x0)
        if px < x0 - 0.5 or px > x1 + 0.5:
            continue
        canvas.parts.append(
            f'<line x1="{_fmt(px)}" y1="{_fmt(y1)}" x2="{_fmt(px)}" y2="{_fmt(y1 + 4)}" '
            f'stroke="#333333" stroke-width="1"/>'
        )
        canvas.parts.append(
            f'<text x="{_fmt(px)}" y="{_fmt(y1 + 16)}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="10">{_fmt(t)}</text>'
        )
    for t in _nice_ticks(*ylim):
        py = y1 - (t - ylim[0]) / (ylim[1] - ylim[0]) * (y1 - y0)
        if py < y0 - 0.5 or py > y1 + 0.5:
            continue
        canvas.parts.append(
            f'<line x1="{_fmt(x0 - 4)}" y1="{_fmt(py)}" x2="{_fmt(x0)}" y2="{_fmt(py)}" '
            f'stroke="#333333" stroke-width="1"/>'
        )
        canvas.parts.append(
            f'<text x="{_fmt(x0 - 6)}" y="{_fmt(py + 3)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{_fmt(t)}</text>'
        )
    canvas.parts.append(
        f'<text x="{_fmt((x0 + x1) / 2)}" y="{_fmt(y1 + 30)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">{_escape(xlabel)}</text>'
    )
    canvas.parts.append(
        f'<text x="14" y="{_fmt((y0 + y1) / 2)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11" '
        f'transform="rotate(-90 14 {_fmt((y0 + y1) / 2)})">{_escape(ylabel)}</text>'
    )


def _polyline(xs, ys, to_px, color: str, width: float = 1.2, dash: str = "") -> str:
    pts = " ".join(f"{_fmt(px)},{_fmt(py)}" for px, py in (to_px(x, y) for x, y in zip(xs, ys)))
    dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
    return (
        f'<polyline points="{pts}" fill="none" stroke="{color}" '
        f'stroke-width="{width}"{dash_attr}/>'
    )


def _legend(canvas: _Canvas, labels: Sequence[tuple[str, str]], x: float, y: float) -> None:
    for k, (label, color) in enumerate(labels):
        ly = y + 14 * k
        canvas.parts.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(ly)}" x2="{_fmt(x + 18)}" y2="{_fmt(ly)}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        canvas.parts.append(
            f'<text x="{_fmt(x + 23)}" y="{_fmt(ly + 3)}" font-family="sans-serif" '
            f'font-size="10">{_escape(label)}</text>'
        )


def line_chart(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    title: str = "",
    xlabel: str = "t",
    ylabel: str = "",
    width: int = 720,
    height: int = 400,
) -> str:
    """Render labeled (x, y) series as polylines with axes and a legend."""
    if not series:
        raise ValueError("no series to plot")
    cleaned = []
    for label, xs, ys in series:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.size == 0 or xs.size != ys.size:
            raise ValueError(f"series {label!r} is empty or mismatched")
        cleaned.append((label, *_thin(xs, ys)))

    xlo = min(s[1].min() for s in cleaned)
    xhi = max(s[1].max() for s in cleaned)
    ylo = min(s[2].min() for s in cleaned)
    yhi = max(s[2].max() for s in cleaned)
    if xhi == xlo:
        xlo, xhi = xlo - 0.5, xhi + 0.5
    if yhi == ylo:
        ylo, yhi = ylo - 0.5, yhi + 0.5
    pad = 0.05 * (yhi - ylo)
    ylo, yhi = ylo - pad, yhi + pad

    box = (55.0, 30.0, width - 130.0, height - 45.0)
    canvas = _Canvas(width, height, title)
    _axes(canvas, box, (xlo, xhi), (ylo, yhi), xlabel, ylabel)

    def to_px(x: float, y: float) -> tuple[float, float]:
        px = box[0] + (x - xlo) / (xhi - xlo) * (box[2] - box[0])
        py = box[3] - (y - ylo) / (yhi - ylo) * (box[3] - box[1])
        return px, py

    labels = []
    for k, (label, xs, ys) in enumerate(cleaned):
        color = PALETTE[k % len(PALETTE)]
        canvas.parts.append(_polyline(xs, ys, to_px, color))
        labels.append((label, color))
    _legend(canvas, labels, width - 120.0, 40.0)
    return canvas.finish()


def plane_chart(
    traces: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    markers: Sequence[tuple[float, float, str]] = (),
    title: str = "",
    width: int = 560,
    height: int = 560,
) -> str:
    """Render planar traces with equal aspect plus optional point markers.

    ``markers`` are (x, y, color) dots, e.g. final agent positions.
    """
    if not traces:
        raise ValueError("no traces to plot")
    cleaned = []
    for label, xs, ys in traces:
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.size == 0 or xs.size != ys.size:
            raise ValueError(f"trace {label!r} is empty or mismatched")
        cleaned.append((label, *_thin(xs, ys)))

    xlo = min(min(s[1].min() for s in cleaned), min((m[0] for m in markers), default=np.inf))
    xhi = max(max(s[1].max() for s in cleaned), max((m[0] for m in markers), default=-np.inf))
    ylo = min(min(s[2].min() for s in cleaned), min((m[1] for m in markers), default=np.inf))
    yhi = max(max(s[2].max() for s in cleaned), max((m[1] for m in markers), default=-np.inf))

    # equal aspect: same data span both ways inside a square pixel box
    span = max(xhi - xlo, yhi - ylo, 1e-6) * 1.08
    cx, cy = (xlo + xhi) / 2.0, (ylo + yhi) / 2.0
    xlo, xhi = cx - span / 2.0, cx + span / 2.0
    ylo, yhi = cy - span / 2.0, cy + span / 2.0

    side = min(width - 185.0, height - 75.0)
    box = (55.0, 30.0, 55.0 + side, 30.0 + side)
    canvas = _Canvas(width, height, title)
    _axes(canvas, box, (xlo, xhi), (ylo, yhi), "x", "y")

    def to_px(x: float, y: float) -> tuple[float, float]:
        px = box[0] + (x - xlo) / (xhi - xlo) * (box[2] - box[0])
        py = box[3] - (y - ylo) / (yhi - ylo) * (box[3] - box[1])
        return px, py

    labels = []
    for k, (label, xs, ys) in enumerate(cleaned):
        color = PALETTE[k % len(PALETTE)]
        dash = "4 3" if label == "target" else ""
        canvas.parts.append(_polyline(xs, ys, to_px, color, dash=dash))
        labels.append((label, color))
    for x, y, color in markers:
        px, py = to_px(x, y)
        canvas.parts.append(
            f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="3.5" fill="{color}" '
            f'stroke="#333333" stroke-width="0.5"/>'
        )
    _legend(canvas, labels, width - 120.0, 40.0)
    return canvas.finish()
