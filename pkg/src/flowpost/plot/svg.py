"""Deterministic SVG 1.1 backend.

The same figure always renders to byte-identical output: fixed layout
constants, fixed number formatting, no timestamps. The data-to-pixel
transform is recorded in a comment at the top of the document.
"""

from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from ..errors import DataIoError, InvalidParameterError
from .figure import (
    ArrowLayer,
    ColorbarLayer,
    Figure,
    PolygonLayer,
    PolylineLayer,
    TextLayer,
)

MAX_CONTENT_W = 600.0
MAX_CONTENT_H = 1200.0
MARGIN_LEFT = 70.0
MARGIN_TOP = 20.0
MARGIN_BOTTOM = 58.0
MARGIN_RIGHT = 30.0
COLORBAR_SLOT_W = 92.0
COLORBAR_W = 18.0
COLORBAR_STRIPS = 64
MAX_TICKS = 10
FONT = "sans-serif"
FONT_SIZE = 12.0

ARROW_HEAD_FRACTION = 0.3
ARROW_HEAD_HALF_ANGLE = 0.45  # radians


def nice_ticks(lo: float, hi: float, max_ticks: int = MAX_TICKS) -> list[float]:
    """Tick positions at 1/2/5 x 10^k steps, at most ``max_ticks`` of them."""
    span = hi - lo
    if span <= 0 or not math.isfinite(span):
        return [lo]
    mag = 10.0 ** math.floor(math.log10(span / max_ticks))
    for mult in (1.0, 2.0, 5.0, 10.0, 20.0, 50.0):
        step = mult * mag
        k0 = math.ceil(lo / step - 1e-9)
        k1 = math.floor(hi / step + 1e-9)
        if k1 - k0 + 1 <= max_ticks:
            return [round(k * step, 12) for k in range(k0, k1 + 1)]
    return [lo, hi]


def _fmt_value(v: float) -> str:
    return f"{round(v, 12):g}"


def _px(v: float) -> str:
    return f"{v:.2f}"


class _Canvas:
    """Pixel mapping plus the accumulated document lines."""

    def __init__(self, fig: Figure, n_colorbars: int):
        if fig.view is None:
            raise InvalidParameterError("figure has no drawable content")
        xmin, xmax, ymin, ymax = fig.view
        if xmax - xmin <= 0:
            xmin, xmax = xmin - 0.5, xmax + 0.5
        if ymax - ymin <= 0:
            ymin, ymax = ymin - 0.5, ymax + 0.5
        self.view = (xmin, xmax, ymin, ymax)
        vw, vh = xmax - xmin, ymax - ymin
        self.scale = min(MAX_CONTENT_W / vw, MAX_CONTENT_H / vh)
        self.content_w = vw * self.scale
        self.content_h = vh * self.scale
        self.width = (MARGIN_LEFT + self.content_w + MARGIN_RIGHT
                      + COLORBAR_SLOT_W * n_colorbars)
        self.height = MARGIN_TOP + self.content_h + MARGIN_BOTTOM
        self.lines: list[str] = []

    def px(self, x: float) -> float:
        return MARGIN_LEFT + (x - self.view[0]) * self.scale

    def py(self, y: float) -> float:
        return MARGIN_TOP + (self.view[3] - y) * self.scale

    def point(self, x: float, y: float) -> str:
        return f"{_px(self.px(x))},{_px(self.py(y))}"

    def add(self, line: str):
        self.lines.append(line)


def _render_polygons(canvas: _Canvas, layer: PolygonLayer):
    canvas.add('<g class="cells">')
    for poly, fill in zip(layer.polygons, layer.fills):
        pts = " ".join(canvas.point(x, y) for x, y in poly)
        stroke = layer.stroke if layer.stroke is not None else fill
        swidth = layer.stroke_width if layer.stroke is not None else 0.3
        canvas.add(
            f'<polygon points="{pts}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="{swidth:g}"/>'
        )
    canvas.add("</g>")


def _render_polylines(canvas: _Canvas, layer: PolylineLayer):
    canvas.add(f'<g class="{layer.css_class}-layer">')
    for line in layer.lines:
        coords = line
        if layer.closed and len(line) > 1:
            coords = np.vstack([line, line[:1]])
        pts = " ".join(canvas.point(x, y) for x, y in coords)
        canvas.add(
            f'<polyline class="{layer.css_class}" points="{pts}" fill="none" '
            f'stroke="{layer.color}" stroke-width="{layer.width:g}"/>'
        )
    canvas.add("</g>")


def _render_arrows(canvas: _Canvas, layer: ArrowLayer):
    canvas.add('<g class="arrow-layer">')
    for (ax, ay), angle, length in zip(layer.anchors, layer.angles,
                                       layer.lengths):
        tip = (ax + length * math.cos(angle), ay + length * math.sin(angle))
        hl = ARROW_HEAD_FRACTION * length
        back = angle + math.pi
        w1 = back + ARROW_HEAD_HALF_ANGLE
        w2 = back - ARROW_HEAD_HALF_ANGLE
        h1 = (tip[0] + hl * math.cos(w1), tip[1] + hl * math.sin(w1))
        h2 = (tip[0] + hl * math.cos(w2), tip[1] + hl * math.sin(w2))
        d = (
            f"M {canvas.point(ax, ay).replace(',', ' ')} "
            f"L {canvas.point(*tip).replace(',', ' ')} "
            f"M {canvas.point(*h1).replace(',', ' ')} "
            f"L {canvas.point(*tip).replace(',', ' ')} "
            f"L {canvas.point(*h2).replace(',', ' ')}"
        )
        canvas.add(
            f'<path class="arrow" d="{d}" fill="none" stroke="{layer.color}" '
            f'stroke-width="{layer.width:g}"/>'
        )
    canvas.add("</g>")


def _render_text(canvas: _Canvas, layer: TextLayer):
    canvas.add(
        f'<text x="{_px(canvas.px(layer.x))}" y="{_px(canvas.py(layer.y))}" '
        f'font-family="{FONT}" font-size="{layer.size:g}" '
        f'text-anchor="{layer.anchor}">{escape(layer.text)}</text>'
    )


def _render_colorbar(canvas: _Canvas, layer: ColorbarLayer, slot: int):
    cmap = layer.colormap
    x0 = (MARGIN_LEFT + canvas.content_w + MARGIN_RIGHT
          + COLORBAR_SLOT_W * slot + 10.0)
    y0 = MARGIN_TOP
    h = canvas.content_h
    canvas.add(f'<g class="colorbar">')
    for i in range(COLORBAR_STRIPS):
        frac = (i + 0.5) / COLORBAR_STRIPS
        value = cmap.vmin + frac * (cmap.vmax - cmap.vmin)
        top = y0 + h * (1.0 - (i + 1) / COLORBAR_STRIPS)
        canvas.add(
            f'<rect x="{_px(x0)}" y="{_px(top)}" width="{COLORBAR_W:g}" '
            f'height="{_px(h / COLORBAR_STRIPS + 0.5)}" '
            f'fill="{cmap.color(value)}"/>'
        )
    canvas.add(
        f'<rect x="{_px(x0)}" y="{_px(y0)}" width="{COLORBAR_W:g}" '
        f'height="{_px(h)}" fill="none" stroke="#000000" stroke-width="0.8"/>'
    )
    for t in nice_ticks(cmap.vmin, cmap.vmax):
        ty = y0 + h * (1.0 - cmap.position(t))
        canvas.add(
            f'<line x1="{_px(x0 + COLORBAR_W)}" y1="{_px(ty)}" '
            f'x2="{_px(x0 + COLORBAR_W + 4)}" y2="{_px(ty)}" '
            f'stroke="#000000" stroke-width="0.8"/>'
        )
        canvas.add(
            f'<text x="{_px(x0 + COLORBAR_W + 7)}" y="{_px(ty)}" '
            f'font-family="{FONT}" font-size="{FONT_SIZE:g}" '
            f'text-anchor="start" dy="0.32em">{_fmt_value(t)}</text>'
        )
    if layer.label:
        lx = x0 + COLORBAR_W + 48.0
        ly = y0 + h / 2.0
        canvas.add(
            f'<text x="{_px(lx)}" y="{_px(ly)}" font-family="{FONT}" '
            f'font-size="{FONT_SIZE:g}" text-anchor="middle" '
            f'transform="rotate(-90 {_px(lx)} {_px(ly)})">'
            f"{escape(layer.label)}</text>"
        )
    canvas.add("</g>")


def _render_axes(canvas: _Canvas, fig: Figure):
    xmin, xmax, ymin, ymax = canvas.view
    x0, y0 = MARGIN_LEFT, MARGIN_TOP
    canvas.add(
        f'<rect class="frame" x="{_px(x0)}" y="{_px(y0)}" '
        f'width="{_px(canvas.content_w)}" height="{_px(canvas.content_h)}" '
        f'fill="none" stroke="#000000" stroke-width="1"/>'
    )
    bottom = y0 + canvas.content_h
    for t in nice_ticks(xmin, xmax):
        tx = canvas.px(t)
        canvas.add(
            f'<line class="xtick" x1="{_px(tx)}" y1="{_px(bottom)}" '
            f'x2="{_px(tx)}" y2="{_px(bottom + 5)}" stroke="#000000" '
            f'stroke-width="1"/>'
        )
        canvas.add(
            f'<text class="xticklabel" x="{_px(tx)}" y="{_px(bottom + 18)}" '
            f'font-family="{FONT}" font-size="{FONT_SIZE:g}" '
            f'text-anchor="middle">{_fmt_value(t)}</text>'
        )
    for t in nice_ticks(ymin, ymax):
        ty = canvas.py(t)
        canvas.add(
            f'<line class="ytick" x1="{_px(x0 - 5)}" y1="{_px(ty)}" '
            f'x2="{_px(x0)}" y2="{_px(ty)}" stroke="#000000" stroke-width="1"/>'
        )
        canvas.add(
            f'<text class="yticklabel" x="{_px(x0 - 8)}" y="{_px(ty)}" '
            f'font-family="{FONT}" font-size="{FONT_SIZE:g}" '
            f'text-anchor="end" dy="0.32em">{_fmt_value(t)}</text>'
        )
    if fig.xlabel:
        canvas.add(
            f'<text class="xlabel" x="{_px(x0 + canvas.content_w / 2)}" '
            f'y="{_px(bottom + 40)}" font-family="{FONT}" '
            f'font-size="{FONT_SIZE:g}" text-anchor="middle">'
            f"{escape(fig.xlabel)}</text>"
        )
    if fig.ylabel:
        lx, ly = x0 - 45.0, y0 + canvas.content_h / 2.0
        canvas.add(
            f'<text class="ylabel" x="{_px(lx)}" y="{_px(ly)}" '
            f'font-family="{FONT}" font-size="{FONT_SIZE:g}" '
            f'text-anchor="middle" transform="rotate(-90 {_px(lx)} {_px(ly)})">'
            f"{escape(fig.ylabel)}</text>"
        )


def render_document(fig: Figure) -> str:
    """Serialize a figure to an SVG 1.1 document string."""
    if not fig.layers:
        raise InvalidParameterError("cannot render an empty figure")
    n_colorbars = sum(isinstance(l, ColorbarLayer) for l in fig.layers)
    canvas = _Canvas(fig, n_colorbars)
    xmin, xmax, ymin, ymax = canvas.view

    canvas.add('<?xml version="1.0" encoding="UTF-8"?>')
    canvas.add(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_px(canvas.width)}" height="{_px(canvas.height)}" '
        f'viewBox="0 0 {_px(canvas.width)} {_px(canvas.height)}">'
    )
    canvas.add(
        f"<!-- data-to-pixel transform: px = {MARGIN_LEFT:g} + "
        f"(x - {xmin!r}) * {canvas.scale!r}; py = {MARGIN_TOP:g} + "
        f"({ymax!r} - y) * {canvas.scale!r} -->"
    )
    canvas.add(
        f'<rect class="background" x="0" y="0" width="{_px(canvas.width)}" '
        f'height="{_px(canvas.height)}" fill="#ffffff"/>'
    )

    slot = 0
    for layer in fig.layers:
        if isinstance(layer, PolygonLayer):
            _render_polygons(canvas, layer)
        elif isinstance(layer, PolylineLayer):
            _render_polylines(canvas, layer)
        elif isinstance(layer, ArrowLayer):
            _render_arrows(canvas, layer)
        elif isinstance(layer, TextLayer):
            _render_text(canvas, layer)
        elif isinstance(layer, ColorbarLayer):
            _render_colorbar(canvas, layer, slot)
            slot += 1
        else:  # pragma: no cover - layer union is closed
            raise InvalidParameterError(f"unknown layer type {type(layer)}")

    _render_axes(canvas, fig)
    canvas.add("</svg>")
    return "\n".join(canvas.lines) + "\n"


def render_svg(fig: Figure, path) -> None:
    """Render a figure to ``path`` as a deterministic SVG file."""
    document = render_document(fig)
    try:
        with open(path, "wb") as fh:
            fh.write(document.encode("utf-8"))
    except OSError as exc:
        raise DataIoError(f"cannot write {path}: {exc}") from exc
