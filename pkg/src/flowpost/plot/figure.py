"""Abstract plot document: ordered layers over a data-space view rectangle.

Layers hold coordinates already divided by the axis scale divisors; they
are rendered back-to-front in insertion order (painter's algorithm).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import StaleHandleError
from .colormap import ColorMap


@dataclass
class PolygonLayer:
    """Filled polygons (one per mesh cell for field plots)."""

    polygons: list[np.ndarray]
    fills: list[str]
    stroke: str | None = None
    stroke_width: float = 0.0


@dataclass
class PolylineLayer:
    """Open or closed polylines with a shared style."""

    lines: list[np.ndarray]
    color: str = "#000000"
    width: float = 1.0
    closed: bool = False
    css_class: str = "line"


@dataclass
class ArrowLayer:
    """Arrows: anchor points, angles (radians) and lengths in view units."""

    anchors: np.ndarray
    angles: np.ndarray
    lengths: np.ndarray
    color: str = "#1a1a1a"
    width: float = 1.0


@dataclass
class TextLayer:
    """Free-standing labels placed in view coordinates."""

    x: float
    y: float
    text: str
    size: float = 12.0
    anchor: str = "middle"


@dataclass
class ColorbarLayer:
    """Vertical colorbar tied to a colormap with a resolved range."""

    colormap: ColorMap
    label: str | None = None


Layer = PolygonLayer | PolylineLayer | ArrowLayer | TextLayer | ColorbarLayer


class Figure:
    """Ordered layers, a view rectangle and axis decoration."""

    def __init__(self):
        self.layers: list[Layer] = []
        self.view: tuple[float, float, float, float] | None = None
        self.xlabel: str = ""
        self.ylabel: str = ""

    def add_layer(self, layer: Layer) -> int:
        self.layers.append(layer)
        return len(self.layers) - 1

    def expand_view(self, xs, ys):
        xs = np.asarray(xs, dtype=float)
        ys = np.asarray(ys, dtype=float)
        if xs.size == 0:
            return
        lo_x, hi_x = float(xs.min()), float(xs.max())
        lo_y, hi_y = float(ys.min()), float(ys.max())
        if self.view is None:
            self.view = (lo_x, hi_x, lo_y, hi_y)
        else:
            x0, x1, y0, y1 = self.view
            self.view = (min(x0, lo_x), max(x1, hi_x),
                         min(y0, lo_y), max(y1, hi_y))


@dataclass(frozen=True)
class LayerHandle:
    """Reference to one layer of a figure, for later customization."""

    figure: Figure
    index: int

    def resolve(self, figure: Figure) -> Layer:
        if self.figure is not figure or not 0 <= self.index < len(figure.layers):
            raise StaleHandleError(
                "handle does not refer to a live layer of this figure"
            )
        return figure.layers[self.index]


@dataclass(frozen=True)
class FieldLayerHandle(LayerHandle):
    colormap: ColorMap = field(default=None)  # resolved range


@dataclass(frozen=True)
class VectorSet(LayerHandle):
    n_arrows: int = 0


@dataclass(frozen=True)
class StreamlineSet(LayerHandle):
    n_lines: int = 0


@dataclass(frozen=True)
class ColorbarHandle(LayerHandle):
    def set_label(self, text: str):
        """Set the colorbar's axis label after creation."""
        layer = self.resolve(self.figure)
        layer.label = text
