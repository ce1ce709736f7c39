"""Plot composition and SVG rendering."""

from .api import (
    add_colorbar,
    add_label,
    overlay_profile,
    plot_boundaries,
    plot_field,
    plot_streamlines,
    plot_vectors,
)
from .colormap import ColorMap, colormap_names, get_colormap
from .figure import (
    ArrowLayer,
    ColorbarHandle,
    ColorbarLayer,
    FieldLayerHandle,
    Figure,
    LayerHandle,
    PolygonLayer,
    PolylineLayer,
    StreamlineSet,
    TextLayer,
    VectorSet,
)
from .svg import nice_ticks, render_document, render_svg

__all__ = [
    "ArrowLayer",
    "ColorMap",
    "ColorbarHandle",
    "ColorbarLayer",
    "FieldLayerHandle",
    "Figure",
    "LayerHandle",
    "PolygonLayer",
    "PolylineLayer",
    "StreamlineSet",
    "TextLayer",
    "VectorSet",
    "add_colorbar",
    "add_label",
    "colormap_names",
    "get_colormap",
    "nice_ticks",
    "overlay_profile",
    "plot_boundaries",
    "plot_field",
    "plot_streamlines",
    "plot_vectors",
    "render_document",
    "render_svg",
]
