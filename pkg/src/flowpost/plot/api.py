"""Plot construction: boundaries, fields, vectors, streamlines, profiles.

Every function takes explicit ``scale_x`` / ``scale_y`` divisors that are
applied to data coordinates before they enter the figure, so axes can be
expressed in units such as step heights.
"""

from __future__ import annotations

import warnings

import numpy as np

from ..case import Case
from ..errors import (
    EmptyProfileError,
    FlowpostWarning,
    InvalidParameterError,
    SizeMismatchError,
)
from ..extract import Profile
from ..vtk_io.dataset import Field
from .colormap import ColorMap, get_colormap
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

DEFAULT_STEP_FRACTION = 0.005
DEFAULT_MAX_STEPS = 10000
STAGNATION_SPEED_FRACTION = 1e-12
ARROW_FILL_FRACTION = 0.9


def _check_scales(scale_x: float, scale_y: float):
    if scale_x <= 0 or scale_y <= 0:
        raise InvalidParameterError(
            f"scale divisors must be positive, got ({scale_x}, {scale_y})"
        )


def _scalar_values(values, n_cells: int) -> np.ndarray:
    if isinstance(values, Field):
        if values.kind.ncomponents != 1:
            raise SizeMismatchError(
                "plot_field needs a scalar field; extract a component first"
            )
        values = values.data[:, 0]
    values = np.asarray(values, dtype=float).reshape(-1)
    if len(values) != n_cells:
        raise SizeMismatchError(
            f"{len(values)} values for {n_cells} cells"
        )
    if not np.all(np.isfinite(values)):
        raise InvalidParameterError("field values contain non-finite entries")
    return values


def _vector_values(field, n_cells: int) -> np.ndarray:
    if isinstance(field, Field):
        data = field.data
    else:
        data = np.asarray(field, dtype=float)
    if data.ndim != 2 or data.shape[1] < 2:
        raise SizeMismatchError(
            "plot_vectors needs per-cell tuples with at least 2 components"
        )
    if len(data) != n_cells:
        raise SizeMismatchError(f"{len(data)} vectors for {n_cells} cells")
    return data[:, :2]


def plot_boundaries(fig: Figure, case: Case, scale_x: float = 1.0,
                    scale_y: float = 1.0, color: str = "#000000",
                    width: float = 1.2) -> LayerHandle:
    """Draw one closed polyline per boundary loop of the geometry."""
    _check_scales(scale_x, scale_y)
    lines = []
    for loop in case.boundaries:
        verts = case.mesh.points2d[loop.vertices()].astype(float)
        verts = verts / [scale_x, scale_y]
        lines.append(verts)
        fig.expand_view(verts[:, 0], verts[:, 1])
    idx = fig.add_layer(PolylineLayer(lines=lines, color=color, width=width,
                                      closed=True, css_class="boundary"))
    return LayerHandle(fig, idx)


def plot_field(fig: Figure, case: Case, values, scale_x: float = 1.0,
               scale_y: float = 1.0, colormap=None,
               value_range: tuple[float, float] | None = None) -> FieldLayerHandle:
    """Fill every cell with the color of its scalar value.

    The default range is (min, max) of the values; a constant field gets
    the degenerate range expanded to plus/minus one half around it.
    """
    _check_scales(scale_x, scale_y)
    vals = _scalar_values(values, case.mesh.n_cells)
    if value_range is None:
        vmin, vmax = float(vals.min()), float(vals.max())
    else:
        vmin, vmax = float(value_range[0]), float(value_range[1])
    if vmin == vmax:
        vmin, vmax = vmin - 0.5, vmax + 0.5
    cmap = get_colormap(colormap).with_range(vmin, vmax) \
        if not isinstance(colormap, ColorMap) else colormap.with_range(vmin, vmax)

    scale = np.array([scale_x, scale_y])
    polys = [case.mesh.points2d[cell] / scale for cell in case.mesh.cells]
    fills = [cmap.color(v) for v in vals]
    for poly in polys:
        fig.expand_view(poly[:, 0], poly[:, 1])
    idx = fig.add_layer(PolygonLayer(polygons=polys, fills=fills))
    return FieldLayerHandle(fig, idx, cmap)


def plot_vectors(fig: Figure, case: Case, field, scale_x: float = 1.0,
                 scale_y: float = 1.0, sample_nx: int | None = None,
                 sample_ny: int | None = None, normalize: bool = False,
                 color: str = "#1a1a1a") -> VectorSet:
    """Draw arrows showing a vector field's in-plane magnitude and direction.

    Arrows anchor at cell centres, or at the inside points of an
    ``sample_nx`` by ``sample_ny`` Cartesian grid when both are given.
    The drawn angle is exactly atan2(vy, vx) of the anchor's value.
    """
    _check_scales(scale_x, scale_y)
    data = _vector_values(field, case.mesh.n_cells)
    mesh = case.mesh

    if (sample_nx is None) != (sample_ny is None):
        raise InvalidParameterError(
            "sample_nx and sample_ny must be given together"
        )
    if sample_nx is not None:
        if sample_nx < 2 or sample_ny < 2:
            raise InvalidParameterError("vector subsampling grid must be >= 2x2")
        xmin, xmax, ymin, ymax = case.bounds
        gx = np.linspace(xmin, xmax, sample_nx)
        gy = np.linspace(ymin, ymax, sample_ny)
        anchors, vectors = [], []
        for y in gy:
            for x in gx:
                cid = mesh.locate((x, y))
                if cid is not None:
                    anchors.append((x, y))
                    vectors.append(data[cid])
        anchors = np.asarray(anchors, dtype=float).reshape(-1, 2)
        vectors = np.asarray(vectors, dtype=float).reshape(-1, 2)
        spacing = min((gx[1] - gx[0]) / scale_x, (gy[1] - gy[0]) / scale_y)
    else:
        anchors = mesh.cell_centres.copy()
        vectors = data
        spacing = float(np.sqrt(np.median(mesh.cell_areas))) \
            / np.sqrt(scale_x * scale_y)

    mags = np.hypot(vectors[:, 0], vectors[:, 1])
    keep = mags > 0.0
    anchors, vectors, mags = anchors[keep], vectors[keep], mags[keep]
    angles = np.arctan2(vectors[:, 1], vectors[:, 0])
    max_len = ARROW_FILL_FRACTION * spacing
    if len(mags) == 0:
        lengths = np.zeros(0)
    elif normalize:
        lengths = np.full(len(mags), max_len)
    else:
        lengths = max_len * mags / mags.max()

    scaled = anchors / [scale_x, scale_y]
    if len(scaled):
        tips_x = scaled[:, 0] + lengths * np.cos(angles)
        tips_y = scaled[:, 1] + lengths * np.sin(angles)
        fig.expand_view(np.concatenate([scaled[:, 0], tips_x]),
                        np.concatenate([scaled[:, 1], tips_y]))
    idx = fig.add_layer(ArrowLayer(anchors=scaled, angles=angles,
                                   lengths=lengths, color=color))
    return VectorSet(fig, idx, n_arrows=len(scaled))


def _unit_velocity(mesh, data: np.ndarray, p: np.ndarray, floor: float):
    cid = mesh.locate(p)
    if cid is None:
        return None
    v = data[cid]
    speed = float(np.hypot(v[0], v[1]))
    if speed <= floor:
        return None
    return v[:2] / speed


def plot_streamlines(fig: Figure, case: Case, field, seeds,
                     scale_x: float = 1.0, scale_y: float = 1.0,
                     step: float | None = None,
                     max_steps: int = DEFAULT_MAX_STEPS,
                     color: str = "#20508a", width: float = 1.0) -> StreamlineSet:
    """Integrate streamlines of a vector field from the given seed points.

    Classical fourth-order Runge-Kutta over the piecewise-constant cell
    velocity, stepping a fixed arc length per step. Integration stops when
    a stage leaves the mesh, the local speed vanishes, or ``max_steps``
    is reached. Seeds outside the mesh are skipped with a warning.
    """
    _check_scales(scale_x, scale_y)
    data = _vector_values(field, case.mesh.n_cells)
    mesh = case.mesh
    xmin, xmax, ymin, ymax = case.bounds
    diag = float(np.hypot(xmax - xmin, ymax - ymin))
    if step is None:
        step = DEFAULT_STEP_FRACTION * diag
    if step <= 0:
        raise InvalidParameterError(f"step must be positive, got {step}")

    max_speed = float(np.hypot(data[:, 0], data[:, 1]).max()) if len(data) else 0.0
    floor = STAGNATION_SPEED_FRACTION * max_speed

    lines = []
    for seed in seeds:
        p = np.asarray(seed, dtype=float)
        if mesh.locate(p) is None:
            warnings.warn(
                f"streamline seed ({p[0]}, {p[1]}) lies outside the mesh; "
                "skipped",
                FlowpostWarning,
                stacklevel=2,
            )
            continue
        pts = [p.copy()]
        for _ in range(max_steps):
            k1 = _unit_velocity(mesh, data, p, floor)
            if k1 is None:
                break
            k2 = _unit_velocity(mesh, data, p + 0.5 * step * k1, floor)
            if k2 is None:
                break
            k3 = _unit_velocity(mesh, data, p + 0.5 * step * k2, floor)
            if k3 is None:
                break
            k4 = _unit_velocity(mesh, data, p + step * k3, floor)
            if k4 is None:
                break
            p = p + (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if mesh.locate(p) is None:
                break
            pts.append(p.copy())
        line = np.asarray(pts) / [scale_x, scale_y]
        lines.append(line)
        fig.expand_view(line[:, 0], line[:, 1])

    idx = fig.add_layer(PolylineLayer(lines=lines, color=color, width=width,
                                      closed=False, css_class="streamline"))
    return StreamlineSet(fig, idx, n_lines=len(lines))


def add_colorbar(fig: Figure, handle: FieldLayerHandle,
                 label: str | None = None) -> ColorbarHandle:
    """Attach a vertical colorbar reflecting a field layer's colormap."""
    layer = handle.resolve(fig)
    if not isinstance(layer, PolygonLayer) or handle.colormap is None:
        raise InvalidParameterError(
            "add_colorbar needs the handle returned by plot_field"
        )
    idx = fig.add_layer(ColorbarLayer(colormap=handle.colormap, label=label))
    return ColorbarHandle(fig, idx)


def overlay_profile(fig: Figure, profile: Profile, anchor_x: float,
                    width_scale: float, scale_x: float = 1.0,
                    scale_y: float = 1.0, color: str = "#b22222",
                    width: float = 1.2) -> LayerHandle:
    """Embed a profile into the geometry as an offset polyline.

    Each sample is drawn at ``x = anchor_x + width_scale * value`` and
    ``y = position`` (both in data units, then divided by the scales).
    """
    _check_scales(scale_x, scale_y)
    if len(profile) == 0:
        raise EmptyProfileError("profile has no samples")
    if profile.values.shape[1] != 1:
        raise InvalidParameterError(
            "overlay_profile needs a scalar profile; extract a component first"
        )
    xs = (anchor_x + width_scale * profile.values[:, 0]) / scale_x
    ys = profile.positions / scale_y
    line = np.column_stack([xs, ys])
    fig.expand_view(xs, ys)
    idx = fig.add_layer(PolylineLayer(lines=[line], color=color, width=width,
                                      closed=False, css_class="profile"))
    return LayerHandle(fig, idx)


def add_label(fig: Figure, x: float, y: float, text: str,
              scale_x: float = 1.0, scale_y: float = 1.0, size: float = 12.0,
              anchor: str = "middle") -> LayerHandle:
    """Place a text annotation at a data-space position."""
    _check_scales(scale_x, scale_y)
    idx = fig.add_layer(TextLayer(x=x / scale_x, y=y / scale_y, text=str(text),
                                  size=size, anchor=anchor))
    fig.expand_view([x / scale_x], [y / scale_y])
    return LayerHandle(fig, idx)
