"""Data extraction: line profiles, Cartesian resampling, boundary geometry.

All operations are pure functions of an immutable :class:`~flowpost.case.Case`
and return value copies, so repeated calls give identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .case import Case
from .errors import InvalidParameterError, NoIntersectionError

MIN_SUBSEGMENT_FRACTION = 1e-9


@dataclass(frozen=True)
class Profile:
    """Samples along a straight probe line, ordered by arc length.

    One sample per maximal sub-segment of the line inside a single cell,
    taken at the sub-segment midpoint with that cell's value.
    """

    positions: np.ndarray
    values: np.ndarray
    cells: np.ndarray

    def __post_init__(self):
        for arr in (self.positions, self.values, self.cells):
            arr.flags.writeable = False

    def __len__(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class PlaneSample:
    """Field values resampled on a Cartesian grid spanning the case bounds.

    ``values[j, i]`` belongs to grid point ``(grid_x[i], grid_y[j])``;
    entries with ``mask[j, i] == False`` lie outside the mesh and carry NaN.
    """

    grid_x: np.ndarray
    grid_y: np.ndarray
    values: np.ndarray
    mask: np.ndarray

    def __post_init__(self):
        for arr in (self.grid_x, self.grid_y, self.values, self.mask):
            arr.flags.writeable = False


def _segment_edge_params(mesh, p1: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Parameters t in (0, 1) where p1 + t*d crosses any mesh edge."""
    edges = np.array(sorted(mesh.edge_to_cells), dtype=np.int64)
    if not len(edges):
        return np.empty(0)
    a = mesh.points2d[edges[:, 0]]
    b = mesh.points2d[edges[:, 1]]
    e = b - a
    # Solve p1 + t*d == a + s*e for each edge.
    denom = d[0] * e[:, 1] - d[1] * e[:, 0]
    w = a - p1
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (w[:, 0] * e[:, 1] - w[:, 1] * e[:, 0]) / denom
        s = (w[:, 0] * d[1] - w[:, 1] * d[0]) / -denom
    ok = np.isfinite(t) & np.isfinite(s) & (t > 0) & (t < 1) & (s >= 0) & (s <= 1)
    return np.unique(t[ok])


def profile_along_line(case: Case, p1, p2, field: str) -> Profile:
    """Sample a field along the segment from ``p1`` to ``p2``.

    The segment is clipped against the mesh cells; each maximal in-cell
    sub-segment contributes one sample at its midpoint, carrying the
    cell's stored value. Sub-segments shorter than 1e-9 of the segment
    length are dropped.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    d = p2 - p1
    length = float(np.hypot(*d))
    if length == 0.0:
        raise InvalidParameterError("profile endpoints coincide")
    data = case.field(field).data

    mesh = case.mesh
    ts = _segment_edge_params(mesh, p1, d)
    breaks = np.concatenate([[0.0], ts, [1.0]])

    # Locate each sub-interval by its midpoint, then merge consecutive
    # intervals that fall in the same cell into maximal runs.
    runs: list[tuple[float, float, int]] = []
    for t0, t1 in zip(breaks[:-1], breaks[1:]):
        if t1 - t0 < MIN_SUBSEGMENT_FRACTION:
            continue
        mid = p1 + 0.5 * (t0 + t1) * d
        cid = mesh.locate(mid)
        if cid is None:
            continue
        if runs and runs[-1][2] == cid and abs(runs[-1][1] - t0) < \
                MIN_SUBSEGMENT_FRACTION:
            runs[-1] = (runs[-1][0], t1, cid)
        else:
            runs.append((t0, t1, cid))

    if not runs:
        raise NoIntersectionError("probe line does not intersect the mesh")

    positions = np.array([0.5 * (t0 + t1) * length for t0, t1, _ in runs])
    cells = np.array([cid for _, _, cid in runs], dtype=np.int64)
    values = data[cells].copy()
    return Profile(positions=positions, values=values, cells=cells)


def sample_by_plane(case: Case, nx: int, ny: int, field: str) -> PlaneSample:
    """Resample a field on an ``nx`` by ``ny`` grid spanning the case bounds."""
    if nx < 2 or ny < 2:
        raise InvalidParameterError(
            f"grid must be at least 2x2, got {nx}x{ny}"
        )
    data = case.field(field).data
    xmin, xmax, ymin, ymax = case.bounds
    grid_x = np.linspace(xmin, xmax, nx)
    grid_y = np.linspace(ymin, ymax, ny)

    width = data.shape[1]
    values = np.full((ny, nx, width), np.nan)
    mask = np.zeros((ny, nx), dtype=bool)
    mesh = case.mesh
    for j, y in enumerate(grid_y):
        for i, x in enumerate(grid_x):
            cid = mesh.locate((x, y))
            if cid is not None:
                values[j, i] = data[cid]
                mask[j, i] = True
    return PlaneSample(grid_x=grid_x, grid_y=grid_y, values=values, mask=mask)


def _loop_geometry(case: Case, boundary: str):
    loop = case.boundary(boundary)
    pts = case.mesh.points2d
    a = pts[loop.edges[:, 0]]
    b = pts[loop.edges[:, 1]]
    return loop, a, b


def dist(case: Case, boundary: str) -> np.ndarray:
    """Distance from each boundary-adjacent cell centroid to its edge.

    Point-to-segment distance: the perpendicular foot is clamped to the
    edge endpoints, which is the correct notion at obtuse corners.
    """
    loop, a, b = _loop_geometry(case, boundary)
    centres = case.mesh.cell_centres[loop.adjacent_cells]
    d = b - a
    w = centres - a
    seg_len2 = np.einsum("ij,ij->i", d, d)
    t = np.clip(np.einsum("ij,ij->i", w, d)
                / np.where(seg_len2 > 0, seg_len2, 1.0), 0.0, 1.0)
    closest = a + t[:, None] * d
    return np.linalg.norm(centres - closest, axis=1)


def tangents(case: Case, boundary: str) -> np.ndarray:
    """Unit tangent per boundary edge, along the loop traversal direction."""
    _, a, b = _loop_geometry(case, boundary)
    d = b - a
    return d / np.linalg.norm(d, axis=1, keepdims=True)


def normals(case: Case, boundary: str) -> np.ndarray:
    """Unit outward normal per boundary edge.

    Loops are traversed with the domain interior on the left, so the
    outward normal is the tangent rotated a quarter turn clockwise.
    """
    t = tangents(case, boundary)
    return np.column_stack([t[:, 1], -t[:, 0]])
