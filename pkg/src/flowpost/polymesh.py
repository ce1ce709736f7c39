"""Validated planar polygonal mesh.

Projects raw 3-D points onto their common plane, orients every cell
counter-clockwise, builds edge adjacency, computes centroids and areas,
extracts named boundary loops and answers point-location queries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateCellError,
    MeshError,
    NonManifoldEdgeError,
    NotPlanarError,
    SizeMismatchError,
)
from .vtk_io.dataset import Field, RawDataset

DEFAULT_PLANE_TOLERANCE_FACTOR = 1e-6
DEGENERATE_AREA_FACTOR = 1e-12
EDGE_SNAP_FACTOR = 1e-9


@dataclass(frozen=True)
class BoundaryLoop:
    """A closed chain of boundary edges, interior of the domain on the left.

    ``edges[k]`` is a directed point-index pair and ``adjacent_cells[k]``
    the unique cell incident to it.
    """

    name: str
    edges: np.ndarray
    adjacent_cells: np.ndarray

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def vertices(self) -> np.ndarray:
        """Ordered point indices around the loop (one per edge start)."""
        return self.edges[:, 0].copy()


def _signed_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _centroid(poly: np.ndarray, area: float) -> np.ndarray:
    x, y = poly[:, 0], poly[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    cx = float(np.sum((x + xn) * cross)) / (6.0 * area)
    cy = float(np.sum((y + yn) * cross)) / (6.0 * area)
    return np.array([cx, cy])


def _fit_plane_frame(points: np.ndarray, tolerance: float):
    """Best-fit plane via principal components; returns in-plane axes (u, v).

    The u axis follows the original x axis where possible so that already
    planar data keeps its coordinates.
    """
    centred = points - points.mean(axis=0)
    _, _, vt = np.linalg.svd(centred, full_matrices=False)
    normal = vt[2] if vt.shape[0] == 3 else np.array([0.0, 0.0, 1.0])

    deviation = float(np.max(np.abs(centred @ normal))) if len(points) else 0.0
    if deviation > tolerance:
        raise NotPlanarError(
            f"points deviate from the best-fit plane by {deviation:.3e} "
            f"(tolerance {tolerance:.3e})"
        )

    u = np.array([1.0, 0.0, 0.0]) - normal[0] * normal
    if np.linalg.norm(u) < 1e-12:
        u = np.array([0.0, 1.0, 0.0]) - normal[1] * normal
    u /= np.linalg.norm(u)
    v = np.cross(normal, u)
    # Keep the chart orientation aligned with the original axes.
    score = v[1] if abs(v[1]) > 1e-12 else v[2]
    if score < 0:
        v = -v
    return u, v


class PolyMesh:
    """Immutable planar mesh; build with :func:`build_mesh`."""

    def __init__(self, points2d, cells, edge_to_cells, cell_centres, cell_areas,
                 boundary_loops):
        self.points2d = points2d
        self.cells = cells
        self.edge_to_cells = edge_to_cells
        self.cell_centres = cell_centres
        self.cell_areas = cell_areas
        self.boundary_loops = boundary_loops
        for arr in (self.points2d, self.cell_centres, self.cell_areas):
            arr.flags.writeable = False

        mins = np.array([self.points2d[c].min(axis=0) for c in cells]) \
            if cells else np.zeros((0, 2))
        maxs = np.array([self.points2d[c].max(axis=0) for c in cells]) \
            if cells else np.zeros((0, 2))
        self._cell_bbox = (mins, maxs)
        span = self.points2d.max(axis=0) - self.points2d.min(axis=0) \
            if len(self.points2d) else np.zeros(2)
        self._diag = float(np.hypot(*span))
        self._snap = EDGE_SNAP_FACTOR * self._diag

    @property
    def n_points(self) -> int:
        return len(self.points2d)

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """(xmin, xmax, ymin, ymax) of the projected points."""
        lo = self.points2d.min(axis=0)
        hi = self.points2d.max(axis=0)
        return float(lo[0]), float(hi[0]), float(lo[1]), float(hi[1])

    def locate(self, p) -> int | None:
        """Id of a cell containing ``p``, or None when outside the mesh.

        Uses even-odd ray casting; points within a small snap distance of
        an edge go to the lowest-id incident cell, so queries on shared
        edges and corners are deterministic.
        """
        x, y = float(p[0]), float(p[1])
        mins, maxs = self._cell_bbox
        if not len(mins):
            return None
        eps = self._snap
        hit = np.nonzero(
            (mins[:, 0] - eps <= x) & (x <= maxs[:, 0] + eps)
            & (mins[:, 1] - eps <= y) & (y <= maxs[:, 1] + eps)
        )[0]
        for i in hit:
            poly = self.points2d[self.cells[i]]
            if _near_edge(poly, x, y, eps) or _even_odd_inside(poly, x, y):
                return int(i)
        return None


def _near_edge(poly: np.ndarray, x: float, y: float, eps: float) -> bool:
    a = poly
    b = np.roll(poly, -1, axis=0)
    d = b - a
    w = np.array([x, y]) - a
    seg_len2 = np.einsum("ij,ij->i", d, d)
    t = np.clip(np.einsum("ij,ij->i", w, d) / np.where(seg_len2 > 0, seg_len2, 1.0),
                0.0, 1.0)
    closest = a + t[:, None] * d
    dist2 = np.einsum("ij,ij->i", closest - [x, y], closest - [x, y])
    return bool(np.any(dist2 <= eps * eps))


def _even_odd_inside(poly: np.ndarray, x: float, y: float) -> bool:
    inside = False
    n = len(poly)
    j = n - 1
    for i in range(n):
        yi, yj = poly[i, 1], poly[j, 1]
        if (yi > y) != (yj > y):
            xcross = poly[i, 0] + (y - yi) * (poly[j, 0] - poly[i, 0]) / (yj - yi)
            if x < xcross:
                inside = not inside
        j = i
    return inside


def build_mesh(raw: RawDataset, plane_tolerance: float | None = None) -> PolyMesh:
    """Project, validate and index a parsed dataset as a planar mesh.

    Parameters
    ----------
    raw : RawDataset
        Parsed file contents.
    plane_tolerance : float, optional
        Maximum allowed out-of-plane deviation; defaults to 1e-6 times the
        3-D bounding-box diagonal.
    """
    points3d = np.asarray(raw.points, dtype=float)
    span3d = points3d.max(axis=0) - points3d.min(axis=0) if len(points3d) \
        else np.zeros(3)
    diag3d = float(np.linalg.norm(span3d))
    if plane_tolerance is None:
        plane_tolerance = DEFAULT_PLANE_TOLERANCE_FACTOR * diag3d

    u, v = _fit_plane_frame(points3d, plane_tolerance)
    points2d = np.column_stack([points3d @ u, points3d @ v])

    span = points2d.max(axis=0) - points2d.min(axis=0) if len(points2d) \
        else np.zeros(2)
    bbox_area = float(span[0] * span[1])
    area_floor = DEGENERATE_AREA_FACTOR * bbox_area

    cells: list[np.ndarray] = []
    areas = np.empty(len(raw.cells))
    centres = np.empty((len(raw.cells), 2))
    for i, cell in enumerate(raw.cells):
        cell = np.asarray(cell, dtype=np.int64)
        poly = points2d[cell]
        area = _signed_area(poly)
        if abs(area) <= area_floor:
            raise DegenerateCellError(
                f"cell {i} has area {abs(area):.3e}, below the degeneracy "
                f"floor {area_floor:.3e}"
            )
        if area < 0:
            cell = cell[::-1].copy()
            area = -area
        cell.flags.writeable = False
        cells.append(cell)
        areas[i] = area
        centres[i] = _centroid(points2d[cell], area)

    edge_to_cells: dict[tuple[int, int], tuple[int, ...]] = {}
    directed_owner: dict[tuple[int, int], int] = {}
    for i, cell in enumerate(cells):
        for k in range(len(cell)):
            a, b = int(cell[k]), int(cell[(k + 1) % len(cell)])
            if a == b:
                raise DegenerateCellError(f"cell {i} repeats vertex {a}")
            key = (a, b) if a < b else (b, a)
            owners = edge_to_cells.get(key, ())
            if len(owners) >= 2:
                raise NonManifoldEdgeError(
                    f"edge {key} is shared by more than two cells"
                )
            edge_to_cells[key] = owners + (i,)
            directed_owner[(a, b)] = i

    loops = _trace_boundary_loops(points2d, edge_to_cells, directed_owner)

    return PolyMesh(points2d, cells, edge_to_cells, centres, areas, loops)


def _trace_boundary_loops(points2d, edge_to_cells, directed_owner):
    boundary = sorted(
        directed for directed, _ in directed_owner.items()
        if len(edge_to_cells[(min(directed), max(directed))]) == 1
    )
    outgoing: dict[int, list[int]] = {}
    for a, b in boundary:
        outgoing.setdefault(a, []).append(b)
    for ends in outgoing.values():
        ends.sort(reverse=True)  # pop() yields the smallest remaining end

    chains = []
    used: set[tuple[int, int]] = set()
    for start_edge in boundary:
        if start_edge in used:
            continue
        chain = [start_edge]
        used.add(start_edge)
        outgoing[start_edge[0]].remove(start_edge[1])
        cur = start_edge
        while cur[1] != start_edge[0]:
            ends = outgoing.get(cur[1])
            if not ends:
                raise MeshError(
                    f"boundary chain starting at point {start_edge[0]} does "
                    "not close"
                )
            nxt = (cur[1], ends.pop())
            chain.append(nxt)
            used.add(nxt)
            cur = nxt
        chains.append(chain)

    def loop_abs_area(chain):
        verts = points2d[[e[0] for e in chain]]
        return abs(_signed_area(verts))

    chains.sort(key=loop_abs_area, reverse=True)
    loops = []
    for k, chain in enumerate(chains):
        edges = np.array(chain, dtype=np.int64)
        adjacent = np.array([directed_owner[e] for e in chain], dtype=np.int64)
        edges.flags.writeable = False
        adjacent.flags.writeable = False
        loops.append(BoundaryLoop(f"boundary{k}", edges, adjacent))
    return loops


def boundary_loops(mesh: PolyMesh) -> list[BoundaryLoop]:
    """The mesh's boundary loops, outer loop first."""
    return list(mesh.boundary_loops)


def locate_cell(mesh: PolyMesh, p) -> int | None:
    """Id of a cell containing ``p`` or None; see :meth:`PolyMesh.locate`."""
    return mesh.locate(p)


def point_to_cell(mesh: PolyMesh, f: Field) -> Field:
    """Convert a point field to a cell field by averaging cell vertices.

    The vertex mean is exact at the centroid for affine fields on simplex
    and parallelogram cells; constant fields are preserved bit-exactly.
    """
    data = f.data
    if len(data) != mesh.n_points:
        raise SizeMismatchError(
            f"point field has {len(data)} tuples for {mesh.n_points} points"
        )
    out = np.empty((mesh.n_cells, data.shape[1]))
    for i, cell in enumerate(mesh.cells):
        vals = data[cell]
        lo = vals.min(axis=0)
        hi = vals.max(axis=0)
        out[i] = np.where(lo == hi, lo, vals.mean(axis=0))
    return Field(f.kind, out)


def cell_centres(mesh: PolyMesh) -> np.ndarray:
    """Per-cell area centroids, shape (n_cells, 2)."""
    return mesh.cell_centres.copy()


def cell_areas(mesh: PolyMesh) -> np.ndarray:
    """Per-cell areas (positive), shape (n_cells,)."""
    return mesh.cell_areas.copy()
