"""Hand-built meshes shared across the test suite.

UNITSQ4 is the canonical 2x2 quad grid on the unit square:

    6---7---8        cells: 0 bottom-left, 1 bottom-right,
    | 2 | 3 |               2 top-left, 3 top-right
    3---4---5        centres: (.25,.25) (.75,.25) (.25,.75) (.75,.75)
    | 0 | 1 |
    0---1---2
"""

from __future__ import annotations

import numpy as np

from flowpost import Field, FieldKind, RawDataset
from flowpost.case import Case, case_from_raw


def unitsq4_raw(cell_fields=None, point_fields=None, z=0.0) -> RawDataset:
    pts = np.array([[(i % 3) * 0.5, (i // 3) * 0.5, z] for i in range(9)])
    cells = [
        np.array([0, 1, 4, 3]),
        np.array([1, 2, 5, 4]),
        np.array([3, 4, 7, 6]),
        np.array([4, 5, 8, 7]),
    ]
    if cell_fields is None:
        cell_fields = {
            "cid": Field(FieldKind.SCALAR, np.arange(4.0).reshape(-1, 1))
        }
    return RawDataset(points=pts, cells=cells, cell_fields=cell_fields,
                      point_fields=point_fields or {})


def unitsq4_case(**kwargs) -> Case:
    return case_from_raw(unitsq4_raw(**kwargs))


def l_mesh_raw(cell_fields=None) -> RawDataset:
    """Three unit quads at (0,0), (1,0) and (1,1); notch at (0,1)."""
    pts = np.array([
        [0, 0, 0], [1, 0, 0], [2, 0, 0],
        [0, 1, 0], [1, 1, 0], [2, 1, 0],
        [1, 2, 0], [2, 2, 0],
    ], dtype=float)
    cells = [
        np.array([0, 1, 4, 3]),
        np.array([1, 2, 5, 4]),
        np.array([4, 5, 7, 6]),
    ]
    if cell_fields is None:
        cell_fields = {
            "cid": Field(FieldKind.SCALAR, np.arange(3.0).reshape(-1, 1))
        }
    return RawDataset(points=pts, cells=cells, cell_fields=cell_fields)


def l_mesh_case() -> Case:
    return case_from_raw(l_mesh_raw())


def ring_mesh_raw() -> RawDataset:
    """3x3 block of unit quads on [0,3]^2 with the centre cell removed."""
    pts = np.array([[i, j, 0.0] for j in range(4) for i in range(4)])
    cells = []
    for j in range(3):
        for i in range(3):
            if (i, j) == (1, 1):
                continue
            a = j * 4 + i
            cells.append(np.array([a, a + 1, a + 5, a + 4]))
    return RawDataset(points=pts, cells=cells)


def right_triangle_raw() -> RawDataset:
    pts = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0]], dtype=float)
    return RawDataset(points=pts, cells=[np.array([0, 1, 2])])


def perturbed_quad_mesh(rng: np.random.Generator, nx: int, ny: int,
                        amplitude: float = 0.25) -> RawDataset:
    """Randomly jittered structured quad mesh on the unit square.

    Interior points move freely, boundary points only along their side,
    corners stay fixed, so cells stay simple and strictly positive in area.
    """
    xs = np.linspace(0.0, 1.0, nx + 1)
    ys = np.linspace(0.0, 1.0, ny + 1)
    dx, dy = 1.0 / nx, 1.0 / ny
    pts = []
    for j in range(ny + 1):
        for i in range(nx + 1):
            jx = rng.uniform(-amplitude, amplitude) * dx
            jy = rng.uniform(-amplitude, amplitude) * dy
            if i in (0, nx):
                jx = 0.0
            if j in (0, ny):
                jy = 0.0
            pts.append([xs[i] + jx, ys[j] + jy, 0.0])
    cells = []
    for j in range(ny):
        for i in range(nx):
            a = j * (nx + 1) + i
            cells.append(np.array([a, a + 1, a + nx + 2, a + nx + 1]))
    return RawDataset(points=np.asarray(pts), cells=cells)
