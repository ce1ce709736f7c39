"""Bundled synthetic datasets with analytically prescribed fields.

The step-channel generator produces an L-shaped channel with a sudden
expansion of height ``h`` and a smooth, deterministic mean-velocity field,
so the full plotting pipeline can be exercised without any solver output.
"""

from __future__ import annotations

import numpy as np

from .vtk_io.dataset import Field, FieldKind, RawDataset


def _structured_quads(x: np.ndarray, y: np.ndarray):
    """Points and quad connectivity of a structured grid."""
    nx, ny = len(x), len(y)
    xx, yy = np.meshgrid(x, y)
    points = np.column_stack([xx.ravel(), yy.ravel(), np.zeros(xx.size)])
    cells = []
    for j in range(ny - 1):
        for i in range(nx - 1):
            a = j * nx + i
            cells.append(np.array([a, a + 1, a + nx + 1, a + nx],
                                  dtype=np.int64))
    return points, cells


def step_channel_dataset(h: float = 0.0094318, resolution: int = 2,
                         reference_velocity: float = 1.0) -> RawDataset:
    """L-shaped expanding channel with a prescribed "UMean" vector field.

    The domain is an upstream channel of height 3h over -5h < x < 0 sitting
    on a step of height h, expanding into a channel of height 4h over
    0 < x < 15h. ``resolution`` cells span one step height.

    The field mimics a separating-and-recovering mean flow: a parabolic
    wall-bounded profile whose lower wall drops linearly from the step lip
    to the floor over six step heights, with a small vertical component.
    All values are analytic functions of the cell centroid, stored as cell
    data.
    """
    n = max(1, int(resolution))
    dx = h / n

    # Upstream block: x in [-5h, 0), y in [h, 4h].
    x_up = np.arange(-5 * n, 0 + 1) * dx
    y_up = np.arange(1 * n, 4 * n + 1) * dx
    pts_up, cells_up = _structured_quads(x_up, y_up)

    # Downstream block: x in [0, 15h], y in [0, 4h].
    x_dn = np.arange(0, 15 * n + 1) * dx
    y_dn = np.arange(0, 4 * n + 1) * dx
    pts_dn, cells_dn = _structured_quads(x_dn, y_dn)

    # Merge the two blocks on the shared x = 0 points.
    points = pts_up.tolist()
    index_of = {(round(p[0], 12), round(p[1], 12)): i
                for i, p in enumerate(pts_up)}
    remap = np.empty(len(pts_dn), dtype=np.int64)
    for i, p in enumerate(pts_dn):
        key = (round(p[0], 12), round(p[1], 12))
        if key in index_of:
            remap[i] = index_of[key]
        else:
            index_of[key] = len(points)
            remap[i] = len(points)
            points.append(list(p))
    cells = list(cells_up) + [remap[c] for c in cells_dn]
    points = np.asarray(points)

    centres = np.array([points[c, :2].mean(axis=0) for c in cells])
    u0 = reference_velocity

    def floor_height(x):
        # Lower wall seen by the flow: h upstream, relaxing to 0 by x = 6h.
        return np.where(x < 0, h, h * np.clip(1.0 - x / (6 * h), 0.0, 1.0))

    yb = floor_height(centres[:, 0])
    yhat = np.clip((centres[:, 1] - yb) / (4 * h - yb), 0.0, 1.0)
    ux = u0 * 6.0 * yhat * (1.0 - yhat)
    # Weak downwash over the expansion, fading both downstream and at walls.
    uy = -0.15 * u0 * np.sin(np.pi * yhat) \
        * np.exp(-0.5 * np.abs(centres[:, 0]) / h) * (centres[:, 0] >= 0)
    uz = np.zeros(len(centres))

    umean = Field(FieldKind.VECTOR, np.column_stack([ux, uy, uz]))
    pressure = Field(
        FieldKind.SCALAR,
        (0.5 * u0 ** 2 * (1.0 - yhat ** 2) * np.exp(-centres[:, 0] / (15 * h)))
        .reshape(-1, 1),
    )
    return RawDataset(
        points=points,
        cells=cells,
        cell_fields={"UMean": umean, "p": pressure},
    )


def disk_dataset(radius: float = 1.0, rings: int = 40,
                 sectors: int = 160) -> RawDataset:
    """Disk mesh of quad rings around a triangle fan, rigid-rotation field.

    The "U" field is u = (-y, x, 0): circular streamlines about the origin
    with unit angular velocity.
    """
    rs = np.linspace(0.0, radius, rings + 1)
    thetas = np.arange(sectors) * (2.0 * np.pi / sectors)
    points = [[0.0, 0.0, 0.0]]
    ring_start = [None]  # index of first point of each ring >= 1
    for r in rs[1:]:
        ring_start.append(len(points))
        for t in thetas:
            points.append([r * np.cos(t), r * np.sin(t), 0.0])
    points = np.asarray(points)

    cells = []
    first = ring_start[1]
    for k in range(sectors):
        cells.append(np.array([0, first + k, first + (k + 1) % sectors],
                              dtype=np.int64))
    for ring in range(1, rings):
        inner, outer = ring_start[ring], ring_start[ring + 1]
        for k in range(sectors):
            k1 = (k + 1) % sectors
            cells.append(np.array([inner + k, outer + k, outer + k1,
                                   inner + k1], dtype=np.int64))

    centres = np.array([points[c, :2].mean(axis=0) for c in cells])
    velocity = np.column_stack([-centres[:, 1], centres[:, 0],
                                np.zeros(len(centres))])
    return RawDataset(
        points=points,
        cells=cells,
        cell_fields={"U": Field(FieldKind.VECTOR, velocity)},
    )
