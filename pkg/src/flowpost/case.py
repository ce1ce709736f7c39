"""User-facing dataset facade.

Opening a file yields a :class:`Case`: a validated planar mesh bound to
its cell-data fields. Point fields with no same-named cell field are
converted to cell data on load, so downstream code sees cell data only.
"""

from __future__ import annotations

import json
import warnings
from pathlib import Path

import numpy as np

from .errors import (
    ComponentIndexError,
    FlowpostWarning,
    SidecarError,
    SizeMismatchError,
    UnknownBoundaryError,
    UnknownFieldError,
)
from .polymesh import PolyMesh, build_mesh, point_to_cell
from .vtk_io import read_dataset
from .vtk_io.dataset import Field, FieldKind, RawDataset


class Case:
    """A planar mesh plus its named cell fields.

    Immutable after construction: all lookups return value copies, so a
    post-processing pipeline re-run on the same Case yields identical
    results.
    """

    def __init__(self, mesh: PolyMesh, fields: dict[str, Field], loops=None):
        self._mesh = mesh
        self._fields = dict(fields)
        self._loops = list(mesh.boundary_loops if loops is None else loops)
        for name, f in self._fields.items():
            if len(f) != mesh.n_cells:
                raise SizeMismatchError(
                    f"field '{name}' has {len(f)} tuples for "
                    f"{mesh.n_cells} cells"
                )
        names = [loop.name for loop in self._loops]
        if len(set(names)) != len(names):
            raise SidecarError("boundary names are not distinct")
        self._boundary_names = names

    @property
    def mesh(self) -> PolyMesh:
        return self._mesh

    @property
    def field_names(self) -> list[str]:
        return sorted(self._fields)

    @property
    def boundary_names(self) -> list[str]:
        return list(self._boundary_names)

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        """(xmin, xmax, ymin, ymax) in dataset units."""
        return self._mesh.bounds

    def field(self, name: str) -> Field:
        """The named cell field; its data is read-only."""
        try:
            return self._fields[name]
        except KeyError:
            available = ", ".join(self.field_names) or "none"
            raise UnknownFieldError(
                f"no field '{name}' in case (available: {available})"
            ) from None

    def __getitem__(self, name: str) -> np.ndarray:
        """Writable copy of a field's values.

        Scalar fields come back with shape (n_cells,), vector and tensor
        fields as (n_cells, width), so components can be sliced directly.
        """
        return self.field(name).as_array()

    def __contains__(self, name: str) -> bool:
        return name in self._fields

    @property
    def boundaries(self):
        """Boundary loops in display order (outer loop first)."""
        return list(self._loops)

    def boundary(self, name: str):
        for loop in self._loops:
            if loop.name == name:
                return loop
        available = ", ".join(self._boundary_names) or "none"
        raise UnknownBoundaryError(
            f"no boundary '{name}' in case (available: {available})"
        )


def _sidecar_path(dataset_path: Path) -> Path:
    return dataset_path.parent / (dataset_path.name + ".names.json")


def _apply_sidecar(loops, sidecar: Path):
    try:
        mapping = json.loads(sidecar.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise SidecarError(f"cannot read sidecar {sidecar}: {exc}") from exc
    if not isinstance(mapping, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in mapping.items()
    ):
        raise SidecarError(
            f"sidecar {sidecar} must be a flat JSON object of strings"
        )
    auto_names = {loop.name for loop in loops}
    unknown = sorted(set(mapping) - auto_names)
    if unknown:
        raise SidecarError(
            f"sidecar {sidecar} names unknown boundaries: {', '.join(unknown)}"
        )
    renamed = [
        loop.__class__(mapping.get(loop.name, loop.name), loop.edges,
                       loop.adjacent_cells)
        for loop in loops
    ]
    if len({loop.name for loop in renamed}) != len(renamed):
        raise SidecarError(f"sidecar {sidecar} assigns duplicate names")
    return renamed


def open_case(path, plane_tolerance: float | None = None) -> Case:
    """Open a ``.vtk`` or ``.vtu`` dataset as a :class:`Case`.

    Point fields are converted to cell data (vertex mean) unless a cell
    field of the same name exists, in which case the cell data wins.
    An optional sidecar ``<dataset>.names.json`` next to the file renames
    the automatically numbered boundaries.
    """
    path = Path(path)
    raw = read_dataset(path)
    return case_from_raw(raw, sidecar=_sidecar_path(path),
                         plane_tolerance=plane_tolerance)


def case_from_raw(raw: RawDataset, sidecar: Path | None = None,
                  plane_tolerance: float | None = None) -> Case:
    """Build a Case from an already parsed dataset (mainly for tests)."""
    mesh = build_mesh(raw, plane_tolerance=plane_tolerance)

    fields: dict[str, Field] = dict(raw.cell_fields)
    for name, f in raw.point_fields.items():
        if name in fields:
            warnings.warn(
                f"field '{name}' exists as both point and cell data: "
                "keeping the cell data",
                FlowpostWarning,
                stacklevel=2,
            )
            continue
        fields[name] = point_to_cell(mesh, f)

    loops = mesh.boundary_loops
    if sidecar is not None and sidecar.exists():
        loops = _apply_sidecar(loops, sidecar)
    return Case(mesh, fields, loops)


def get_field(case: Case, name: str) -> Field:
    """The named cell field of ``case``."""
    return case.field(name)


def component(f, k: int) -> Field:
    """Scalar field holding the k-th component of ``f``.

    Accepts a :class:`Field` or a plain (n,) / (n, width) array.
    """
    if isinstance(f, Field):
        data = f.data
    else:
        data = np.asarray(f, dtype=float)
        if data.ndim == 1:
            data = data.reshape(-1, 1)
    if not 0 <= k < data.shape[1]:
        raise ComponentIndexError(
            f"component {k} out of range for width {data.shape[1]}"
        )
    return Field(FieldKind.SCALAR, data[:, k:k + 1].copy())


def boundary_cell_ids(case: Case, boundary: str) -> np.ndarray:
    """Adjacent cell id per boundary edge, in loop traversal order."""
    return case.boundary(boundary).adjacent_cells.copy()
