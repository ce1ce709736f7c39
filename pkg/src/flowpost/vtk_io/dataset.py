"""In-memory form of a parsed unstructured dataset."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..errors import InvalidDatasetError


class FieldKind(enum.Enum):
    """Tuple width of a field attached to points or cells."""

    SCALAR = 1
    VECTOR = 3
    TENSOR = 9

    @property
    def ncomponents(self) -> int:
        return self.value


_KIND_BY_WIDTH = {k.value: k for k in FieldKind}


def kind_for_width(width: int) -> FieldKind:
    """Map a component count to a field kind; other widths are unsupported."""
    try:
        return _KIND_BY_WIDTH[int(width)]
    except KeyError:
        raise InvalidDatasetError(
            f"unsupported number of components: {width} (expected 1, 3 or 9)"
        ) from None


class SourceKind(enum.Enum):
    LEGACY_ASCII = "legacy-ascii"
    LEGACY_BINARY = "legacy-binary"
    XML_VTU = "xml-vtu"


@dataclass(frozen=True)
class Field:
    """A named quantity: one tuple per point or per cell.

    ``data`` always has shape ``(n, kind.ncomponents)`` and is read-only.
    """

    kind: FieldKind
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data.reshape(-1, 1)
        if data.ndim != 2 or data.shape[1] != self.kind.ncomponents:
            raise InvalidDatasetError(
                f"{self.kind.name.lower()} field requires tuples of width "
                f"{self.kind.ncomponents}, got array of shape {data.shape}"
            )
        if not np.all(np.isfinite(data)):
            raise InvalidDatasetError("field contains non-finite values")
        data = data.copy()
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    def __len__(self) -> int:
        return self.data.shape[0]

    def as_array(self) -> np.ndarray:
        """Writable copy; scalars come back 1-D, wider kinds as (n, width)."""
        if self.kind is FieldKind.SCALAR:
            return self.data[:, 0].copy()
        return self.data.copy()


def field_from_array(values) -> Field:
    """Build a Field from an ``(n,)`` or ``(n, width)`` array."""
    values = np.asarray(values, dtype=float)
    width = 1 if values.ndim == 1 else values.shape[1]
    return Field(kind_for_width(width), values)


@dataclass
class RawDataset:
    """Faithful parse of one dataset file: geometry plus named fields.

    Invariants enforced at construction: all cell vertex indices are valid,
    every cell has at least three vertices, and each field has one tuple
    per point (point fields) or per cell (cell fields).
    """

    points: np.ndarray
    cells: list[np.ndarray]
    point_fields: dict[str, Field] = field(default_factory=dict)
    cell_fields: dict[str, Field] = field(default_factory=dict)
    source_kind: SourceKind = SourceKind.LEGACY_ASCII

    def __post_init__(self):
        points = np.asarray(self.points, dtype=float)
        if points.ndim != 2 or points.shape[1] != 3:
            raise InvalidDatasetError(
                f"points must be an (n, 3) array, got shape {points.shape}"
            )
        if not np.all(np.isfinite(points)):
            raise InvalidDatasetError("point coordinates contain non-finite values")
        points.flags.writeable = False
        self.points = points

        npts = len(points)
        cells = []
        for i, cell in enumerate(self.cells):
            cell = np.asarray(cell, dtype=np.int64)
            if cell.ndim != 1 or len(cell) < 3:
                raise InvalidDatasetError(f"cell {i} has fewer than 3 vertices")
            if cell.min() < 0 or cell.max() >= npts:
                raise InvalidDatasetError(
                    f"cell {i} references point index outside [0, {npts})"
                )
            cell.flags.writeable = False
            cells.append(cell)
        self.cells = cells

        for name, f in self.point_fields.items():
            if len(f) != npts:
                raise InvalidDatasetError(
                    f"point field '{name}' has {len(f)} tuples for {npts} points"
                )
        for name, f in self.cell_fields.items():
            if len(f) != len(cells):
                raise InvalidDatasetError(
                    f"cell field '{name}' has {len(f)} tuples for {len(cells)} cells"
                )

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_cells(self) -> int:
        return len(self.cells)
