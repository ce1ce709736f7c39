"""Reader and writer for the legacy VTK file format.

Supports ASCII and BINARY encodings of DATASET POLYDATA (POLYGONS) and
DATASET UNSTRUCTURED_GRID restricted to planar cell types. BINARY numeric
payloads are big-endian regardless of host order, as the format requires.
"""

from __future__ import annotations

import warnings

import numpy as np

from ..errors import (
    FlowpostWarning,
    InvalidParameterError,
    MalformedHeaderError,
    TruncatedPayloadError,
    UnsupportedCellTypeError,
)
from .dataset import Field, FieldKind, RawDataset, SourceKind, kind_for_width

VTK_TRIANGLE = 5
VTK_POLYGON = 7
VTK_QUAD = 9

PLANAR_CELL_TYPES = frozenset({VTK_TRIANGLE, VTK_POLYGON, VTK_QUAD})

# Legacy type keywords -> big-endian numpy dtypes.
_LEGACY_DTYPES = {
    "unsigned_char": ">u1",
    "char": ">i1",
    "unsigned_short": ">u2",
    "short": ">i2",
    "unsigned_int": ">u4",
    "int": ">i4",
    "unsigned_long": ">u8",
    "long": ">i8",
    "float": ">f4",
    "double": ">f8",
}

# Sections of POLYDATA that carry non-polygonal topology; consumed and dropped.
_IGNORED_POLYDATA_SECTIONS = ("VERTICES", "LINES", "TRIANGLE_STRIPS")


class _Cursor:
    """Byte-wise reader mixing line-oriented headers with bulk payloads."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0
        self.line_start = 0
        self._tokens: list[str] = []  # leftovers from ASCII payload lines

    def eof(self) -> bool:
        return self.pos >= len(self.data) and not self._tokens

    def readline(self) -> str:
        self.line_start = self.pos
        end = self.data.find(b"\n", self.pos)
        if end == -1:
            line = self.data[self.pos:]
            self.pos = len(self.data)
        else:
            line = self.data[self.pos:end]
            self.pos = end + 1
        return line.decode("latin-1").rstrip("\r")

    def next_section_line(self) -> list[str] | None:
        """Next non-blank header line as tokens, or None at EOF."""
        if self._tokens:
            raise MalformedHeaderError(
                "trailing data after section payload", self.line_start
            )
        while not self.eof():
            parts = self.readline().split()
            if parts:
                return parts
        return None

    def read_ascii_numbers(self, count: int, conv=float) -> np.ndarray:
        out: list = []
        take = min(len(self._tokens), count)
        if take:
            chunk, self._tokens = self._tokens[:take], self._tokens[take:]
            out.extend(chunk)
        while len(out) < count:
            if self.pos >= len(self.data):
                raise TruncatedPayloadError(
                    f"expected {count} values, found {len(out)}", self.pos
                )
            toks = self.readline().split()
            missing = count - len(out)
            out.extend(toks[:missing])
            self._tokens = toks[missing:]
        try:
            return np.array([conv(t) for t in out],
                            dtype=float if conv is float else np.int64)
        except (ValueError, OverflowError):
            raise MalformedHeaderError(
                "invalid numeric token in data section", self.line_start
            ) from None

    def read_binary(self, count: int, dtype: str) -> np.ndarray:
        nbytes = count * np.dtype(dtype).itemsize
        if self.pos + nbytes > len(self.data):
            raise TruncatedPayloadError(
                f"binary payload of {nbytes} bytes exceeds remaining input",
                self.pos,
            )
        arr = np.frombuffer(self.data[self.pos:self.pos + nbytes], dtype=dtype)
        self.pos += nbytes
        return arr


def _to_int(token: str, cursor: _Cursor) -> int:
    try:
        return int(token)
    except ValueError:
        raise MalformedHeaderError(
            f"expected integer, got '{token}'", cursor.line_start
        ) from None


def _int_conv(tok: str) -> int:
    return int(float(tok)) if ("." in tok or "e" in tok or "E" in tok) else int(tok)


def _read_numbers(cursor: _Cursor, count: int, dtype: str, is_ascii: bool,
                  integer: bool = False) -> np.ndarray:
    if count < 0:
        raise MalformedHeaderError(f"negative count {count}", cursor.line_start)
    if is_ascii:
        return cursor.read_ascii_numbers(count, conv=_int_conv if integer else float)
    arr = cursor.read_binary(count, dtype)
    return arr.astype(np.int64 if integer else float)


def _split_prefixed_lists(flat: np.ndarray, n_declared: int,
                          cursor: _Cursor) -> list[np.ndarray]:
    """Decode the (count, v0, v1, ...) * n connectivity layout."""
    cells, i = [], 0
    for _ in range(n_declared):
        if i >= len(flat):
            raise TruncatedPayloadError(
                "connectivity list ended before declared cell count", cursor.pos
            )
        c = int(flat[i])
        if c < 0 or i + 1 + c > len(flat):
            raise TruncatedPayloadError(
                "cell vertex count overruns connectivity section", cursor.pos
            )
        cells.append(flat[i + 1:i + 1 + c].astype(np.int64))
        i += 1 + c
    if i != len(flat):
        raise MalformedHeaderError(
            "connectivity section longer than declared", cursor.line_start
        )
    return cells


def _dtype_for(keyword: str, cursor: _Cursor) -> str:
    try:
        return _LEGACY_DTYPES[keyword.lower()]
    except KeyError:
        raise MalformedHeaderError(
            f"unsupported data type '{keyword}'", cursor.line_start
        ) from None


def _skip_metadata(cursor: _Cursor):
    # METADATA blocks end at the first blank line.
    while cursor.pos < len(cursor.data):
        if not cursor.readline().strip():
            return


def _store_field(target: dict[str, Field], name: str, f: Field, where: str):
    if name in target:
        warnings.warn(
            f"duplicate {where} field '{name}': keeping the last occurrence",
            FlowpostWarning,
            stacklevel=3,
        )
    target[name] = f


def _read_attribute_block(cursor: _Cursor, parts: list[str], n_items: int,
                          target: dict[str, Field], where: str, is_ascii: bool):
    keyword = parts[0].upper()
    if keyword == "SCALARS":
        if len(parts) < 3:
            raise MalformedHeaderError("SCALARS needs a name and a type",
                                       cursor.line_start)
        name, dtype = parts[1], _dtype_for(parts[2], cursor)
        ncomp = _to_int(parts[3], cursor) if len(parts) > 3 else 1
        kind = kind_for_width(ncomp)
        # The LOOKUP_TABLE reference line is written by most tools; optional here.
        mark = (cursor.pos, cursor._tokens)
        nxt = cursor.readline().split() if not cursor._tokens else []
        if not (nxt and nxt[0].upper() == "LOOKUP_TABLE"):
            cursor.pos, cursor._tokens = mark
        data = _read_numbers(cursor, n_items * ncomp, dtype, is_ascii)
        _store_field(target, name, Field(kind, data.reshape(n_items, ncomp)), where)
    elif keyword in ("VECTORS", "NORMALS"):
        if len(parts) < 3:
            raise MalformedHeaderError(f"{keyword} needs a name and a type",
                                       cursor.line_start)
        name, dtype = parts[1], _dtype_for(parts[2], cursor)
        data = _read_numbers(cursor, n_items * 3, dtype, is_ascii)
        _store_field(target, name, Field(FieldKind.VECTOR, data.reshape(n_items, 3)),
                     where)
    elif keyword == "TENSORS":
        if len(parts) < 3:
            raise MalformedHeaderError("TENSORS needs a name and a type",
                                       cursor.line_start)
        name, dtype = parts[1], _dtype_for(parts[2], cursor)
        data = _read_numbers(cursor, n_items * 9, dtype, is_ascii)
        _store_field(target, name, Field(FieldKind.TENSOR, data.reshape(n_items, 9)),
                     where)
    elif keyword == "FIELD":
        if len(parts) < 3:
            raise MalformedHeaderError("FIELD needs a name and an array count",
                                       cursor.line_start)
        n_arrays = _to_int(parts[2], cursor)
        if n_arrays < 0:
            raise MalformedHeaderError("negative FIELD array count",
                                       cursor.line_start)
        for _ in range(n_arrays):
            sub = cursor.next_section_line()
            if sub is None:
                raise TruncatedPayloadError("FIELD ended early", cursor.pos)
            if len(sub) < 4:
                raise MalformedHeaderError("FIELD array needs name, "
                                           "components, tuples and type",
                                           cursor.line_start)
            name = sub[0]
            ncomp = _to_int(sub[1], cursor)
            ntuples = _to_int(sub[2], cursor)
            dtype = _dtype_for(sub[3], cursor)
            kind = kind_for_width(ncomp)
            if ntuples != n_items:
                raise MalformedHeaderError(
                    f"FIELD array '{name}' has {ntuples} tuples, expected {n_items}",
                    cursor.line_start,
                )
            data = _read_numbers(cursor, ntuples * ncomp, dtype, is_ascii)
            _store_field(target, name, Field(kind, data.reshape(ntuples, ncomp)),
                         where)
    elif keyword == "METADATA":
        _skip_metadata(cursor)
    else:
        raise MalformedHeaderError(
            f"unsupported attribute section '{keyword}'", cursor.line_start
        )


def read_legacy(source) -> RawDataset:
    """Parse a legacy ``.vtk`` byte stream into a :class:`RawDataset`."""
    data = source.read() if hasattr(source, "read") else bytes(source)
    cursor = _Cursor(data)

    header = cursor.readline()
    if not header.lower().startswith("# vtk datafile version"):
        raise MalformedHeaderError("missing '# vtk DataFile Version' header", 0)
    cursor.readline()  # title, free text

    enc_line = cursor.readline().strip().upper()
    if enc_line == "ASCII":
        is_ascii = True
    elif enc_line == "BINARY":
        is_ascii = False
    else:
        raise MalformedHeaderError(
            f"expected ASCII or BINARY, got '{enc_line}'", cursor.line_start
        )

    dataset_parts = cursor.next_section_line()
    if not dataset_parts or dataset_parts[0].upper() != "DATASET" or len(dataset_parts) < 2:
        raise MalformedHeaderError("expected DATASET line", cursor.line_start)
    dataset_type = dataset_parts[1].upper()
    if dataset_type not in ("POLYDATA", "UNSTRUCTURED_GRID"):
        raise MalformedHeaderError(
            f"unsupported DATASET kind '{dataset_type}'", cursor.line_start
        )

    points: np.ndarray | None = None
    cells: list[np.ndarray] | None = None
    cell_types: np.ndarray | None = None
    point_fields: dict[str, Field] = {}
    cell_fields: dict[str, Field] = {}
    active: dict[str, Field] | None = None
    active_name = ""
    n_active = 0

    while True:
        parts = cursor.next_section_line()
        if parts is None:
            break
        keyword = parts[0].upper()

        if keyword == "POINTS":
            if len(parts) < 3:
                raise MalformedHeaderError("POINTS needs a count and a type",
                                           cursor.line_start)
            n = _to_int(parts[1], cursor)
            dtype = _dtype_for(parts[2], cursor)
            points = _read_numbers(cursor, n * 3, dtype, is_ascii).reshape(n, 3)
        elif keyword == "POLYGONS" and dataset_type == "POLYDATA":
            n, size = _to_int(parts[1], cursor), _to_int(parts[2], cursor)
            flat = _read_numbers(cursor, size, ">i4", is_ascii, integer=True)
            cells = _split_prefixed_lists(flat, n, cursor)
        elif keyword in _IGNORED_POLYDATA_SECTIONS and dataset_type == "POLYDATA":
            n, size = _to_int(parts[1], cursor), _to_int(parts[2], cursor)
            _read_numbers(cursor, size, ">i4", is_ascii, integer=True)
            warnings.warn(
                f"ignoring {keyword} section ({n} entries): only polygonal "
                "cells are used",
                FlowpostWarning,
                stacklevel=2,
            )
        elif keyword == "CELLS" and dataset_type == "UNSTRUCTURED_GRID":
            n, size = _to_int(parts[1], cursor), _to_int(parts[2], cursor)
            flat = _read_numbers(cursor, size, ">i4", is_ascii, integer=True)
            cells = _split_prefixed_lists(flat, n, cursor)
        elif keyword == "CELL_TYPES" and dataset_type == "UNSTRUCTURED_GRID":
            n = _to_int(parts[1], cursor)
            cell_types = _read_numbers(cursor, n, ">i4", is_ascii, integer=True)
        elif keyword == "POINT_DATA":
            n_active = _to_int(parts[1], cursor)
            active, active_name = point_fields, "point"
            if points is not None and n_active != len(points):
                raise MalformedHeaderError(
                    f"POINT_DATA count {n_active} != number of points {len(points)}",
                    cursor.line_start,
                )
        elif keyword == "CELL_DATA":
            n_active = _to_int(parts[1], cursor)
            active, active_name = cell_fields, "cell"
        elif keyword == "METADATA":
            _skip_metadata(cursor)
        elif keyword == "FIELD" and active is None:
            # Global field data (e.g. solver time stamps): consumed, not kept.
            scratch: dict[str, Field] = {}
            n_arrays = _to_int(parts[2], cursor) if len(parts) > 2 else 0
            for _ in range(n_arrays):
                sub = cursor.next_section_line()
                if sub is None or len(sub) < 4:
                    raise MalformedHeaderError("malformed global FIELD array",
                                               cursor.line_start)
                ncomp, ntuples = _to_int(sub[1], cursor), _to_int(sub[2], cursor)
                dtype = _dtype_for(sub[3], cursor)
                _read_numbers(cursor, ncomp * ntuples, dtype, is_ascii)
            warnings.warn("ignoring global FIELD data", FlowpostWarning,
                          stacklevel=2)
        elif active is not None:
            _read_attribute_block(cursor, parts, n_active, active, active_name,
                                  is_ascii)
        else:
            raise MalformedHeaderError(
                f"unexpected section '{keyword}'", cursor.line_start
            )

    if points is None:
        raise MalformedHeaderError("file has no POINTS section", cursor.pos)
    if cells is None:
        cells = []

    if dataset_type == "UNSTRUCTURED_GRID":
        if cell_types is None and cells:
            raise MalformedHeaderError("CELLS without CELL_TYPES", cursor.pos)
        if cell_types is not None:
            if len(cell_types) != len(cells):
                raise MalformedHeaderError(
                    f"{len(cell_types)} CELL_TYPES for {len(cells)} cells",
                    cursor.pos,
                )
            for t, cell in zip(cell_types, cells):
                if int(t) not in PLANAR_CELL_TYPES:
                    raise UnsupportedCellTypeError(
                        f"cell type {int(t)} is not a planar polygon", cursor.pos
                    )
                if t == VTK_TRIANGLE and len(cell) != 3 or t == VTK_QUAD and len(cell) != 4:
                    raise MalformedHeaderError(
                        f"cell type {int(t)} with {len(cell)} vertices", cursor.pos
                    )

    for cell in cells:
        if len(cell) < 3:
            raise UnsupportedCellTypeError(
                f"polygon with {len(cell)} vertices", cursor.pos
            )

    if point_fields:
        for name, f in point_fields.items():
            if len(f) != len(points):
                raise MalformedHeaderError(
                    f"point field '{name}' size mismatch", cursor.pos
                )

    return RawDataset(
        points=points,
        cells=cells,
        point_fields=point_fields,
        cell_fields=cell_fields,
        source_kind=SourceKind.LEGACY_ASCII if is_ascii else SourceKind.LEGACY_BINARY,
    )


def _fmt(v: float) -> str:
    # repr gives the shortest decimal that round-trips exactly, which more
    # than satisfies the 9-significant-digit contract.
    return repr(float(v))


def write_legacy_ascii(dataset: RawDataset, path) -> None:
    """Write ``dataset`` as legacy ASCII POLYDATA. Round-trips exactly."""
    for name in list(dataset.point_fields) + list(dataset.cell_fields):
        if any(ch.isspace() for ch in name):
            raise InvalidParameterError(
                f"field name {name!r} contains whitespace and cannot be "
                "stored in the legacy format"
            )
    lines = [
        "# vtk DataFile Version 3.0",
        "flowpost output",
        "ASCII",
        "DATASET POLYDATA",
        f"POINTS {dataset.n_points} double",
    ]
    for p in dataset.points:
        lines.append(" ".join(_fmt(c) for c in p))
    size = sum(len(c) + 1 for c in dataset.cells)
    lines.append(f"POLYGONS {dataset.n_cells} {size}")
    for cell in dataset.cells:
        lines.append(" ".join([str(len(cell))] + [str(int(i)) for i in cell]))

    def field_block(count: int, section: str, fields: dict[str, Field]):
        lines.append(f"{section} {count}")
        lines.append(f"FIELD {section.title().replace('_', '')} {len(fields)}")
        for name, f in fields.items():
            ncomp = f.kind.ncomponents
            lines.append(f"{name} {ncomp} {count} double")
            for row in f.data:
                lines.append(" ".join(_fmt(v) for v in row))

    if dataset.cell_fields:
        field_block(dataset.n_cells, "CELL_DATA", dataset.cell_fields)
    if dataset.point_fields:
        field_block(dataset.n_points, "POINT_DATA", dataset.point_fields)

    from ..errors import DataIoError

    try:
        with open(path, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise DataIoError(f"cannot write {path}: {exc}") from exc
