"""Independent encoders for the VTK format family.

These serializers are written from the format grammar alone and share no
code with the package readers or writer, so parse results can be checked
against them as cross-encoding oracles.
"""

from __future__ import annotations

import base64
import struct

import numpy as np


def _fmt(v) -> str:
    return repr(float(v))


def _cell_type(cell) -> int:
    return {3: 5, 4: 9}.get(len(cell), 7)


def encode_legacy_ascii(points, cells, point_fields=None, cell_fields=None,
                        dataset_kind="POLYDATA") -> bytes:
    """Legacy ASCII, using SCALARS/VECTORS/TENSORS attribute sections."""
    lines = [
        "# vtk DataFile Version 3.0",
        "oracle fixture",
        "ASCII",
        f"DATASET {dataset_kind}",
        f"POINTS {len(points)} double",
    ]
    lines += [" ".join(_fmt(v) for v in p) for p in points]
    flat = [tok for c in cells for tok in [len(c), *map(int, c)]]
    section = "POLYGONS" if dataset_kind == "POLYDATA" else "CELLS"
    lines.append(f"{section} {len(cells)} {len(flat)}")
    lines += [" ".join([str(len(c))] + [str(int(i)) for i in c]) for c in cells]
    if dataset_kind == "UNSTRUCTURED_GRID":
        lines.append(f"CELL_TYPES {len(cells)}")
        lines += [str(_cell_type(c)) for c in cells]

    def attr_lines(fields, count, label):
        out = [f"{label} {count}"]
        for name, data in fields.items():
            data = np.asarray(data, dtype=float)
            width = data.shape[1]
            if width == 1:
                out.append(f"SCALARS {name} double 1")
                out.append("LOOKUP_TABLE default")
            elif width == 3:
                out.append(f"VECTORS {name} double")
            else:
                out.append(f"TENSORS {name} double")
            out += [" ".join(_fmt(v) for v in row) for row in data]
        return out

    if cell_fields:
        lines += attr_lines(cell_fields, len(cells), "CELL_DATA")
    if point_fields:
        lines += attr_lines(point_fields, len(points), "POINT_DATA")
    return ("\n".join(lines) + "\n").encode()


def encode_legacy_binary(points, cells, point_fields=None, cell_fields=None,
                         endian=">") -> bytes:
    """Legacy BINARY; the conforming byte order is big-endian."""
    out = [
        b"# vtk DataFile Version 3.0\n",
        b"oracle fixture\n",
        b"BINARY\n",
        b"DATASET POLYDATA\n",
        f"POINTS {len(points)} double\n".encode(),
        np.asarray(points, dtype=f"{endian}f8").tobytes(),
        b"\n",
    ]
    flat = [tok for c in cells for tok in [len(c), *map(int, c)]]
    out.append(f"POLYGONS {len(cells)} {len(flat)}\n".encode())
    out.append(np.array(flat, dtype=f"{endian}i4").tobytes())
    out.append(b"\n")

    def attr_bytes(fields, count, label):
        chunk = [f"{label} {count}\n".encode(),
                 f"FIELD FieldData {len(fields)}\n".encode()]
        for name, data in fields.items():
            data = np.asarray(data, dtype=float)
            chunk.append(f"{name} {data.shape[1]} {count} double\n".encode())
            chunk.append(data.astype(f"{endian}f8").tobytes())
            chunk.append(b"\n")
        return chunk

    if cell_fields:
        out += attr_bytes(cell_fields, len(cells), "CELL_DATA")
    if point_fields:
        out += attr_bytes(point_fields, len(points), "POINT_DATA")
    return b"".join(out)


def _vtu_header(n_points, n_cells, body, appended=b"", encoding=None,
                header_type="UInt32") -> bytes:
    enc = f' header_type="{header_type}"'
    doc = (
        '<?xml version="1.0"?>\n'
        f'<VTKFile type="UnstructuredGrid" version="0.1" '
        f'byte_order="LittleEndian"{enc}>\n'
        "<UnstructuredGrid>"
        f'<Piece NumberOfPoints="{n_points}" NumberOfCells="{n_cells}">\n'
        f"{body}\n"
        "</Piece></UnstructuredGrid>\n"
    ).encode()
    if encoding is not None:
        doc += f'<AppendedData encoding="{encoding}">_'.encode()
        doc += appended
        doc += b"</AppendedData>\n"
    return doc + b"</VTKFile>\n"


def _cells_meta(cells):
    conn = np.concatenate([np.asarray(c) for c in cells]) if cells \
        else np.zeros(0, dtype=np.int64)
    offsets = np.cumsum([len(c) for c in cells]).astype(np.int64)
    types = np.array([_cell_type(c) for c in cells], dtype=np.uint8)
    return conn.astype(np.int64), offsets, types


def encode_vtu_ascii(points, cells, point_fields=None,
                     cell_fields=None) -> bytes:
    def da(values, typ, name=None, ncomp=None):
        n = f' Name="{name}"' if name else ""
        c = f' NumberOfComponents="{ncomp}"' if ncomp else ""
        if typ.startswith("Float"):
            text = " ".join(_fmt(v) for v in np.asarray(values).ravel())
        else:
            text = " ".join(str(int(v)) for v in np.asarray(values).ravel())
        return f'<DataArray type="{typ}"{n}{c} format="ascii">{text}</DataArray>'

    conn, offsets, types = _cells_meta(cells)
    body = [
        "<Points>", da(points, "Float64", ncomp=3), "</Points>",
        "<Cells>",
        da(conn, "Int64", "connectivity"),
        da(offsets, "Int64", "offsets"),
        da(types, "UInt8", "types"),
        "</Cells>",
        "<PointData>",
        *(da(v, "Float64", k, np.asarray(v).shape[1])
          for k, v in (point_fields or {}).items()),
        "</PointData>",
        "<CellData>",
        *(da(v, "Float64", k, np.asarray(v).shape[1])
          for k, v in (cell_fields or {}).items()),
        "</CellData>",
    ]
    return _vtu_header(len(points), len(cells), "\n".join(body))


def _block(payload: bytes, header_type="UInt32") -> bytes:
    code = "<I" if header_type == "UInt32" else "<Q"
    return struct.pack(code, len(payload)) + payload


def encode_vtu_inline_binary(points, cells, point_fields=None,
                             cell_fields=None, header_type="UInt32") -> bytes:
    def da(arr, typ, name=None, ncomp=None):
        n = f' Name="{name}"' if name else ""
        c = f' NumberOfComponents="{ncomp}"' if ncomp else ""
        enc = base64.b64encode(_block(arr.tobytes(), header_type)).decode()
        return f'<DataArray type="{typ}"{n}{c} format="binary">{enc}</DataArray>'

    conn, offsets, types = _cells_meta(cells)
    body = [
        "<Points>",
        da(np.asarray(points, dtype="<f8"), "Float64", ncomp=3),
        "</Points>",
        "<Cells>",
        da(conn.astype("<i8"), "Int64", "connectivity"),
        da(offsets.astype("<i8"), "Int64", "offsets"),
        da(types.astype("<u1"), "UInt8", "types"),
        "</Cells>",
        "<PointData>",
        *(da(np.asarray(v, dtype="<f8"), "Float64", k, np.asarray(v).shape[1])
          for k, v in (point_fields or {}).items()),
        "</PointData>",
        "<CellData>",
        *(da(np.asarray(v, dtype="<f8"), "Float64", k, np.asarray(v).shape[1])
          for k, v in (cell_fields or {}).items()),
        "</CellData>",
    ]
    return _vtu_header(len(points), len(cells), "\n".join(body),
                       header_type=header_type)


def encode_vtu_appended(points, cells, point_fields=None, cell_fields=None,
                        encoding="raw", header_type="UInt32") -> bytes:
    blocks: list[bytes] = []
    offset = 0

    def da(arr, typ, name=None, ncomp=None):
        nonlocal offset
        blob = _block(arr.tobytes(), header_type)
        if encoding == "base64":
            blob = base64.b64encode(blob)
        blocks.append(blob)
        n = f' Name="{name}"' if name else ""
        c = f' NumberOfComponents="{ncomp}"' if ncomp else ""
        tag = (f'<DataArray type="{typ}"{n}{c} format="appended" '
               f'offset="{offset}"/>')
        offset += len(blob)
        return tag

    conn, offsets, types = _cells_meta(cells)
    body = [
        "<Points>",
        da(np.asarray(points, dtype="<f8"), "Float64", ncomp=3),
        "</Points>",
        "<Cells>",
        da(conn.astype("<i8"), "Int64", "connectivity"),
        da(offsets.astype("<i8"), "Int64", "offsets"),
        da(types.astype("<u1"), "UInt8", "types"),
        "</Cells>",
        "<PointData>",
        *(da(np.asarray(v, dtype="<f8"), "Float64", k, np.asarray(v).shape[1])
          for k, v in (point_fields or {}).items()),
        "</PointData>",
        "<CellData>",
        *(da(np.asarray(v, dtype="<f8"), "Float64", k, np.asarray(v).shape[1])
          for k, v in (cell_fields or {}).items()),
        "</CellData>",
    ]
    return _vtu_header(len(points), len(cells), "\n".join(body),
                       appended=b"".join(blocks), encoding=encoding,
                       header_type=header_type)
