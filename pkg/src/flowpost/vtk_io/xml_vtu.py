"""Reader for VTK XML UnstructuredGrid (``.vtu``) files.

Handles DataArray formats ``ascii``, ``binary`` (inline base64 with a
leading byte-count header) and ``appended`` with raw or base64 encoding.
Compressed blocks are rejected explicitly. Each base64 block encodes
header and payload together; appended offsets address the encoded stream.
"""

from __future__ import annotations

import base64
import binascii
import re
import warnings
import xml.etree.ElementTree as ET

import numpy as np

from ..errors import (
    FlowpostWarning,
    MalformedXmlError,
    TruncatedPayloadError,
    UnsupportedCellTypeError,
    UnsupportedCompressionError,
)
from .dataset import Field, RawDataset, SourceKind, kind_for_width
from .legacy import PLANAR_CELL_TYPES

_VTU_DTYPES = {
    "Int8": "i1", "UInt8": "u1",
    "Int16": "i2", "UInt16": "u2",
    "Int32": "i4", "UInt32": "u4",
    "Int64": "i8", "UInt64": "u8",
    "Float32": "f4", "Float64": "f8",
}

_HEADER_TYPES = {"UInt32": "u4", "UInt64": "u8"}

_APPENDED_RAW_RE = re.compile(
    rb"<AppendedData[^>]*encoding\s*=\s*\"raw\"[^>]*>", re.DOTALL
)


def _b64_len(nbytes: int) -> int:
    return 4 * ((nbytes + 2) // 3)


def _b64_decode(text: str) -> bytes:
    try:
        return base64.b64decode(text, validate=False)
    except (binascii.Error, ValueError) as exc:
        raise MalformedXmlError(f"invalid base64 block: {exc}") from None


class _VtuDocument:
    """Parsed XML tree plus the out-of-band appended payload, if any."""

    def __init__(self, data: bytes):
        raw_match = _APPENDED_RAW_RE.search(data)
        self.raw_appended: bytes | None = None
        if raw_match is not None:
            end = data.find(b"</AppendedData>", raw_match.end())
            if end == -1:
                raise MalformedXmlError("unterminated AppendedData section",
                                        offset=raw_match.end())
            blob = data[raw_match.end():end]
            underscore = blob.find(b"_")
            if underscore == -1:
                raise MalformedXmlError("AppendedData has no leading underscore",
                                        offset=raw_match.end())
            self.raw_appended = blob[underscore + 1:]
            data = data[:raw_match.end()] + data[end:]
        try:
            self.root = ET.fromstring(data.decode("latin-1"))
        except ET.ParseError as exc:
            line, col = exc.position
            offset = 0
            for _ in range(line - 1):
                nl = data.find(b"\n", offset)
                if nl == -1:
                    break
                offset = nl + 1
            raise MalformedXmlError(str(exc), offset=offset + col) from None

        if self.root.tag != "VTKFile":
            raise MalformedXmlError(f"root element is '{self.root.tag}', "
                                    "expected 'VTKFile'")
        if self.root.get("type") != "UnstructuredGrid":
            raise MalformedXmlError(
                f"VTKFile type '{self.root.get('type')}' is not UnstructuredGrid"
            )
        compressor = self.root.get("compressor")
        if compressor:
            raise UnsupportedCompressionError(
                f"compressed data arrays ({compressor}) are not supported"
            )
        self.byte_order = "<" if self.root.get("byte_order",
                                               "LittleEndian") == "LittleEndian" else ">"
        header = self.root.get("header_type", "UInt32")
        if header not in _HEADER_TYPES:
            raise MalformedXmlError(f"unsupported header_type '{header}'")
        self.header_dtype = np.dtype(self.byte_order + _HEADER_TYPES[header])

        self.b64_appended: str | None = None
        appended = self.root.find("AppendedData")
        if appended is not None and self.raw_appended is None:
            if appended.get("encoding") != "base64":
                raise MalformedXmlError("AppendedData must be raw or base64")
            text = "".join((appended.text or "").split())
            if not text.startswith("_"):
                raise MalformedXmlError("AppendedData has no leading underscore")
            self.b64_appended = text[1:]

    def _decode_block_raw(self, payload: bytes, offset: int) -> bytes:
        hsize = self.header_dtype.itemsize
        if offset < 0 or offset + hsize > len(payload):
            raise TruncatedPayloadError(
                f"appended offset {offset} outside payload of {len(payload)} bytes"
            )
        nbytes = int(np.frombuffer(payload[offset:offset + hsize],
                                   self.header_dtype)[0])
        start = offset + hsize
        if start + nbytes > len(payload):
            raise TruncatedPayloadError(
                f"appended block of {nbytes} bytes exceeds payload"
            )
        return payload[start:start + nbytes]

    def _decode_block_b64(self, text: str, offset: int) -> bytes:
        hsize = self.header_dtype.itemsize
        head_chars = _b64_len(hsize)
        if offset < 0 or offset + head_chars > len(text):
            raise TruncatedPayloadError(
                f"appended offset {offset} outside encoded payload"
            )
        head = _b64_decode(text[offset:offset + head_chars])
        if len(head) < hsize:
            raise TruncatedPayloadError("appended block header incomplete")
        nbytes = int(np.frombuffer(head[:hsize], self.header_dtype)[0])
        total_chars = _b64_len(hsize + nbytes)
        block = _b64_decode(text[offset:offset + total_chars])
        if len(block) < hsize + nbytes:
            raise TruncatedPayloadError(
                f"appended block of {nbytes} bytes exceeds encoded payload"
            )
        return block[hsize:hsize + nbytes]

    def read_data_array(self, elem: ET.Element, expected: int | None = None)\
            -> np.ndarray:
        type_name = elem.get("type")
        if type_name not in _VTU_DTYPES:
            raise MalformedXmlError(f"unsupported DataArray type '{type_name}'")
        dtype = np.dtype(self.byte_order + _VTU_DTYPES[type_name])
        fmt = elem.get("format", "ascii")

        if fmt == "ascii":
            tokens = (elem.text or "").split()
            try:
                flat = np.array(tokens, dtype=float)
            except (ValueError, OverflowError):
                raise MalformedXmlError(
                    f"non-numeric token in DataArray '{elem.get('Name', '')}'"
                ) from None
            if dtype.kind in "iu":
                with np.errstate(invalid="ignore"):
                    flat = flat.astype(np.int64)
        elif fmt == "binary":
            decoded = _b64_decode("".join((elem.text or "").split()))
            hsize = self.header_dtype.itemsize
            if len(decoded) < hsize:
                raise TruncatedPayloadError("inline binary block shorter than header")
            nbytes = int(np.frombuffer(decoded[:hsize], self.header_dtype)[0])
            if hsize + nbytes > len(decoded):
                raise TruncatedPayloadError(
                    f"inline binary block declares {nbytes} bytes, "
                    f"{len(decoded) - hsize} available"
                )
            flat = np.frombuffer(decoded[hsize:hsize + nbytes], dtype=dtype)
        elif fmt == "appended":
            try:
                offset = int(elem.get("offset", ""))
            except (ValueError, OverflowError):
                raise MalformedXmlError("appended DataArray lacks a valid offset") \
                    from None
            if self.raw_appended is not None:
                block = self._decode_block_raw(self.raw_appended, offset)
            elif self.b64_appended is not None:
                block = self._decode_block_b64(self.b64_appended, offset)
            else:
                raise MalformedXmlError("appended DataArray without AppendedData")
            if len(block) % dtype.itemsize:
                raise TruncatedPayloadError(
                    "appended block size is not a multiple of the item size"
                )
            flat = np.frombuffer(block, dtype=dtype)
        else:
            raise MalformedXmlError(f"unsupported DataArray format '{fmt}'")

        if expected is not None and len(flat) != expected:
            raise TruncatedPayloadError(
                f"DataArray '{elem.get('Name', '')}' has {len(flat)} values, "
                f"expected {expected}"
            )
        return flat.astype(np.int64 if dtype.kind in "iu" else float)


def _int_attr(elem: ET.Element, name: str, default: str | None = None) -> int:
    try:
        return int(elem.get(name, "" if default is None else default))
    except (ValueError, OverflowError):
        raise MalformedXmlError(
            f"element '{elem.tag}' lacks a valid integer '{name}' attribute"
        ) from None


def _collect_fields(doc: _VtuDocument, parent: ET.Element | None, count: int,
                    where: str) -> dict[str, Field]:
    fields: dict[str, Field] = {}
    if parent is None:
        return fields
    for arr in parent.findall("DataArray"):
        name = arr.get("Name")
        if not name:
            raise MalformedXmlError(f"unnamed DataArray in {where} data")
        ncomp = _int_attr(arr, "NumberOfComponents", default="1")
        kind = kind_for_width(ncomp)
        flat = doc.read_data_array(arr, expected=count * ncomp)
        if name in fields:
            warnings.warn(
                f"duplicate {where} field '{name}': keeping the last occurrence",
                FlowpostWarning,
                stacklevel=3,
            )
        fields[name] = Field(kind, np.asarray(flat, dtype=float).reshape(count, ncomp))
    return fields


def read_xml_vtu(source) -> RawDataset:
    """Parse a ``.vtu`` byte stream into a :class:`RawDataset`."""
    data = source.read() if hasattr(source, "read") else bytes(source)
    doc = _VtuDocument(data)

    grid = doc.root.find("UnstructuredGrid")
    if grid is None:
        raise MalformedXmlError("no UnstructuredGrid element")
    pieces = grid.findall("Piece")
    if len(pieces) != 1:
        raise MalformedXmlError(f"expected exactly one Piece, found {len(pieces)}")
    piece = pieces[0]

    n_points = _int_attr(piece, "NumberOfPoints")
    n_cells = _int_attr(piece, "NumberOfCells")
    if n_points < 0 or n_cells < 0:
        raise MalformedXmlError("negative point or cell count")

    points_elem = piece.find("Points")
    if points_elem is None:
        raise MalformedXmlError("Piece has no Points element")
    point_arrays = points_elem.findall("DataArray")
    if len(point_arrays) != 1:
        raise MalformedXmlError("Points must hold exactly one DataArray")
    if _int_attr(point_arrays[0], "NumberOfComponents", default="3") != 3:
        raise MalformedXmlError("point coordinates must have 3 components")
    points = doc.read_data_array(point_arrays[0], expected=3 * n_points)
    points = np.asarray(points, dtype=float).reshape(n_points, 3)

    cells_elem = piece.find("Cells")
    cells: list[np.ndarray] = []
    if cells_elem is not None and n_cells > 0:
        arrays = {a.get("Name"): a for a in cells_elem.findall("DataArray")}
        for required in ("connectivity", "offsets", "types"):
            if required not in arrays:
                raise MalformedXmlError(f"Cells lacks the '{required}' array")
        offsets = doc.read_data_array(arrays["offsets"], expected=n_cells)
        types = doc.read_data_array(arrays["types"], expected=n_cells)
        connectivity = doc.read_data_array(arrays["connectivity"])

        prev = 0
        for i in range(n_cells):
            t = int(types[i])
            if t not in PLANAR_CELL_TYPES:
                raise UnsupportedCellTypeError(
                    f"cell type {t} is not a planar polygon"
                )
            end = int(offsets[i])
            if end < prev or end > len(connectivity):
                raise TruncatedPayloadError(
                    f"cell offsets are not monotone within the connectivity "
                    f"array (offset {end} after {prev})"
                )
            cells.append(np.asarray(connectivity[prev:end], dtype=np.int64))
            prev = end
        if prev != len(connectivity):
            raise TruncatedPayloadError(
                "connectivity array longer than the final cell offset"
            )
    elif n_cells > 0:
        raise MalformedXmlError("Piece declares cells but has no Cells element")

    point_fields = _collect_fields(doc, piece.find("PointData"), n_points, "point")
    cell_fields = _collect_fields(doc, piece.find("CellData"), n_cells, "cell")

    return RawDataset(
        points=points,
        cells=cells,
        point_fields=point_fields,
        cell_fields=cell_fields,
        source_kind=SourceKind.XML_VTU,
    )
