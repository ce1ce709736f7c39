"""Parsing of VTK-family unstructured datasets into a neutral in-memory form."""

from __future__ import annotations

from pathlib import Path

from ..errors import DataIoError, UnknownExtensionError
from .dataset import Field, FieldKind, RawDataset, SourceKind, field_from_array
from .legacy import read_legacy, write_legacy_ascii
from .xml_vtu import read_xml_vtu

__all__ = [
    "Field",
    "FieldKind",
    "RawDataset",
    "SourceKind",
    "field_from_array",
    "read_dataset",
    "read_legacy",
    "read_xml_vtu",
    "write_legacy_ascii",
]

_READERS = {
    ".vtk": read_legacy,
    ".vtu": read_xml_vtu,
}


def read_dataset(path) -> RawDataset:
    """Parse a ``.vtk`` or ``.vtu`` file, chosen by extension."""
    path = Path(path)
    try:
        reader = _READERS[path.suffix.lower()]
    except KeyError:
        raise UnknownExtensionError(
            f"no reader for '{path.suffix or path.name}': expected .vtk or .vtu"
        ) from None
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise DataIoError(f"cannot read {path}: {exc}") from exc
    return reader(data)
