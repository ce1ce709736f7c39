"""Exception hierarchy and warning category.

Every failure mode of the package raises a subclass of :class:`FlowpostError`,
so callers (including the CLI) can distinguish bad input from genuine bugs.
"""


class FlowpostError(Exception):
    """Base class for all errors raised by flowpost."""


class FlowpostWarning(UserWarning):
    """Category for non-fatal diagnostics (ignored sections, name clashes)."""


# ---------------------------------------------------------------------------
# File parsing / writing

class VtkIoError(FlowpostError):
    """A dataset file could not be parsed.

    ``offset`` is the byte position in the input at which the problem was
    detected, when known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class UnknownExtensionError(VtkIoError):
    """File extension does not map to any reader."""


class MalformedHeaderError(VtkIoError):
    """A header or section keyword line violates the format grammar."""


class TruncatedPayloadError(VtkIoError):
    """Declared element counts exceed the data actually present."""


class UnsupportedCellTypeError(VtkIoError):
    """The file contains a non-planar (volumetric or sub-dimensional) cell."""


class MalformedXmlError(VtkIoError):
    """The XML document is not well-formed or not a VTK unstructured grid."""


class UnsupportedCompressionError(VtkIoError):
    """Compressed data blocks are out of scope and rejected explicitly."""


class InvalidDatasetError(VtkIoError):
    """Parsed content violates a dataset invariant (bad index, non-finite value)."""


class DataIoError(FlowpostError):
    """Reading or writing a file failed at the OS level."""


# ---------------------------------------------------------------------------
# Mesh construction and queries

class MeshError(FlowpostError):
    """Base class for mesh construction failures."""


class NotPlanarError(MeshError):
    """Points deviate from a common plane by more than the tolerance."""


class NonManifoldEdgeError(MeshError):
    """An edge is shared by more than two cells."""


class DegenerateCellError(MeshError):
    """A cell has (near-)zero area."""


class SizeMismatchError(FlowpostError):
    """A per-point or per-cell array has the wrong length."""


# ---------------------------------------------------------------------------
# Case / extraction / plotting

class UnknownFieldError(FlowpostError):
    """Requested field name is not present in the case."""


class UnknownBoundaryError(FlowpostError):
    """Requested boundary name is not present in the case."""


class SidecarError(FlowpostError):
    """The boundary-name sidecar file is present but invalid."""


class ComponentIndexError(FlowpostError, IndexError):
    """Component index exceeds the field's component count."""


class NoIntersectionError(FlowpostError):
    """A probe line does not intersect the mesh at all."""


class InvalidParameterError(FlowpostError, ValueError):
    """An argument violates an operation's precondition."""


class EmptyProfileError(FlowpostError):
    """A profile with no samples cannot be drawn."""


class StaleHandleError(FlowpostError):
    """A layer handle does not refer to a live layer of the given figure."""


# ---------------------------------------------------------------------------
# CLI

class SpecError(FlowpostError):
    """A plot-spec document is invalid.

    ``pointer`` is a JSON pointer to the offending key.
    """

    def __init__(self, message, pointer=""):
        super().__init__(f"{message} [at {pointer or '/'}]")
        self.pointer = pointer


class NoMatchesError(FlowpostError):
    """A batch glob pattern matched no files."""
