"""flowpost: reproducible post-processing of planar 2D CFD datasets.

Parses legacy ``.vtk`` and XML ``.vtu`` unstructured files, exposes the
data through a :class:`~flowpost.case.Case` facade over a validated
polygonal mesh, and provides data-extraction and SVG plotting routines.
"""

from .case import Case, boundary_cell_ids, component, get_field, open_case
from .errors import FlowpostError, FlowpostWarning
from .extract import (
    PlaneSample,
    Profile,
    dist,
    normals,
    profile_along_line,
    sample_by_plane,
    tangents,
)
from .plot import (
    ColorMap,
    Figure,
    add_colorbar,
    add_label,
    get_colormap,
    overlay_profile,
    plot_boundaries,
    plot_field,
    plot_streamlines,
    plot_vectors,
    render_svg,
)
from .polymesh import (
    BoundaryLoop,
    PolyMesh,
    boundary_loops,
    build_mesh,
    cell_areas,
    cell_centres,
    locate_cell,
    point_to_cell,
)
from .vtk_io import (
    Field,
    FieldKind,
    RawDataset,
    SourceKind,
    read_dataset,
    read_legacy,
    read_xml_vtu,
    write_legacy_ascii,
)

__version__ = "0.1.0"

__all__ = [
    "BoundaryLoop",
    "Case",
    "ColorMap",
    "Field",
    "FieldKind",
    "Figure",
    "FlowpostError",
    "FlowpostWarning",
    "PlaneSample",
    "PolyMesh",
    "Profile",
    "RawDataset",
    "SourceKind",
    "add_colorbar",
    "add_label",
    "boundary_cell_ids",
    "boundary_loops",
    "build_mesh",
    "cell_areas",
    "cell_centres",
    "component",
    "dist",
    "get_colormap",
    "get_field",
    "locate_cell",
    "normals",
    "open_case",
    "overlay_profile",
    "plot_boundaries",
    "plot_field",
    "plot_streamlines",
    "plot_vectors",
    "point_to_cell",
    "profile_along_line",
    "read_dataset",
    "read_legacy",
    "read_xml_vtu",
    "render_svg",
    "sample_by_plane",
    "tangents",
    "write_legacy_ascii",
    "__version__",
]
