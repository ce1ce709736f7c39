"""Command-line interface: info, plot, profile, sample, batch.

Figures are described by declarative JSON plot-specs (schema shipped as
``plotspec.schema.json``); identical spec plus dataset yields
byte-identical SVG output. Exit codes: 0 success, 1 input or spec error,
2 internal error.
"""

from __future__ import annotations

import argparse
import glob
import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from .case import Case, component, open_case
from .errors import (
    FlowpostError,
    InvalidParameterError,
    NoMatchesError,
    SpecError,
)
from .extract import Profile, profile_along_line, sample_by_plane
from .plot import (
    Figure,
    add_colorbar,
    add_label,
    colormap_names,
    overlay_profile,
    plot_boundaries,
    plot_field,
    plot_streamlines,
    plot_vectors,
    render_svg,
)
from .vtk_io.dataset import FieldKind

CSV_FMT = ".9g"


def _load_schema() -> dict:
    text = resources.files("flowpost").joinpath("plotspec.schema.json").read_text()
    return json.loads(text)


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path)


def load_plotspec(path: Path) -> dict:
    """Parse and structurally validate a plot-spec file."""
    try:
        spec = json.loads(path.read_text())
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc}")
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec is not valid JSON: {exc}")
    validator = jsonschema.Draft7Validator(_load_schema())
    errors = sorted(validator.iter_errors(spec), key=lambda e: list(e.absolute_path))
    if errors:
        best = jsonschema.exceptions.best_match(errors)
        raise SpecError(best.message, _pointer(best.absolute_path))
    return spec


def _check_scalar_source(case: Case, layer: dict, ptr: str) -> None:
    f = case.field(layer["field"])
    comp = layer.get("component")
    if comp is None and f.kind is not FieldKind.SCALAR:
        raise SpecError(
            f"field '{layer['field']}' is a {f.kind.name.lower()}; "
            "set 'component'",
            f"{ptr}/component",
        )
    if comp is not None and comp >= f.kind.ncomponents:
        raise SpecError(
            f"component {comp} out of range for "
            f"{f.kind.name.lower()} field '{layer['field']}'",
            f"{ptr}/component",
        )


def validate_spec_against_case(spec: dict, case: Case) -> None:
    """Reject any reference to a field/component the dataset lacks."""
    known_ramps = set(colormap_names())
    for i, layer in enumerate(spec["layers"]):
        ptr = f"/layers/{i}"
        kind = layer["type"]
        if kind in ("field", "vectors", "streamlines", "profile"):
            if layer["field"] not in case:
                available = ", ".join(case.field_names) or "none"
                raise SpecError(
                    f"unknown field '{layer['field']}' "
                    f"(available: {available})",
                    f"{ptr}/field",
                )
        if kind in ("field", "profile"):
            _check_scalar_source(case, layer, ptr)
        if kind in ("vectors", "streamlines"):
            f = case.field(layer["field"])
            if f.kind is FieldKind.SCALAR:
                raise SpecError(
                    f"field '{layer['field']}' is scalar; "
                    f"'{kind}' needs a vector field",
                    f"{ptr}/field",
                )
        if kind == "field":
            rng = layer.get("range")
            if rng is not None and not rng[0] < rng[1]:
                raise SpecError("range must satisfy lo < hi", f"{ptr}/range")
            ramp = layer.get("colormap")
            if ramp is not None and ramp not in known_ramps:
                raise SpecError(
                    f"unknown colormap '{ramp}' "
                    f"(available: {', '.join(sorted(known_ramps))})",
                    f"{ptr}/colormap",
                )
        if kind == "vectors":
            if ("sample_nx" in layer) != ("sample_ny" in layer):
                raise SpecError(
                    "sample_nx and sample_ny must be given together",
                    f"{ptr}/sample_nx",
                )
        if kind == "profile" and list(layer["p1"]) == list(layer["p2"]):
            raise SpecError("p1 and p2 must differ", f"{ptr}/p2")


def _scalar_from_layer(case: Case, layer: dict) -> np.ndarray:
    values = case.field(layer["field"])
    comp = layer.get("component")
    if comp is None:
        comp = 0
    return component(values, comp).data[:, 0]


def execute_plotspec(spec: dict, case: Case, output: Path) -> None:
    """Run a validated spec's layers against the plot API and render."""
    sx = float(spec.get("scale_x", 1.0))
    sy = float(spec.get("scale_y", 1.0))
    fig = Figure()
    fig.xlabel = spec.get("xlabel", "")
    fig.ylabel = spec.get("ylabel", "")

    for layer in spec["layers"]:
        kind = layer["type"]
        style = {k: layer[k] for k in ("color", "width") if k in layer}
        if kind == "boundaries":
            plot_boundaries(fig, case, sx, sy, **style)
        elif kind == "field":
            handle = plot_field(
                fig, case, _scalar_from_layer(case, layer), sx, sy,
                colormap=layer.get("colormap"),
                value_range=tuple(layer["range"]) if "range" in layer else None,
            )
            if "colorbar" in layer:
                add_colorbar(fig, handle, label=layer["colorbar"].get("label"))
        elif kind == "vectors":
            plot_vectors(
                fig, case, case.field(layer["field"]), sx, sy,
                sample_nx=layer.get("sample_nx"),
                sample_ny=layer.get("sample_ny"),
                normalize=bool(layer.get("normalize", False)),
                **{k: v for k, v in style.items() if k == "color"},
            )
        elif kind == "streamlines":
            plot_streamlines(
                fig, case, case.field(layer["field"]), layer["seeds"], sx, sy,
                step=layer.get("step"),
                max_steps=int(layer.get("max_steps", 10000)),
                **style,
            )
        elif kind == "profile":
            prof = profile_along_line(case, layer["p1"], layer["p2"],
                                      layer["field"])
            comp = layer.get("component", 0)
            scalar = Profile(
                positions=prof.positions.copy(),
                values=prof.values[:, comp:comp + 1].copy(),
                cells=prof.cells.copy(),
            )
            overlay_profile(fig, scalar, float(layer["anchor_x"]),
                            float(layer["width_scale"]), sx, sy, **style)
        elif kind == "text":
            add_label(fig, float(layer["x"]), float(layer["y"]), layer["text"],
                      sx, sy, size=float(layer.get("size", 12.0)),
                      anchor=layer.get("anchor", "middle"))
    render_svg(fig, output)


def _field_kind_name(kind: FieldKind) -> str:
    return kind.name.lower()


def cmd_info(args) -> int:
    case = open_case(args.dataset)
    xmin, xmax, ymin, ymax = case.bounds
    out = [
        f"points: {case.mesh.n_points}",
        f"cells: {case.mesh.n_cells}",
        f"bounds: x [{xmin:{CSV_FMT}}, {xmax:{CSV_FMT}}]"
        f"  y [{ymin:{CSV_FMT}}, {ymax:{CSV_FMT}}]",
        "fields:",
    ]
    for name in case.field_names:
        out.append(f"  {name}: {_field_kind_name(case.field(name).kind)}")
    out.append("boundaries:")
    for loop in case.boundaries:
        out.append(f"  {loop.name}: {loop.n_edges} edges")
    print("\n".join(out))
    return 0


def cmd_plot(args) -> int:
    spec_path = Path(args.spec)
    spec = load_plotspec(spec_path)
    if "dataset" not in spec:
        raise SpecError("spec must name a dataset", "/dataset")
    base = spec_path.parent
    case = open_case(base / spec["dataset"])
    validate_spec_against_case(spec, case)
    output = base / spec["output"]
    execute_plotspec(spec, case, output)
    if not args.quiet:
        print(f"wrote {output}")
    return 0


def _parse_point(text: str, name: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise InvalidParameterError(f"{name} must be 'x,y', got '{text}'")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise InvalidParameterError(
            f"{name} must be numeric 'x,y', got '{text}'"
        ) from None


def _component_headers(name: str, width: int) -> list[str]:
    if width == 1:
        return [name]
    return [f"{name}_{k}" for k in range(width)]


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(row) for row in rows)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def cmd_profile(args) -> int:
    case = open_case(args.dataset)
    p1 = _parse_point(args.p1, "p1")
    p2 = _parse_point(args.p2, "p2")
    if p1 == p2:
        raise InvalidParameterError("profile endpoints coincide")
    prof = profile_along_line(case, p1, p2, args.field)
    width = prof.values.shape[1]
    header = ["position"] + _component_headers(args.field, width)
    rows = (
        [f"{pos:{CSV_FMT}}"] + [f"{v:{CSV_FMT}}" for v in vals]
        for pos, vals in zip(prof.positions, prof.values)
    )
    _write_csv(Path(args.out), header, rows)
    if not args.quiet:
        print(f"wrote {args.out} ({len(prof)} samples)")
    return 0


def cmd_sample(args) -> int:
    case = open_case(args.dataset)
    sample = sample_by_plane(case, args.nx, args.ny, args.field)
    width = sample.values.shape[2]
    header = ["x", "y", "mask"] + _component_headers(args.field, width)

    def rows():
        for j, y in enumerate(sample.grid_y):
            for i, x in enumerate(sample.grid_x):
                row = [f"{x:{CSV_FMT}}", f"{y:{CSV_FMT}}",
                       "1" if sample.mask[j, i] else "0"]
                row.extend(f"{v:{CSV_FMT}}" for v in sample.values[j, i])
                yield row

    _write_csv(Path(args.out), header, rows())
    if not args.quiet:
        print(f"wrote {args.out} ({args.nx * args.ny} grid points)")
    return 0


def cmd_batch(args) -> int:
    spec_path = Path(args.spec)
    spec = load_plotspec(spec_path)
    if "{stem}" not in spec["output"]:
        raise SpecError("batch output template must contain '{stem}'",
                        "/output")
    matches = sorted(glob.glob(args.pattern))
    if not matches:
        raise NoMatchesError(f"pattern '{args.pattern}' matched no files")

    failures: list[tuple[str, str]] = []
    for match in matches:
        out_name = spec["output"].replace("{stem}", Path(match).stem)
        output = spec_path.parent / out_name
        try:
            case = open_case(match)
            validate_spec_against_case(spec, case)
            execute_plotspec(spec, case, output)
        except (FlowpostError, OSError) as exc:
            failures.append((match, str(exc)))
            continue
        if not args.quiet:
            print(f"{match} -> {output}")

    ok = len(matches) - len(failures)
    print(f"batch: {ok} of {len(matches)} datasets processed")
    for match, message in failures:
        print(f"  failed: {match}: {message}")
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flowpost",
        description="Reproducible post-processing of planar 2D CFD datasets.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress progress output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("info", help="summarize a dataset")
    p.add_argument("dataset")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("plot", help="render a figure from a JSON plot-spec")
    p.add_argument("spec")
    p.set_defaults(func=cmd_plot)

    p = sub.add_parser("profile", help="extract data along a line into CSV")
    p.add_argument("dataset")
    p.add_argument("p1", help="line start as 'x,y'")
    p.add_argument("p2", help="line end as 'x,y'")
    p.add_argument("field")
    p.add_argument("out", help="output CSV path")
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("sample", help="resample on a Cartesian grid into CSV")
    p.add_argument("dataset")
    p.add_argument("nx", type=int)
    p.add_argument("ny", type=int)
    p.add_argument("field")
    p.add_argument("out", help="output CSV path")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("batch",
                       help="apply one plot-spec to every matched dataset")
    p.add_argument("pattern", help="glob pattern of datasets")
    p.add_argument("spec", help="plot-spec template; output must contain "
                                "'{stem}'")
    p.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FlowpostError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - report bugs as exit code 2
        print(f"internal error: {exc!r}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
