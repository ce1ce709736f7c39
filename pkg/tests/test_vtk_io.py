"""Parser and writer tests for the VTK format family."""

import numpy as np
import pytest

from flowpost import (
    Field,
    FieldKind,
    RawDataset,
    SourceKind,
    read_dataset,
    read_legacy,
    read_xml_vtu,
    write_legacy_ascii,
)
from flowpost.errors import (
    DataIoError,
    FlowpostWarning,
    InvalidDatasetError,
    MalformedHeaderError,
    MalformedXmlError,
    TruncatedPayloadError,
    UnknownExtensionError,
    UnsupportedCellTypeError,
    UnsupportedCompressionError,
)

from codec_oracles import (
    encode_legacy_ascii,
    encode_legacy_binary,
    encode_vtu_appended,
    encode_vtu_ascii,
    encode_vtu_inline_binary,
)
from mesh_fixtures import unitsq4_raw

MINIMAL_QUAD_VTK = b"""# vtk DataFile Version 3.0
minimal quad
ASCII
DATASET POLYDATA
POINTS 4 double
0 0 0
1 0 0
1 1 0
0 1 0
POLYGONS 1 5
4 0 1 2 3
CELL_DATA 1
SCALARS p double 1
LOOKUP_TABLE default
42.0
"""


def datasets_equal(a: RawDataset, b: RawDataset, rtol=0.0, atol=0.0) -> bool:
    if not np.allclose(a.points, b.points, rtol=rtol, atol=atol):
        return False
    if len(a.cells) != len(b.cells):
        return False
    if not all(np.array_equal(ca, cb) for ca, cb in zip(a.cells, b.cells)):
        return False
    for mine, theirs in ((a.point_fields, b.point_fields),
                         (a.cell_fields, b.cell_fields)):
        if set(mine) != set(theirs):
            return False
        for name in mine:
            if mine[name].kind is not theirs[name].kind:
                return False
            if not np.allclose(mine[name].data, theirs[name].data,
                               rtol=rtol, atol=atol):
                return False
    return True


class TestReadDatasetDispatch:
    def test_minimal_legacy_quad(self, tmp_path):
        path = tmp_path / "quad.vtk"
        path.write_bytes(MINIMAL_QUAD_VTK)
        ds = read_dataset(path)
        assert ds.n_points == 4
        assert ds.n_cells == 1
        assert set(ds.cell_fields) == {"p"}
        assert ds.cell_fields["p"].kind is FieldKind.SCALAR
        assert ds.cell_fields["p"].data[0, 0] == 42.0
        assert ds.source_kind is SourceKind.LEGACY_ASCII

    def test_vtu_twin_matches_legacy(self, tmp_path):
        pts = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], float)
        cells = [np.array([0, 1, 2, 3])]
        cf = {"p": np.array([[42.0]])}
        legacy = tmp_path / "quad.vtk"
        legacy.write_bytes(MINIMAL_QUAD_VTK)
        vtu = tmp_path / "quad.vtu"
        vtu.write_bytes(encode_vtu_ascii(pts, cells, cell_fields=cf))
        a = read_dataset(legacy)
        b = read_dataset(vtu)
        assert b.source_kind is SourceKind.XML_VTU
        assert datasets_equal(a, b, rtol=1e-12)

    def test_unknown_extension(self, tmp_path):
        path = tmp_path / "data.csv"
        path.write_text("1,2,3")
        with pytest.raises(UnknownExtensionError):
            read_dataset(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataIoError):
            read_dataset(tmp_path / "absent.vtk")


class TestReadLegacy:
    def test_ascii_polydata_triangles(self):
        data = (b"# vtk DataFile Version 2.0\nt\nASCII\nDATASET POLYDATA\n"
                b"POINTS 4 float\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n"
                b"POLYGONS 2 8\n3 0 1 2\n3 0 2 3\n")
        ds = read_legacy(data)
        assert ds.n_cells == 2
        assert [len(c) for c in ds.cells] == [3, 3]

    def test_binary_is_big_endian(self, rng):
        pts = rng.random((6, 3))
        cells = [np.array([0, 1, 2]), np.array([2, 3, 4, 5])]
        cf = {"q": rng.random((2, 1))}
        big = read_legacy(encode_legacy_binary(pts, cells, cell_fields=cf))
        ascii_twin = read_legacy(encode_legacy_ascii(pts, cells, cell_fields=cf))
        assert datasets_equal(big, ascii_twin)
        assert big.source_kind is SourceKind.LEGACY_BINARY

        # A little-endian encoding of the same payload must NOT parse to the
        # same values (the format mandates big-endian numbers).
        little = encode_legacy_binary(pts, cells, cell_fields=cf, endian="<")
        try:
            ds = read_legacy(little)
        except (MalformedHeaderError, TruncatedPayloadError,
                InvalidDatasetError, UnsupportedCellTypeError):
            return  # garbage counts are a legitimate outcome
        assert not np.allclose(ds.points, pts)

    def test_unstructured_grid_planar_cells(self):
        pts = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]], float)
        data = encode_legacy_ascii(pts, [np.array([0, 1, 2, 3])],
                                   dataset_kind="UNSTRUCTURED_GRID")
        ds = read_legacy(data)
        assert ds.n_cells == 1

    def test_tetrahedron_rejected(self):
        data = (b"# vtk DataFile Version 3.0\nt\nASCII\n"
                b"DATASET UNSTRUCTURED_GRID\n"
                b"POINTS 4 float\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
                b"CELLS 1 5\n4 0 1 2 3\n"
                b"CELL_TYPES 1\n10\n")
        with pytest.raises(UnsupportedCellTypeError):
            read_legacy(data)

    def test_vertices_and_lines_ignored_with_warning(self):
        data = (b"# vtk DataFile Version 3.0\nt\nASCII\nDATASET POLYDATA\n"
                b"POINTS 4 float\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n"
                b"VERTICES 1 2\n1 0\n"
                b"LINES 1 3\n2 0 1\n"
                b"POLYGONS 1 5\n4 0 1 2 3\n")
        with pytest.warns(FlowpostWarning):
            ds = read_legacy(data)
        assert ds.n_cells == 1

    def test_truncated_points(self):
        data = (b"# vtk DataFile Version 3.0\nt\nASCII\nDATASET POLYDATA\n"
                b"POINTS 10 float\n0 0 0\n1 0 0\n")
        with pytest.raises(TruncatedPayloadError):
            read_legacy(data)

    def test_bad_header(self):
        with pytest.raises(MalformedHeaderError):
            read_legacy(b"not a vtk file\n")

    def test_error_carries_byte_offset(self):
        data = (b"# vtk DataFile Version 3.0\nt\nASCII\nDATASET POLYDATA\n"
                b"POINTS 10 float\n0 0 0\n")
        with pytest.raises(TruncatedPayloadError) as err:
            read_legacy(data)
        assert err.value.offset is not None
        assert "byte offset" in str(err.value)

    def test_duplicate_field_last_wins(self):
        data = (b"# vtk DataFile Version 3.0\nt\nASCII\nDATASET POLYDATA\n"
                b"POINTS 3 float\n0 0 0\n1 0 0\n0 1 0\n"
                b"POLYGONS 1 4\n3 0 1 2\n"
                b"CELL_DATA 1\n"
                b"SCALARS p double 1\nLOOKUP_TABLE default\n1.0\n"
                b"SCALARS p double 1\nLOOKUP_TABLE default\n2.0\n")
        with pytest.warns(FlowpostWarning, match="duplicate"):
            ds = read_legacy(data)
        assert ds.cell_fields["p"].data[0, 0] == 2.0

    def test_two_vertex_polygon_rejected(self):
        data = (b"# vtk DataFile Version 3.0\nt\nASCII\nDATASET POLYDATA\n"
                b"POINTS 3 float\n0 0 0\n1 0 0\n0 1 0\n"
                b"POLYGONS 1 3\n2 0 1\n")
        with pytest.raises(UnsupportedCellTypeError):
            read_legacy(data)

    def test_out_of_range_index_rejected(self):
        data = (b"# vtk DataFile Version 3.0\nt\nASCII\nDATASET POLYDATA\n"
                b"POINTS 3 float\n0 0 0\n1 0 0\n0 1 0\n"
                b"POLYGONS 1 4\n3 0 1 7\n")
        with pytest.raises(InvalidDatasetError):
            read_legacy(data)


class TestReadVtu:
    def test_inline_ascii_vector_point_field(self, rng):
        # 3x3 points, 4 quads, one vector PointData array.
        pts = np.array([[(i % 3) * 1.0, (i // 3) * 1.0, 0.0]
                        for i in range(9)])
        cells = [np.array([0, 1, 4, 3]), np.array([1, 2, 5, 4]),
                 np.array([3, 4, 7, 6]), np.array([4, 5, 8, 7])]
        pf = {"vel": rng.random((9, 3))}
        ds = read_xml_vtu(encode_vtu_ascii(pts, cells, point_fields=pf))
        assert ds.n_points == 9
        assert ds.n_cells == 4
        assert ds.point_fields["vel"].kind is FieldKind.VECTOR
        assert np.allclose(ds.point_fields["vel"].data, pf["vel"])

    @pytest.mark.parametrize("encoding", ["raw", "base64"])
    def test_appended_matches_ascii(self, rng, encoding):
        pts = rng.random((5, 3))
        cells = [np.array([0, 1, 2]), np.array([1, 3, 4, 2])]
        cf = {"p": rng.random((2, 1))}
        a = read_xml_vtu(encode_vtu_ascii(pts, cells, cell_fields=cf))
        b = read_xml_vtu(encode_vtu_appended(pts, cells, cell_fields=cf,
                                             encoding=encoding))
        assert datasets_equal(a, b)

    def test_uint64_header_type(self, rng):
        pts = rng.random((4, 3))
        cells = [np.array([0, 1, 2, 3])]
        ds = read_xml_vtu(encode_vtu_inline_binary(pts, cells,
                                                   header_type="UInt64"))
        assert np.allclose(ds.points, pts)

    def test_compression_rejected(self):
        doc = (b'<VTKFile type="UnstructuredGrid" '
               b'compressor="vtkZLibDataCompressor">'
               b"<UnstructuredGrid/></VTKFile>")
        with pytest.raises(UnsupportedCompressionError):
            read_xml_vtu(doc)

    def test_malformed_xml(self):
        with pytest.raises(MalformedXmlError):
            read_xml_vtu(b"<VTKFile type='UnstructuredGrid'")

    def test_wrong_root_type(self):
        with pytest.raises(MalformedXmlError):
            read_xml_vtu(b'<VTKFile type="PolyData"></VTKFile>')

    def test_volumetric_type_rejected(self):
        pts = np.zeros((4, 3))
        pts[1, 0] = pts[2, 1] = pts[3, 2] = 1.0
        doc = encode_vtu_ascii(pts, [np.array([0, 1, 2, 3])])
        doc = doc.replace(b'format="ascii">9<', b'format="ascii">10<')
        with pytest.raises(UnsupportedCellTypeError):
            read_xml_vtu(doc)

    def test_truncated_appended_block(self, rng):
        pts = rng.random((4, 3))
        doc = encode_vtu_appended(pts, [np.array([0, 1, 2, 3])])
        cut = doc.find(b"</AppendedData>") - 8
        with pytest.raises((TruncatedPayloadError, MalformedXmlError)):
            read_xml_vtu(doc[:cut] + doc[doc.find(b"</AppendedData>"):])


class TestWriteLegacyAscii:
    def test_round_trip_unitsq4_exact(self, tmp_path, unitsq4):
        path = tmp_path / "out.vtk"
        write_legacy_ascii(unitsq4, path)
        back = read_dataset(path)
        assert np.array_equal(back.points, unitsq4.points)
        assert all(np.array_equal(a, b)
                   for a, b in zip(back.cells, unitsq4.cells))
        for name, f in unitsq4.cell_fields.items():
            assert np.array_equal(back.cell_fields[name].data, f.data)

    def test_round_trip_within_1e9_relative(self, tmp_path, rng):
        pts = rng.random((9, 3))
        pts[:, 2] = 0.0
        cells = [np.array([0, 1, 4, 3]), np.array([1, 2, 5, 4]),
                 np.array([3, 4, 7, 6]), np.array([4, 5, 8, 7])]
        raw = RawDataset(
            points=pts, cells=cells,
            cell_fields={"q": Field(FieldKind.SCALAR, rng.random((4, 1)))},
        )
        path = tmp_path / "rt.vtk"
        write_legacy_ascii(raw, path)
        back = read_dataset(path)
        assert np.allclose(back.points, raw.points, rtol=1e-9, atol=0.0)
        assert np.allclose(back.cell_fields["q"].data,
                           raw.cell_fields["q"].data, rtol=1e-9, atol=0.0)

    def test_empty_dataset_round_trips(self, tmp_path):
        raw = RawDataset(points=np.zeros((3, 3)) + [[0, 0, 0], [1, 0, 0],
                                                    [0, 1, 0]], cells=[])
        path = tmp_path / "empty.vtk"
        write_legacy_ascii(raw, path)
        assert "POLYGONS 0 0" in path.read_text()
        back = read_dataset(path)
        assert back.n_cells == 0
        assert back.n_points == 3

    def test_tensor_field_round_trips(self, tmp_path, rng):
        raw = unitsq4_raw(cell_fields={
            "stress": Field(FieldKind.TENSOR, rng.random((4, 9)))
        })
        path = tmp_path / "tensor.vtk"
        write_legacy_ascii(raw, path)
        back = read_dataset(path)
        assert back.cell_fields["stress"].kind is FieldKind.TENSOR
        assert np.array_equal(back.cell_fields["stress"].data,
                              raw.cell_fields["stress"].data)


class TestCrossEncodingAgreement:
    def test_four_encodings_parse_equal(self, rng):
        raw = unitsq4_raw(point_fields={
            "vel": Field(FieldKind.VECTOR, rng.random((9, 3)))
        })
        pts = raw.points
        cells = raw.cells
        cf = {k: f.data for k, f in raw.cell_fields.items()}
        pf = {k: f.data for k, f in raw.point_fields.items()}
        parsed = [
            read_legacy(encode_legacy_ascii(pts, cells, pf, cf)),
            read_legacy(encode_legacy_binary(pts, cells, pf, cf)),
            read_xml_vtu(encode_vtu_ascii(pts, cells, pf, cf)),
            read_xml_vtu(encode_vtu_appended(pts, cells, pf, cf,
                                             encoding="raw")),
            read_xml_vtu(encode_vtu_appended(pts, cells, pf, cf,
                                             encoding="base64")),
            read_xml_vtu(encode_vtu_inline_binary(pts, cells, pf, cf)),
        ]
        reference = parsed[0]
        for other in parsed[1:]:
            assert datasets_equal(reference, other, rtol=1e-6)


class TestFieldValidation:
    def test_width_enforced(self):
        with pytest.raises(InvalidDatasetError):
            Field(FieldKind.VECTOR, np.zeros((4, 2)))

    def test_non_finite_rejected(self):
        data = np.zeros((2, 1))
        data[1, 0] = np.nan
        with pytest.raises(InvalidDatasetError):
            Field(FieldKind.SCALAR, data)

    def test_field_data_is_read_only(self):
        f = Field(FieldKind.SCALAR, np.zeros((2, 1)))
        with pytest.raises(ValueError):
            f.data[0, 0] = 1.0
