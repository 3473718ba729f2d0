import numpy as np
import pytest
from hypothesis import given, strategies as st

from trisw.mesh import (DegenerateCellError, InvalidDomainError, Mesh, MeshParseError,
                        NonConformingMeshError, generate_rect_mesh, load_mesh, locate_cell,
                        save_mesh)


def closure(mesh):
    return np.einsum("ck,ckd->cd", mesh.edge_length, mesh.normal)


def test_unit_square_two_cells():
    m = generate_rect_mesh((0, 1), (0, 1), 1, 1, "uniform")
    assert m.n_cells == 2
    assert m.area.sum() == pytest.approx(1.0, abs=1e-15)


def test_steady_channel_mesh_area():
    m = generate_rect_mesh((0, 2.5), (0, 0.2), 80, 7, "alternating")
    assert m.n_cells == 1120
    assert abs(m.area.sum() - 0.5) <= 1e-12


def test_edge_closure_2x2():
    m = generate_rect_mesh((0, 1), (0, 1), 2, 2, "uniform")
    c = closure(m)
    assert np.abs(c).max() <= 1e-12 * m.perimeter.max()


def test_right_triangle_geometry():
    m = Mesh(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]), np.array([[0, 1, 2]]))
    assert m.area[0] == pytest.approx(0.5)
    np.testing.assert_allclose(m.centroid[0], [1 / 3, 1 / 3])
    # edge 1 joins (1,0) and (0,1): the hypotenuse
    assert m.edge_length[0, 1] == pytest.approx(np.sqrt(2))
    np.testing.assert_allclose(m.normal[0, 1], [1 / np.sqrt(2), 1 / np.sqrt(2)])


def test_clockwise_input_is_flipped():
    m = Mesh(np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]), np.array([[0, 1, 2]]))
    assert m.area[0] > 0
    off = m.midpoint[0] - m.centroid[0]
    assert np.all(np.einsum("kd,kd->k", off, m.normal[0]) > 0)


def test_degenerate_range():
    with pytest.raises(InvalidDomainError):
        generate_rect_mesh((1, 1), (0, 1), 2, 2)
    with pytest.raises(InvalidDomainError):
        generate_rect_mesh((0, 1), (0, 1), 0, 2)


@given(nx=st.integers(1, 7), ny=st.integers(1, 7),
       pattern=st.sampled_from(["uniform", "alternating"]),
       w=st.floats(0.1, 50), h=st.floats(0.1, 50))
def test_generated_mesh_invariants(nx, ny, pattern, w, h):
    m = generate_rect_mesh((-1.0, -1.0 + w), (2.0, 2.0 + h), nx, ny, pattern)
    assert m.n_cells == 2 * nx * ny
    assert abs(m.area.sum() - w * h) <= 1e-10 * w * h
    assert np.all(m.area > 0)
    assert np.abs(closure(m)).max() <= 1e-12 * m.perimeter.max()
    np.testing.assert_allclose(np.hypot(m.normal[..., 0], m.normal[..., 1]), 1.0, rtol=1e-14)
    off = m.midpoint - m.centroid[:, None, :]
    assert np.all(np.einsum("ckd,ckd->ck", off, m.normal) > 0)
    # neighbour symmetry with equal lengths and opposite normals
    c, k = np.nonzero(m.neighbor >= 0)
    r, rk = m.neighbor[c, k], m.neighbor_edge[c, k]
    assert np.all(m.neighbor[r, rk] == c)
    assert np.all(m.neighbor_edge[r, rk] == k)
    np.testing.assert_array_equal(m.edge_length[c, k], m.edge_length[r, rk])
    np.testing.assert_allclose(m.normal[c, k], -m.normal[r, rk], atol=1e-15)
    # boundary edges are exactly the free ones
    assert len(m.boundary_tags) == int((m.neighbor < 0).sum())
    assert set(m.boundary_tags.values()) <= {"left", "right", "bottom", "top"}


def test_boundary_tags_by_side():
    m = generate_rect_mesh((0, 3), (0, 2), 3, 2)
    counts = {}
    for _, _, tag in m.boundary_edges():
        counts[tag] = counts.get(tag, 0) + 1
    assert counts == {"left": 2, "right": 2, "bottom": 3, "top": 3}


def test_locate_centroid():
    m = generate_rect_mesh((0, 1), (0, 1), 4, 4)
    assert locate_cell(m, m.centroid[7]) == 7


def test_locate_shared_vertex_lowest_id():
    m = generate_rect_mesh((0, 1), (0, 1), 4, 4)
    p = m.points[12]  # interior vertex
    incident = [c for c in range(m.n_cells) if 12 in m.triangles[c]]
    assert locate_cell(m, p) == min(incident)


def test_locate_outside():
    m = generate_rect_mesh((0, 1), (0, 1), 4, 4)
    assert locate_cell(m, (1.5, 0.5)) is None
    assert locate_cell(m, (-1e-6, 0.5)) is None


def test_load_small_file(tmp_path):
    p = tmp_path / "two.mesh"
    p.write_text("# square\n4 2\n0 0 0\n1 0 0\n1 1 0.5\n0 1 0.5\n0 1 2\n0 2 3\n")
    m = load_mesh(p)
    assert m.n_cells == 2
    np.testing.assert_array_equal(m.vertex_z, [0, 0, 0.5, 0.5])


def test_load_repeated_vertex(tmp_path):
    p = tmp_path / "bad.mesh"
    p.write_text("3 1\n0 0 0\n1 0 0\n0 1 0\n0 1 1\n")
    with pytest.raises(DegenerateCellError):
        load_mesh(p)


def test_load_parse_error_line_number(tmp_path):
    p = tmp_path / "bad.mesh"
    p.write_text("3 1\n0 0 0\n1 zero 0\n0 1 0\n0 1 2\n")
    with pytest.raises(MeshParseError) as exc:
        load_mesh(p)
    assert exc.value.lineno == 3


def test_load_non_conforming(tmp_path):
    # three triangles sharing one edge
    p = tmp_path / "nc.mesh"
    p.write_text("5 3\n0 0 0\n1 0 0\n0.5 1 0\n0.5 -1 0\n0.5 2 0\n0 1 2\n1 0 3\n0 1 4\n")
    with pytest.raises(NonConformingMeshError):
        load_mesh(p)


def test_round_trip(tmp_path):
    m = generate_rect_mesh((0, 2.5), (0, 0.2), 9, 3)
    p = tmp_path / "rt.mesh"
    z = np.linspace(-1, 1, m.n_vertices)
    save_mesh(m, p, z)
    m2 = load_mesh(p)
    np.testing.assert_array_equal(m2.points, m.points)
    np.testing.assert_array_equal(m2.triangles, m.triangles)
    np.testing.assert_array_equal(m2.vertex_z, z)
    for name in ("area", "centroid", "edge_length", "normal", "midpoint"):
        np.testing.assert_allclose(getattr(m2, name), getattr(m, name), rtol=0, atol=1e-15)
    assert m2.boundary_tags == m.boundary_tags


def test_custom_tags_survive_orientation_flip(tmp_path):
    p = tmp_path / "cw.mesh"
    # clockwise triangle; edge 0 (v0-v1) is the left side x=0
    p.write_text("3 1\n0 0 0\n0 1 0\n1 0 0\n0 1 2\nboundary\n0 0 inlet\n0 1 hyp\n0 2 floor\n")
    m = load_mesh(p)
    for (c, k), tag in m.boundary_tags.items():
        a = m.cell_vertices[c, k]
        b = m.cell_vertices[c, (k + 1) % 3]
        if tag == "inlet":
            assert a[0] == 0 and b[0] == 0
        if tag == "floor":
            assert a[1] == 0 and b[1] == 0
