import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from trisw.reconstruction import (CellStateField, DegenerateStencilError, desingularized_velocity,
                                  plane_gradient, positivity_correct, reconstruct,
                                  weighted_gradient)

from conftest import make_disc


def test_plane_gradient_exact_for_planes():
    f = lambda x, y: 2.0 - 3.0 * x + 0.5 * y
    pts = [(0.1, 0.2), (1.3, -0.4), (0.7, 2.0)]
    gx, gy = plane_gradient(*[(x, y, f(x, y)) for x, y in pts])
    assert gx == pytest.approx(-3.0, abs=1e-13)
    assert gy == pytest.approx(0.5, abs=1e-13)


def test_plane_gradient_collinear():
    with pytest.raises(DegenerateStencilError):
        plane_gradient((0, 0, 1), (1, 1, 2), (2, 2, 3))


def test_weighted_gradient_equal_inputs():
    g = np.array([0.3, -1.2])
    out = weighted_gradient(g, g, g)
    # equal gradients are returned unchanged up to the xi regularisation
    np.testing.assert_allclose(out, g, rtol=1e-12)


def test_weighted_gradient_zero_neighbour_suppresses():
    out = weighted_gradient([1.0, 0.0], [0.0, 0.0], [1.0, 0.0])
    # weights 1 and 3 carry the product with the zero norm
    assert np.abs(out).max() < 1e-12


def test_weighted_gradient_symmetric():
    a, b, c = np.array([1.0, 2.0]), np.array([-0.5, 0.1]), np.array([0.3, 0.3])
    ref = weighted_gradient(a, b, c)
    for perm in ((b, c, a), (c, a, b), (b, a, c)):
        np.testing.assert_allclose(weighted_gradient(*perm), ref, rtol=1e-14)


def test_positivity_no_violation_untouched():
    w = np.array([[1.0, 1.1, 0.9]])
    out, fixed = positivity_correct(w, np.zeros((1, 3)), np.array([1.0]))
    assert not fixed[0]
    np.testing.assert_array_equal(out, w)


def test_positivity_one_vertex_below():
    b = np.array([[0.0, 0.0, 0.3]])
    w = np.array([[0.25, 0.25, 0.2]])  # mean depth (0.25+0.25-0.1)/3 = 0.4/3
    h_mean = np.array([0.4 / 3])
    out, fixed = positivity_correct(w, b, h_mean)
    assert fixed[0]
    assert out[0, 2] == 0.3
    np.testing.assert_allclose(out[0, :2], 3 * h_mean[0] / 2)
    assert np.mean(out - b) == pytest.approx(h_mean[0], abs=1e-16)


@given(seed=st.integers(0, 2**31 - 1))
def test_positivity_conserves_mean_depth(seed):
    rng = np.random.default_rng(seed)
    n = 500
    b = rng.uniform(-1, 1, (n, 3))
    h_mean = rng.uniform(0, 0.5, n) * (rng.random(n) > 0.1)
    # a linear reconstruction with the right vertex mean
    slope = rng.normal(0, 1, (n, 3))
    slope -= slope.mean(axis=1, keepdims=True)
    w = b.mean(axis=1, keepdims=True) + h_mean[:, None] + slope
    out, _ = positivity_correct(w, b, h_mean)
    assert np.all(out >= b)
    np.testing.assert_allclose((out - b).mean(axis=1), h_mean, rtol=0, atol=1e-14)


@given(h=arrays(float, 20, elements=st.floats(0, 10)),
       q=arrays(float, 20, elements=st.floats(-10, 10)))
def test_desingularized_velocity_bounded(h, q):
    eps = 1e-4
    u, v = desingularized_velocity(h, q, -q, eps)
    assert np.all(np.isfinite(u)) and np.all(np.isfinite(v))
    wet = h >= 1e-6
    np.testing.assert_allclose(u[wet], q[wet] / h[wet])
    np.testing.assert_array_equal(u[h == 0], 0.0)


def test_desingularized_velocity_thin_layer():
    h = np.array([1e-7])
    u, _ = desingularized_velocity(h, np.array([1e-8]), np.array([0.0]), eps=1e-4)
    # sqrt(2) h q / sqrt(h^4 + eps) ~ sqrt(2) * 1e-15 / 1e-2
    assert u[0] == pytest.approx(np.sqrt(2) * 1e-15 / np.sqrt(1e-28 + 1e-4), rel=1e-12)


def test_lake_at_rest_reconstructs_flat_surface():
    disc = make_disc(lambda x, y: 0.1 * np.sin(3 * x) * np.cos(2 * y), nx=8, ny=6)
    nc = disc.n_cells
    state = CellStateField(np.full(nc, 0.5), np.zeros(nc), np.zeros(nc))
    grads, st_ = reconstruct(disc, state)
    assert np.abs(grads.limited[:, 0]).max() == 0.0
    assert np.all(st_.inner["w"] == 0.5)
    assert np.all(st_.outer["w"] == 0.5)


def test_planar_surface_reconstructed_exactly():
    disc = make_disc(nx=6, ny=5)
    c = disc.centroid
    w = 1.0 + 0.2 * c[:, 0] - 0.1 * c[:, 1]
    nc = disc.n_cells
    grads, st_ = reconstruct(disc, CellStateField(w, np.zeros(nc), np.zeros(nc)))
    interior = (disc.neighbor >= 0).all(axis=1)
    # interior cells whose neighbours also have full interior stencils see the exact plane
    deep = interior & np.all(interior[np.maximum(disc.neighbor, 0)], axis=1)
    m = disc.midpoint[deep]
    np.testing.assert_allclose(st_.inner["w"][deep], 1.0 + 0.2 * m[..., 0] - 0.1 * m[..., 1],
                               rtol=0, atol=1e-13)
    # weights damp but keep the direction
    g = grads.limited[deep, 0]
    assert np.all(g[:, 0] > 0) and np.all(g[:, 1] < 0)


def test_interior_interfaces_match_neighbour_side():
    disc = make_disc(nx=4, ny=3)
    rng = np.random.default_rng(1)
    nc = disc.n_cells
    st0 = CellStateField(1 + rng.random(nc), rng.normal(size=nc), rng.normal(size=nc))
    _, s = reconstruct(disc, st0)
    c, k = np.nonzero(disc.neighbor >= 0)
    r, rk = disc.neighbor[c, k], disc.neighbor_edge[c, k]
    for key in s.inner:
        np.testing.assert_array_equal(s.outer[key][c, k], s.inner[key][r, rk])


@pytest.mark.parametrize("pts,f,expected", [
    ([(0, 0), (1, 0), (0, 1)], lambda x, y: 5.0, (0.0, 0.0)),
    ([(0, 0), (1, 0), (0, 1)], lambda x, y: x, (1.0, 0.0)),
    ([(0.1, 0.2), (0.9, 0.15), (0.4, 0.8)], lambda x, y: 2 * x + 3 * y - 1, (2.0, 3.0)),
])
def test_plane_gradient_examples(pts, f, expected):
    g = plane_gradient(*[(x, y, f(x, y)) for x, y in pts])
    np.testing.assert_allclose(g, expected, atol=1e-12)


def test_weighted_gradient_zero_inputs():
    np.testing.assert_array_equal(weighted_gradient([0.0, 0.0], [0.0, 0.0], [0.0, 0.0]), 0.0)


def test_weighted_gradient_outlier_suppressed():
    out = weighted_gradient([1.0, 0.0], [1.0, 0.0], [100.0, 0.0])
    assert out[0] < 2.0


def test_positivity_dry_cell_snaps_to_bed():
    b = np.array([[0.0, 0.1, 0.2]])
    w = np.array([[0.05, 0.05, 0.05]])
    out, fixed = positivity_correct(w, b, np.array([0.0]))
    assert fixed[0]
    np.testing.assert_array_equal(out, b)


def test_positivity_spec_arithmetic():
    # mean depth 0.1, one vertex pulled below the bed -> the other two carry 0.15
    b = np.zeros((1, 3))
    w = np.array([[0.2, 0.2, -0.1]])
    out, _ = positivity_correct(w, b, np.array([0.1]))
    np.testing.assert_allclose(out[0], [0.15, 0.15, 0.0], atol=1e-16)


def test_desingularized_velocity_regular_and_dry():
    u, v = desingularized_velocity(np.array([1.0, 0.0]), np.array([0.5, 3.0]),
                                   np.array([0.0, 1.0]), 1e-4)
    np.testing.assert_array_equal(u, [0.5, 0.0])
    np.testing.assert_array_equal(v, [0.0, 0.0])


def test_all_dry_cells_give_zero_depth_interfaces():
    disc = make_disc(lambda x, y: 0.1 * x, nx=3, ny=2)
    b = disc.bathymetry.cell
    nc = disc.n_cells
    _, s = reconstruct(disc, CellStateField(b.copy(), np.zeros(nc), np.zeros(nc)))
    np.testing.assert_array_equal(s.inner["h"], 0.0)
