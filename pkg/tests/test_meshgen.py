import numpy as np
import pytest
from numpy.testing import assert_allclose

from gradfrac.core.errors import MeshError
from gradfrac.fem.mesh import ElementGeometry
from gradfrac.fem.meshgen import (
    BandSize,
    MeshBuilder,
    axis,
    axis_index,
    box_mask,
    box_polyline,
    graded,
    ring_layers,
    ring_patch,
    sized_axis,
    tensor_patch,
    with_midpoints,
)


def test_graded_segment_spacing_grows_monotonically():
    x = graded(0.0, 10.0, 0.1, 1.0)
    assert x[0] == 0.0 and x[-1] == 10.0
    steps = np.diff(x)
    assert np.all(steps > 0.0)
    assert np.all(np.diff(steps) > -1e-12)
    assert steps[0] == pytest.approx(0.1, rel=0.2)
    assert steps[-1] == pytest.approx(1.0, rel=0.2)


def test_uniform_segment_never_exceeds_size():
    x = graded(0.0, 1.0, 0.3)
    assert np.diff(x).max() <= 0.3
    assert x.size == 5


def test_graded_rejects_empty_segment():
    with pytest.raises(MeshError):
        graded(1.0, 1.0, 0.1)


def test_axis_concatenates_without_repeating_joints():
    x = axis((0.0, 1.0, 0.5, 0.5), (1.0, 2.0, 0.25, 0.25))
    assert_allclose(x, [0.0, 0.5, 1.0, 1.25, 1.5, 1.75, 2.0])


def test_sized_axis_keeps_breaks_and_fine_band():
    size = BandSize(lo=-0.5, hi=2.0, fine=0.1, coarse=2.0, growth=1.5)
    x = sized_axis([-10.0, -0.5, 0.0, 2.0, 10.0], size)
    for b in (-10.0, -0.5, 0.0, 2.0, 10.0):
        assert np.min(np.abs(x - b)) < 1e-12
    inside = (x[:-1] >= -0.5 - 1e-12) & (x[1:] <= 2.0 + 1e-12)
    assert np.diff(x)[inside].max() <= 0.1 + 1e-12
    assert np.diff(x).max() <= 2.0 + 1e-9


def test_band_size_saturates():
    size = BandSize(lo=0.0, hi=1.0, fine=0.1, coarse=1.0, growth=1.5)
    assert size(0.5) == 0.1
    assert size(1.2) == pytest.approx(0.2)
    assert size(100.0) == 1.0
    assert size.breaks == pytest.approx((-1.8, 0.0, 1.0, 2.8))


def test_shared_edges_merge():
    builder = MeshBuilder(tolerance=1e-9)
    builder.add_patch(tensor_patch(np.array([0.0, 1.0]), np.array([0.0, 1.0])), "left")
    builder.add_patch(tensor_patch(np.array([1.0, 2.0]), np.array([0.0, 1.0])), "right")
    mesh = builder.build()
    assert mesh.n_elements == 2
    assert mesh.n_nodes == 13
    assert mesh.element_sets["left"].tolist() == [0]
    assert mesh.element_sets["right"].tolist() == [1]


def test_clockwise_patch_is_reoriented():
    builder = MeshBuilder(tolerance=1e-9)
    builder.add_patch(tensor_patch(np.array([2.0, 1.0, 0.0]), np.array([0.0, 1.0])), "body")
    geometry = ElementGeometry.from_mesh(builder.build())
    assert np.all(geometry.weights > 0.0)
    assert geometry.weights.sum() == pytest.approx(2.0)


def test_masked_cells_are_skipped():
    grid = tensor_patch(np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 2.0]))
    mask = ~box_mask(grid, 1.0, 2.0, 1.0, 2.0)
    builder = MeshBuilder(tolerance=1e-9)
    assert builder.add_patch(grid, "body", mask=mask) == 3


def test_ring_patch_ends_on_arc():
    xs = with_midpoints(np.array([-1.0, -0.5, 0.0, 0.5, 1.0]))
    ys = with_midpoints(np.array([0.0, 0.5, 1.0]))
    polyline = box_polyline(xs, ys, "rtl")
    grid = ring_patch(polyline, (0.0, 0.0), 5.0, layers=3, ratio=1.3)
    assert grid.shape == (polyline.shape[0], 7, 2)
    assert_allclose(np.linalg.norm(grid[:, -1], axis=1), 5.0)
    assert_allclose(grid[:, 0], polyline)

    builder = MeshBuilder(tolerance=1e-9)
    builder.add_patch(tensor_patch(np.array([-1.0, -0.5, 0.0, 0.5, 1.0]), np.array([0.0, 0.5, 1.0])), "inner")
    builder.add_patch(grid, "outer")
    mesh = builder.build()
    geometry = ElementGeometry.from_mesh(mesh)
    assert geometry.weights.sum() == pytest.approx(0.5 * np.pi * 25.0, rel=1e-3)


def test_ring_patch_needs_q8_polyline():
    with pytest.raises(MeshError):
        ring_patch(np.zeros((4, 2)) + 1.0, (0.0, 0.0), 2.0, layers=1)


def test_closed_box_loop_repeats_start():
    xs = with_midpoints(np.array([0.0, 1.0]))
    loop = box_polyline(xs, xs, "brtl")
    assert_allclose(loop[0], loop[-1])
    assert loop.shape[0] % 2 == 1


def test_ring_layers():
    assert ring_layers(0.5, 1.0, 1.2) == 1
    assert ring_layers(3.0, 1.0, 1.0) == 3
    n = ring_layers(10.0, 1.0, 1.5)
    assert (1.5**n - 1.0) / 0.5 >= 10.0
    assert (1.5 ** (n - 1) - 1.0) / 0.5 < 10.0


def test_axis_index():
    grid_axis = with_midpoints(np.array([0.0, 0.5, 2.0]))
    assert axis_index(grid_axis, 0.5) == 2
    assert axis_index(grid_axis, 1.25) == 3
    with pytest.raises(MeshError):
        axis_index(grid_axis, 0.3)
