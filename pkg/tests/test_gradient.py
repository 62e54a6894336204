import numpy as np
import pytest
from numpy.testing import assert_allclose

from gradfrac.fem.mesh import ElementGeometry, Mesh
from gradfrac.physics.gradient import (
    effective_gradient,
    plastic_gradient_field,
    plastic_gradient_tensor,
    voigt_to_tensor,
)

from conftest import q8_square, rect_mesh


def _gauss_xy(mesh: Mesh) -> np.ndarray:
    return ElementGeometry.from_mesh(mesh).gp_coords[0]


def _eps11(values: np.ndarray) -> np.ndarray:
    eps = np.zeros((values.size, 4))
    eps[:, 0] = values
    return eps


def test_uniform_plastic_strain_has_no_gradient(square):
    eps = np.tile([1e-3, -5e-4, -5e-4, 2e-4], (4, 1))
    eta = plastic_gradient_tensor(eps, 0, square)
    assert_allclose(eta, 0.0, atol=1e-12)
    assert_allclose(effective_gradient(eta), 0.0, atol=1e-12)


def test_gradient_along_the_stretch_direction(square):
    k = 0.02
    xy = _gauss_xy(square)
    eta = plastic_gradient_tensor(_eps11(k * xy[:, 0]), 0, square)
    expected = np.zeros((3, 3, 3))
    expected[0, 0, 0] = k
    for g in range(4):
        assert_allclose(eta[g], expected, atol=1e-12)
    assert_allclose(effective_gradient(eta), k / 2.0)


def test_gradient_across_the_stretch_direction(square):
    k = 0.02
    xy = _gauss_xy(square)
    eta = plastic_gradient_tensor(_eps11(k * xy[:, 1]), 0, square)
    expected = np.zeros((3, 3, 3))
    expected[0, 0, 1] = -k
    expected[0, 1, 0] = k
    expected[1, 0, 0] = k
    for g in range(4):
        assert_allclose(eta[g], expected, atol=1e-12)
    assert_allclose(effective_gradient(eta), np.sqrt(3.0) / 2.0 * k)


def test_tensor_is_symmetric_in_first_pair():
    rng = np.random.default_rng(1)
    mesh = rect_mesh([0.0, 0.7, 1.5], [0.0, 0.4, 1.0])
    field = plastic_gradient_field(ElementGeometry.from_mesh(mesh), rng.normal(size=(mesh.n_elements * 4, 4)))
    assert_allclose(field.eta_tensor, np.swapaxes(field.eta_tensor, -3, -2), atol=1e-12)
    assert np.all(field.flat_eta_p() >= 0.0)


def test_bilinear_field_reproduced_at_gauss_points():
    mesh = rect_mesh([0.0, 0.5, 1.0], [0.0, 0.5, 1.0])
    geometry = ElementGeometry.from_mesh(mesh)
    x, y = geometry.gp_coords.reshape(-1, 2).T
    c = 0.3
    eps = np.zeros((x.size, 4))
    eps[:, 0] = 1e-3 + c * x * y
    eps[:, 3] = 2.0 * c * x  # gamma_xy, tensor component c*x
    eta = plastic_gradient_field(geometry, eps).eta_tensor.reshape(-1, 3, 3, 3)

    grad = np.zeros((x.size, 3, 3, 3))
    grad[:, 0, 0, 0] = c * y
    grad[:, 0, 0, 1] = c * x
    grad[:, 0, 1, 0] = grad[:, 1, 0, 0] = c
    expected = (
        np.einsum("nikj->nijk", grad) + np.einsum("njki->nijk", grad) - grad
    )
    assert_allclose(eta, expected, atol=1e-8)


def test_invariant_scales_with_contraction():
    coarse = rect_mesh([0.0, 1.0, 2.0], [0.0, 1.0])
    fine = rect_mesh([0.0, 0.5, 1.0], [0.0, 0.5])
    g_coarse = ElementGeometry.from_mesh(coarse)
    g_fine = ElementGeometry.from_mesh(fine)
    x = g_coarse.gp_coords.reshape(-1, 2)[:, 0]
    eps = _eps11(1e-3 * x + 4e-4)
    eta_coarse = plastic_gradient_field(g_coarse, eps).eta_p
    eta_fine = plastic_gradient_field(g_fine, eps).eta_p
    assert_allclose(eta_fine, 2.0 * eta_coarse, rtol=1e-10)
    shifted = plastic_gradient_field(g_coarse, eps + 5e-3).eta_p
    assert_allclose(shifted, eta_coarse, atol=1e-12)


def test_voigt_to_tensor_halves_shear():
    t = voigt_to_tensor(np.array([1.0, 2.0, 3.0, 4.0]))
    assert t[0, 1] == t[1, 0] == pytest.approx(2.0)
    assert np.trace(t) == pytest.approx(6.0)


def test_element_and_field_versions_agree():
    mesh = q8_square(size=2.0, origin=(-1.0, 3.0))
    rng = np.random.default_rng(5)
    eps = rng.normal(size=(4, 4))
    single = plastic_gradient_tensor(eps, 0, mesh)
    field = plastic_gradient_field(ElementGeometry.from_mesh(mesh), eps)
    assert_allclose(field.eta_tensor[0], single, atol=1e-12)
