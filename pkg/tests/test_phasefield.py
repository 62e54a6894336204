import numpy as np
import pytest
from numpy.testing import assert_allclose

from gradfrac.core.errors import ParameterError
from gradfrac.fem.mesh import ElementGeometry
from gradfrac.physics.material import MaterialParams
from gradfrac.physics.phasefield import (
    DRIVING_ELASTIC,
    FractureParams,
    crack_density,
    degradation,
    driving_force,
    homogeneous_response,
    length_for_strength,
    pf_element_system,
    strength,
    update_history,
)
from gradfrac.solver.assembly import Discretisation, assemble_phase_field, energies
from gradfrac.solver.linear import GlobalSystem

from conftest import rect_mesh


def test_parameter_validation():
    with pytest.raises(ParameterError, match="Gc"):
        FractureParams(Gc=-1.0, ell_f=0.1)
    with pytest.raises(ParameterError, match="ell_f"):
        FractureParams(Gc=1.0, ell_f=0.0)
    with pytest.raises(ParameterError, match="driving"):
        FractureParams(Gc=1.0, ell_f=0.1, driving_force="plastic")


def test_degradation_function():
    g, dg = degradation(np.array([0.0, 0.5, 1.0]))
    assert_allclose(g, [1.0, 0.25, 0.0])
    assert_allclose(dg, [-2.0, -1.0, 0.0])


def test_crack_density(ct_fracture):
    assert crack_density(1.0, np.zeros(2), ct_fracture) == pytest.approx(1.0 / 0.3)
    assert crack_density(0.0, np.array([2.0, 0.0]), ct_fracture) == pytest.approx(0.5 * 0.15 * 4.0)


def test_history_never_decreases():
    assert_allclose(update_history(np.array([1.0, 2.0]), np.array([1.5, 0.5])), [1.5, 2.0])


def test_driving_force_choice(ct_fracture):
    assert driving_force(2.0, 3.0, ct_fracture) == pytest.approx(5.0)
    elastic = FractureParams(Gc=1.0, ell_f=0.1, driving_force=DRIVING_ELASTIC)
    assert driving_force(2.0, 3.0, elastic) == pytest.approx(2.0)


def test_element_stiffness_is_residual_derivative(square, ct_fracture):
    geometry = ElementGeometry.from_mesh(square)
    rng = np.random.default_rng(11)
    phi = rng.uniform(0.0, 0.5, 8)
    H = rng.uniform(0.0, 5.0, 4)
    psi_p = rng.uniform(0.0, 5.0, 4)
    args = (geometry.shape, geometry.derivs[0], geometry.weights[0], ct_fracture)
    r, k = pf_element_system(phi, H, psi_p, *args)
    assert_allclose(k, k.T, atol=1e-12)
    h = 1e-6
    for j in range(8):
        step = np.zeros(8)
        step[j] = h
        r_plus, _ = pf_element_system(phi + step, H, psi_p, *args)
        r_minus, _ = pf_element_system(phi - step, H, psi_p, *args)
        assert_allclose((r_plus - r_minus) / (2 * h), k[:, j], rtol=1e-6, atol=1e-8)


def test_uniform_drive_gives_closed_form_phase_field():
    fracture = FractureParams(Gc=2.7, ell_f=0.3)
    disc = Discretisation.from_mesh(rect_mesh([0.0, 0.3, 1.0, 1.2], [0.0, 0.5, 0.9]))
    D = 4.0
    drive = np.full(disc.n_gauss, D)
    k, r = assemble_phase_field(disc, np.zeros(disc.mesh.n_nodes), drive, fracture)
    phi = GlobalSystem.from_parts(k, r, np.zeros(0, dtype=np.int64)).correction()
    expected = 2.0 * D / (2.0 * D + fracture.Gc / fracture.ell_f)
    assert_allclose(phi, expected, rtol=1e-10)

    E = 1000.0
    strain = np.sqrt(2.0 * D / E)
    closed, _ = homogeneous_response(strain, E, fracture)
    assert closed == pytest.approx(expected, rel=1e-12)


def test_homogeneous_strength(ct_fracture):
    E = 71480.0
    assert strength(ct_fracture, E) == pytest.approx(684.0, rel=1e-3)
    assert strength(ct_fracture, E) / 345.0 == pytest.approx(1.98, rel=2e-3)

    eps_peak = np.sqrt(ct_fracture.Gc / (3.0 * E * ct_fracture.ell_f))
    strains = np.linspace(0.2, 3.0, 20001) * eps_peak
    _, stress = homogeneous_response(strains, E, ct_fracture)
    assert stress.max() == pytest.approx(strength(ct_fracture, E), rel=1e-3)
    assert strains[np.argmax(stress)] == pytest.approx(eps_peak, rel=1e-3)


def test_length_for_strength_inverts_strength():
    E, Gc, sigma_Y = 200000.0, 15.44, 600.0
    ell = length_for_strength(E, Gc, 0.5, sigma_Y)
    assert strength(FractureParams(Gc=Gc, ell_f=ell), E) == pytest.approx(300.0)
    with pytest.raises(ParameterError):
        length_for_strength(E, Gc, 0.0, sigma_Y)


def test_smeared_crack_dissipates_one_crack_length():
    ell = 0.5
    fracture = FractureParams(Gc=1.0, ell_f=ell)
    h = ell / 5.0
    half = np.linspace(0.0, 12.0 * ell, int(round(12.0 * ell / h)) + 1)
    xs = np.concatenate([-half[:0:-1], half])
    height = 1.0
    mesh = rect_mesh(xs, [0.0, height])
    disc = Discretisation.from_mesh(mesh)

    seed = np.nonzero(np.abs(mesh.coords[:, 0]) < 1e-12)[0]
    phi = np.zeros(mesh.n_nodes)
    phi[seed] = 1.0
    k, r = assemble_phase_field(disc, phi, np.zeros(disc.n_gauss), fracture)
    phi = phi + GlobalSystem.from_parts(k, r, seed).correction(np.zeros(seed.size))

    x = mesh.coords[:, 0]
    assert_allclose(phi, np.exp(-np.abs(x) / ell), atol=2e-3)
    eps_e = np.zeros((disc.n_gauss, 4))
    result = energies(disc, eps_e, np.zeros(disc.n_gauss), phi, MaterialParams(E=1000.0, nu=0.3, sigma_Y=10.0), fracture)
    assert result.crack_length == pytest.approx(height, rel=0.03)
