import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import brentq

from gradfrac.core.errors import ParameterError
from gradfrac.physics.material import (
    GaussPointState,
    MaterialParams,
    cmsg_stress_update,
    dislocation_densities,
    elastic_energy,
    elastic_energy_split,
    elastic_moduli,
    hardening_curve,
    taylor_flow_stress,
    von_mises,
)


def test_parameter_validation():
    with pytest.raises(ParameterError, match="nu"):
        MaterialParams(E=1000.0, nu=0.5, sigma_Y=1.0)
    with pytest.raises(ParameterError, match="m"):
        MaterialParams(E=1000.0, nu=0.3, sigma_Y=1.0, m=0.5)
    with pytest.raises(ParameterError, match="hardening"):
        MaterialParams(E=1000.0, nu=0.3, sigma_Y=1.0, hardening="cubic")


def test_hardening_laws(steel, linear_hardening):
    assert hardening_curve(0.0, steel) == pytest.approx(steel.sigma_Y)
    assert hardening_curve(0.003, steel) == pytest.approx(1.1487 * steel.sigma_Y, rel=1e-4)
    assert hardening_curve(0.1, linear_hardening) == pytest.approx(416.48)


def test_flow_stress(steel):
    p = np.array([0.0, 0.01, 0.05])
    assert_allclose(taylor_flow_stress(p, 0.0, steel.with_length(0.01)), hardening_curve(p, steel))

    gradient = steel.with_length(0.002)
    eta = 3.0 * (steel.sigma_Y / steel.sigma_ref) ** 2 / gradient.ell_p
    assert taylor_flow_stress(0.0, eta, gradient) == pytest.approx(2.0 * steel.sigma_Y)

    etas = np.linspace(0.0, 50.0, 11)
    assert np.all(np.diff(taylor_flow_stress(0.02, etas, gradient)) > 0.0)


def test_dislocation_densities(steel):
    rho_s, rho_g = dislocation_densities(0.0, 0.0, steel)
    assert rho_g == 0.0
    expected = (steel.sigma_Y / (steel.M * steel.alpha * steel.mu * steel.b)) ** 2
    assert rho_s == pytest.approx(expected)
    _, rho_g = dislocation_densities(0.0, steel.b / steel.r_bar, steel)
    assert rho_g == pytest.approx(1.0)
    with pytest.raises(ParameterError):
        dislocation_densities(0.0, 0.0, MaterialParams(E=1000.0, nu=0.3, sigma_Y=1.0, b=0.0))


def _ramp(params, strains, eta=0.0):
    state = GaussPointState.zeros(1)
    out = []
    for eps in strains:
        state, tangent = cmsg_stress_update(state, eps[None, :], np.array([eta]), params)
        out.append(state)
    return out, tangent


def test_uniaxial_strain_matches_rate_independent_curve(steel):
    eps_y = steel.sigma_Y / steel.E
    levels = np.linspace(0.0, 5.0 * eps_y, 301)[1:]
    strains = np.zeros((levels.size, 4))
    strains[:, 0] = levels
    states, _ = _ramp(steel, strains)

    K, mu = steel.K, steel.mu
    for eps, state in zip(levels, states):
        if eps < 2.5 * eps_y:
            continue
        q_trial = 2.0 * mu * eps
        p = brentq(lambda p: q_trial - 3.0 * mu * p - hardening_curve(p, steel), 0.0, q_trial / (3.0 * mu))
        expected = K * eps + 2.0 / 3.0 * hardening_curve(p, steel)
        assert state.sigma0[0, 0] == pytest.approx(expected, rel=0.02)


def _tensor(eps):
    xx, yy, zz, gxy = eps
    return np.array([[xx, 0.5 * gxy, 0.0], [0.5 * gxy, yy, 0.0], [0.0, 0.0, zz]])


def _dev(t):
    return t - np.trace(t) / 3.0 * np.eye(3)


def _reference_path(params, path):
    """Radial return on full 3x3 tensors with the overstress flow rule, no gradient term."""
    K, mu, m = params.K, params.mu, params.m
    eps_old, eps_p, p = np.zeros((3, 3)), np.zeros((3, 3)), 0.0
    out = []
    for voigt in path:
        eps = _tensor(voigt)
        s_tr = 2.0 * mu * _dev(eps - eps_p)
        q_tr = np.sqrt(1.5 * np.sum(s_tr * s_tr))
        de = _dev(eps - eps_old)
        rate = np.sqrt(2.0 / 3.0 * np.sum(de * de))
        dp = 0.0
        if rate > 1e-14 and q_tr > 0.0:
            dp = brentq(
                lambda x: x - rate * ((q_tr - 3.0 * mu * x) / hardening_curve(p + x, params)) ** m,
                0.0,
                q_tr / (3.0 * mu),
                xtol=1e-18,
            )
        if q_tr > 0.0:
            eps_p = eps_p + 1.5 * dp * s_tr / q_tr
            s = (1.0 - 3.0 * mu * dp / q_tr) * s_tr
        else:
            s = s_tr
        p += dp
        sigma = s + K * np.trace(eps) * np.eye(3)
        out.append((np.array([sigma[0, 0], sigma[1, 1], sigma[2, 2], sigma[0, 1]]), p))
        eps_old = eps
    return out


def test_random_load_reversals_match_tensor_radial_return(steel):
    rng = np.random.default_rng(19)
    eps_y = steel.sigma_Y / steel.E
    n_paths, n_steps = 8, 30
    paths = np.cumsum(rng.normal(scale=0.5 * eps_y, size=(n_steps, n_paths, 4)), axis=0)
    paths[..., 2] = 0.0

    state = GaussPointState.zeros(n_paths)
    history = []
    for eps in paths:
        state, _ = cmsg_stress_update(state, eps, np.zeros(n_paths), steel)
        history.append(state)

    unloaded = 0
    for k in range(n_paths):
        expected = _reference_path(steel, paths[:, k])
        q = [von_mises(s.sigma0[k])[0] for s in history]
        unloaded += int(np.any(np.diff(q) < 0.0))
        for state_k, (sigma, p) in zip(history, expected):
            assert_allclose(state_k.sigma0[k], sigma, rtol=1e-6, atol=1e-6 * steel.sigma_Y)
            assert state_k.eps_p_eq[k] == pytest.approx(p, rel=1e-6, abs=1e-12)
    assert unloaded == n_paths
    assert history[-1].eps_p_eq.min() > 0.0


def test_elastic_step_is_linear(steel):
    eps = np.array([[1e-5, -2e-5, 0.0, 3e-5]])
    state, _ = cmsg_stress_update(GaussPointState.zeros(1), eps, np.zeros(1), steel)
    # rate-dependent flow is negligible this far below yield
    assert state.eps_p_eq[0] < 1e-12
    assert_allclose(state.sigma0, eps @ elastic_moduli(steel).T, rtol=1e-8)


def test_volumetric_increment_does_not_flow(steel):
    states, tangent = _ramp(steel, np.array([[0.01, 0.0, 0.0, 0.0]]))
    before = states[-1]
    eps = before.eps + np.array([[1e-3, 1e-3, 1e-3, 0.0]])
    after, tangent = cmsg_stress_update(before, eps, np.zeros(1), steel)
    assert after.eps_p_eq[0] == before.eps_p_eq[0]
    assert_allclose(tangent[0], elastic_moduli(steel))
    assert_allclose(after.sigma0 - before.sigma0, (eps - before.eps) @ elastic_moduli(steel).T, atol=1e-9)


def test_consistent_tangent_matches_finite_differences(steel):
    rng = np.random.default_rng(7)
    params = steel.with_length(0.01)
    eps_y = steel.sigma_Y / steel.E
    n = 128
    base = GaussPointState.zeros(n)
    eta = rng.uniform(0.0, 2.0, n)
    first = rng.normal(scale=3.0 * eps_y, size=(n, 4))
    state, _ = cmsg_stress_update(base, first, eta, params)
    eps = first + rng.normal(scale=eps_y, size=(n, 4))
    _, tangent = cmsg_stress_update(state, eps, eta, params)

    h = 1e-7
    fd = np.empty_like(tangent)
    for j in range(4):
        step = np.zeros(4)
        step[j] = h
        plus, _ = cmsg_stress_update(state, eps + step, eta, params)
        minus, _ = cmsg_stress_update(state, eps - step, eta, params)
        fd[:, :, j] = (plus.sigma0 - minus.sigma0) / (2.0 * h)
    errors = np.linalg.norm(fd - tangent, axis=(1, 2)) / np.linalg.norm(tangent, axis=(1, 2))
    assert errors.max() < 1e-4


def test_history_is_monotone_and_incompressible(steel):
    rng = np.random.default_rng(3)
    eps_y = steel.sigma_Y / steel.E
    path = np.cumsum(rng.normal(scale=eps_y, size=(40, 4)), axis=0)
    states, _ = _ramp(steel.with_length(0.005), path, eta=1.0)
    p = np.array([s.eps_p_eq[0] for s in states])
    work = np.array([s.psi_p[0] for s in states])
    assert np.all(np.diff(p) >= 0.0)
    assert np.all(np.diff(work) >= 0.0)
    assert p[-1] > 0.0
    for s in states:
        assert abs(s.eps_p[0, :3].sum()) < 1e-8


def test_energy_split():
    params = MaterialParams(E=1000.0, nu=0.25, sigma_Y=10.0)
    c = 1e-3
    plus, minus = elastic_energy_split(np.array([[-c, -c, -c, 0.0]]), params)
    assert plus[0] == pytest.approx(0.0, abs=1e-20)
    assert minus[0] == pytest.approx(0.5 * params.K * (3.0 * c) ** 2)

    g = 2e-3
    plus, minus = elastic_energy_split(np.array([[0.0, 0.0, 0.0, g]]), params)
    assert plus[0] == pytest.approx(params.mu * g * g / 2.0)
    assert minus[0] == 0.0

    eps = np.array([[c, 0.0, 0.0, 0.0]])
    plus, minus = elastic_energy_split(eps, params)
    full = 0.5 * params.lam * c**2 + params.mu * c**2
    assert plus[0] + minus[0] == pytest.approx(full, rel=1e-10)
    assert elastic_energy(eps, params)[0] == pytest.approx(full, rel=1e-10)


def test_von_mises_of_uniaxial_stress():
    assert von_mises(np.array([250.0, 0.0, 0.0, 0.0]))[0] == pytest.approx(250.0)
    assert von_mises(np.array([0.0, 0.0, 0.0, 10.0]))[0] == pytest.approx(10.0 * np.sqrt(3.0))
