"""AT2 phase-field energetics with quadratic degradation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gradfrac.core.errors import ParameterError

DRIVING_TOTAL = "total"
DRIVING_ELASTIC = "elastic"
SPLIT_AMOR = "amor"
SPLIT_NONE = "none"


@dataclass(frozen=True)
class FractureParams:
    Gc: float
    ell_f: float
    kappa: float = 1e-7
    driving_force: str = DRIVING_TOTAL
    split: str = SPLIT_AMOR

    def __post_init__(self) -> None:
        if not self.Gc > 0.0:
            raise ParameterError(f"Gc must be > 0 MPa*mm, got {self.Gc}")
        if not self.ell_f > 0.0:
            raise ParameterError(f"ell_f must be > 0 mm, got {self.ell_f}")
        if not 0.0 < self.kappa < 1e-2:
            raise ParameterError(f"kappa must lie in (0, 1e-2), got {self.kappa}")
        if self.driving_force not in (DRIVING_TOTAL, DRIVING_ELASTIC):
            raise ParameterError(f"unknown driving force {self.driving_force!r}")
        if self.split not in (SPLIT_AMOR, SPLIT_NONE):
            raise ParameterError(f"unknown energy split {self.split!r}")


def degradation(phi):
    phi = np.asarray(phi, dtype=np.float64)
    return (1.0 - phi) ** 2, -2.0 * (1.0 - phi)


def crack_density(phi, grad_phi, params: FractureParams):
    """gamma = phi^2 / (2 l) + l/2 |grad phi|^2, 1/mm."""
    phi = np.asarray(phi, dtype=np.float64)
    grad_phi = np.asarray(grad_phi, dtype=np.float64)
    return phi**2 / (2.0 * params.ell_f) + 0.5 * params.ell_f * np.sum(grad_phi**2, axis=-1)


def update_history(H_old, psi_e_plus):
    return np.maximum(H_old, psi_e_plus)


def driving_force(H_plus, psi_p, params: FractureParams):
    if params.driving_force == DRIVING_ELASTIC:
        return np.asarray(H_plus, dtype=np.float64)
    return np.asarray(H_plus, dtype=np.float64) + np.asarray(psi_p, dtype=np.float64)


def pf_element_system(phi_e, H_plus, psi_p, shape, derivs, weights, params: FractureParams):
    """Residual (8,) and stiffness (8, 8) of one element.

    ``shape`` (4, 8) and ``derivs`` (4, 8, 2) are the Q8 values and global
    derivatives at the Gauss points, ``weights`` (4,) include detJ.
    """
    r, k = pf_system_all(
        np.asarray(phi_e)[None],
        driving_force(H_plus, psi_p, params)[None],
        shape,
        np.asarray(derivs)[None],
        np.asarray(weights)[None],
        params,
    )
    return r[0], k[0]


def pf_system_all(phi_e, drive, shape, derivs, weights, params: FractureParams):
    """Element residuals (ne, 8) and stiffnesses (ne, 8, 8) for a driving force (ne, 4)."""
    gc, ell = params.Gc, params.ell_f
    phi_g = phi_e @ shape.T  # (ne, 4)
    grad_g = np.einsum("egak,ea->egk", derivs, phi_e)
    source = (-2.0 * (1.0 - phi_g) * drive + gc * phi_g / ell) * weights
    r = source @ shape + gc * ell * np.einsum("eg,egak,egk->ea", weights, derivs, grad_g)
    mass_coef = (2.0 * drive + gc / ell) * weights
    k = np.einsum("eg,ga,gb->eab", mass_coef, shape, shape)
    k += gc * ell * np.einsum("eg,egak,egbk->eab", weights, derivs, derivs)
    return r, k


def homogeneous_response(strain, E: float, params: FractureParams):
    """Closed-form 1D phase field and degraded stress under uniform strain."""
    strain = np.asarray(strain, dtype=np.float64)
    load = E * strain**2 * params.ell_f
    phi = load / (params.Gc + load)
    return phi, (1.0 - phi) ** 2 * E * strain


def strength(params: FractureParams, E: float) -> float:
    return float(np.sqrt(27.0 * E * params.Gc / (256.0 * params.ell_f)))


def length_for_strength(E: float, Gc: float, ratio: float, sigma_Y: float) -> float:
    """ell_f whose homogeneous strength equals ``ratio * sigma_Y``."""
    if not ratio > 0.0:
        raise ParameterError(f"strength ratio must be > 0, got {ratio}")
    return 27.0 * E * Gc / (256.0 * (ratio * sigma_Y) ** 2)
