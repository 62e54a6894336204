"""Closed-form reference quantities: K-field displacements, K0, R0, strength."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gradfrac.physics.material import MaterialParams
from gradfrac.physics.phasefield import FractureParams, strength


def williams_displacement(K_I, r, theta, E: float, nu: float):
    """Mode I plane-strain crack-tip displacements (u_x, u_y), mm."""
    r = np.asarray(r, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    if np.any(r < 0.0):
        raise ValueError("radius must be non-negative")
    amplitude = K_I / E * np.sqrt(r) * (1.0 + nu) / np.sqrt(2.0 * np.pi) * (3.0 - 4.0 * nu - np.cos(theta))
    return amplitude * np.cos(0.5 * theta), amplitude * np.sin(0.5 * theta)


@dataclass(frozen=True)
class ReferenceQuantities:
    K0: float  # MPa*sqrt(mm)
    R0: float  # mm
    sigma_hat: float  # MPa
    sigma_hat_ratio: float
    R0_over_ell_f: float


def reference_length(material: MaterialParams, Gc: float) -> float:
    return material.E * Gc / (3.0 * np.pi * (1.0 - material.nu**2) * material.sigma_Y**2)


def reference_quantities(material: MaterialParams, fracture: FractureParams) -> ReferenceQuantities:
    E, nu = material.E, material.nu
    sigma_hat = strength(fracture, E)
    R0 = float(reference_length(material, fracture.Gc))
    return ReferenceQuantities(
        K0=float(np.sqrt(E * fracture.Gc / (1.0 - nu**2))),
        R0=R0,
        sigma_hat=sigma_hat,
        sigma_hat_ratio=sigma_hat / material.sigma_Y,
        R0_over_ell_f=R0 / fracture.ell_f,
    )


def strength_length_factor(nu: float) -> float:
    """R0/ell_f divided by (sigma_hat/sigma_Y)^2."""
    return 256.0 / (81.0 * np.pi * (1.0 - nu**2))
