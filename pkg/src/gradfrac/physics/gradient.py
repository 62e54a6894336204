"""Plastic strain gradient tensor and its effective invariant.

Plastic strains are recovered element by element: Gauss values are
extrapolated to the 8 nodes and differentiated with the Q8 shape
functions. Derivatives along x3 vanish in plane strain.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gradfrac.fem.mesh import EXTRAPOLATION, ElementGeometry, Mesh, gauss_2x2, jacobian_map


def voigt_to_tensor(eps_voigt: np.ndarray) -> np.ndarray:
    """(..., 4) engineering-shear Voigt -> (..., 3, 3) symmetric tensor."""
    out = np.zeros(eps_voigt.shape[:-1] + (3, 3))
    out[..., 0, 0] = eps_voigt[..., 0]
    out[..., 1, 1] = eps_voigt[..., 1]
    out[..., 2, 2] = eps_voigt[..., 2]
    out[..., 0, 1] = out[..., 1, 0] = 0.5 * eps_voigt[..., 3]
    return out


@dataclass(frozen=True)
class PlasticGradientField:
    eta_tensor: np.ndarray  # (ne, 4, 3, 3, 3)
    eta_p: np.ndarray  # (ne, 4)

    def flat_eta_p(self) -> np.ndarray:
        return self.eta_p.reshape(-1)


def _eta_from_gradient(grad: np.ndarray) -> np.ndarray:
    """grad[..., a, b, c] = eps_ab,c  ->  eta_ijk = eps_ik,j + eps_jk,i - eps_ij,k."""
    return (
        np.einsum("...ikj->...ijk", grad)
        + np.einsum("...jki->...ijk", grad)
        - grad
    )


def _strain_gradient(nodal_eps: np.ndarray, derivs: np.ndarray) -> np.ndarray:
    """nodal_eps (..., 8, 4) and derivs (..., 4, 8, 2) -> (..., 4, 3, 3, 3)."""
    tensor = voigt_to_tensor(nodal_eps)  # (..., 8, 3, 3)
    in_plane = np.einsum("...gak,...aij->...gijk", derivs, tensor)
    grad = np.zeros(in_plane.shape[:-1] + (3,))
    grad[..., :2] = in_plane
    return grad


def effective_gradient(eta_tensor: np.ndarray) -> np.ndarray:
    return np.sqrt(0.25 * np.sum(np.asarray(eta_tensor) ** 2, axis=(-3, -2, -1)))


def plastic_gradient_tensor(elem_eps_p_at_gps: np.ndarray, element: int, mesh: Mesh) -> np.ndarray:
    """eta_ijk at the 4 Gauss points of one element, shape (4, 3, 3, 3)."""
    rule = gauss_2x2()
    derivs = np.stack([jacobian_map(mesh, element, tuple(p))[2] for p in rule.points])
    nodal = EXTRAPOLATION @ np.asarray(elem_eps_p_at_gps, dtype=np.float64)
    return _eta_from_gradient(_strain_gradient(nodal, derivs))


def plastic_gradient_field(geometry: ElementGeometry, eps_p: np.ndarray) -> PlasticGradientField:
    """Gradient tensor and invariant at every Gauss point of the mesh.

    ``eps_p`` holds one Voigt row per Gauss point, element-major (ne*4, 4).
    """
    ne = geometry.derivs.shape[0]
    per_element = eps_p.reshape(ne, 4, 4)
    nodal = np.einsum("ag,egc->eac", EXTRAPOLATION, per_element)
    eta = _eta_from_gradient(_strain_gradient(nodal, geometry.derivs))
    return PlasticGradientField(eta_tensor=eta, eta_p=effective_gradient(eta))
