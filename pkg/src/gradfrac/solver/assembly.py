"""Global residuals and stiffnesses of the displacement and phase-field problems.

Element loops are vectorised over the whole mesh; Gauss-point arrays are
element-major with 4 rows per element.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from gradfrac.fem.mesh import DofMap, ElementGeometry, Mesh
from gradfrac.physics.material import MaterialParams, elastic_energy
from gradfrac.physics.phasefield import FractureParams, crack_density, pf_system_all
from gradfrac.solver.linear import assemble_matrix, assemble_vector

# rows of the 4-component Voigt vectors that live in the plane
PLANE = np.array([0, 1, 3])


@dataclass(frozen=True)
class Discretisation:
    mesh: Mesh
    geometry: ElementGeometry
    dofs: DofMap
    u_dofs: np.ndarray  # (ne, 16)

    @classmethod
    def from_mesh(cls, mesh: Mesh) -> "Discretisation":
        dofs = DofMap(mesh.n_nodes)
        return cls(
            mesh=mesh,
            geometry=ElementGeometry.from_mesh(mesh),
            dofs=dofs,
            u_dofs=dofs.element_u_dofs(mesh.elements),
        )

    @property
    def n_elements(self) -> int:
        return self.mesh.n_elements

    @property
    def n_gauss(self) -> int:
        return self.geometry.n_gauss

    def phi_at_gauss(self, phi: np.ndarray) -> np.ndarray:
        return phi[self.mesh.elements] @ self.geometry.shape.T

    def phi_gradient(self, phi: np.ndarray) -> np.ndarray:
        return np.einsum("egak,ea->egk", self.geometry.derivs, phi[self.mesh.elements])

    def strains(self, u: np.ndarray) -> np.ndarray:
        """Voigt strains (ne*4, 4) with eps_zz = 0."""
        in_plane = np.einsum("egij,ej->egi", self.geometry.b_matrix, u[self.u_dofs])
        eps = np.zeros(in_plane.shape[:2] + (4,))
        eps[..., PLANE] = in_plane
        return eps.reshape(-1, 4)

    def degradation_at_gauss(self, phi: np.ndarray, kappa: float) -> np.ndarray:
        return (1.0 - self.phi_at_gauss(phi)) ** 2 + kappa


def assemble_displacement(
    disc: Discretisation,
    sigma0: np.ndarray,
    tangent: np.ndarray,
    phi: np.ndarray,
    fracture: FractureParams,
) -> tuple[sp.csr_matrix, np.ndarray]:
    """K_u and r_u with both stress and tangent degraded by (1-phi)^2 + kappa."""
    ne = disc.n_elements
    wg = disc.geometry.weights * disc.degradation_at_gauss(phi, fracture.kappa)
    b = disc.geometry.b_matrix
    s = sigma0.reshape(ne, 4, 4)[..., PLANE]
    c = tangent.reshape(ne, 4, 4, 4)[:, :, PLANE][:, :, :, PLANE]
    fe = np.einsum("eg,egij,egi->ej", wg, b, s)
    cb = np.einsum("egkl,eglj->egkj", c, b)
    ke = np.einsum("eg,egki,egkj->eij", wg, b, cb)
    size = disc.dofs.n_u
    return assemble_matrix(disc.u_dofs, ke, size), assemble_vector(disc.u_dofs, fe, size)


def assemble_phase_field(
    disc: Discretisation,
    phi: np.ndarray,
    drive: np.ndarray,
    fracture: FractureParams,
) -> tuple[sp.csr_matrix, np.ndarray]:
    ne = disc.n_elements
    elements = disc.mesh.elements
    r, k = pf_system_all(
        phi[elements],
        drive.reshape(ne, 4),
        disc.geometry.shape,
        disc.geometry.derivs,
        disc.geometry.weights,
        fracture,
    )
    size = disc.dofs.n_phi
    return assemble_matrix(elements, k, size), assemble_vector(elements, r, size)


@dataclass(frozen=True)
class Energies:
    elastic: float
    plastic: float
    fracture: float
    crack_length: float


def energies(
    disc: Discretisation,
    eps_e: np.ndarray,
    psi_p: np.ndarray,
    phi: np.ndarray,
    material: MaterialParams,
    fracture: FractureParams,
) -> Energies:
    """Stored elastic, plastic and fracture energy per unit thickness, N*mm/mm."""
    w = disc.geometry.weights.reshape(-1)
    g = disc.degradation_at_gauss(phi, fracture.kappa).reshape(-1)
    gamma = crack_density(disc.phi_at_gauss(phi), disc.phi_gradient(phi), fracture).reshape(-1)
    length = float(np.dot(w, gamma))
    return Energies(
        elastic=float(np.dot(w, g * elastic_energy(eps_e, material))),
        plastic=float(np.dot(w, psi_p)),
        fracture=fracture.Gc * length,
        crack_length=length,
    )
