"""Sparse assembly primitives and the direct solve."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from gradfrac.core.errors import SingularSystemError

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-10
# above this the factorisation is treated as singular rather than inaccurate
_BREAKDOWN_TOL = 1e-6


def assemble_matrix(dofs: np.ndarray, blocks: np.ndarray, size: int) -> sp.csr_matrix:
    """Sum element blocks (ne, nd, nd) into a CSR matrix; duplicates are added."""
    nd = dofs.shape[1]
    rows = np.repeat(dofs, nd, axis=1).ravel()
    cols = np.tile(dofs, (1, nd)).ravel()
    return sp.coo_matrix((blocks.ravel(), (rows, cols)), shape=(size, size)).tocsr()


def assemble_vector(dofs: np.ndarray, values: np.ndarray, size: int) -> np.ndarray:
    return np.bincount(dofs.ravel(), weights=values.ravel(), minlength=size)


@dataclass
class GlobalSystem:
    """Matrix and residual of one field split into free and constrained dofs."""

    matrix: sp.csr_matrix
    rhs: np.ndarray
    fixed: np.ndarray
    free: np.ndarray

    @classmethod
    def from_parts(cls, matrix: sp.csr_matrix, rhs: np.ndarray, fixed: np.ndarray) -> "GlobalSystem":
        mask = np.ones(rhs.size, dtype=bool)
        mask[fixed] = False
        return cls(matrix=matrix, rhs=rhs, fixed=np.asarray(fixed, dtype=np.int64), free=np.nonzero(mask)[0])

    def free_block(self) -> sp.csc_matrix:
        return self.matrix[self.free][:, self.free].tocsc()

    def coupling_block(self) -> sp.csr_matrix:
        return self.matrix[self.free][:, self.fixed]

    def correction(self, delta_fixed: np.ndarray | None = None, labels: list[str] | None = None) -> np.ndarray:
        """Full-size increment solving K_ff dx_f = -(r_f + K_fc dx_c)."""
        rhs = -self.rhs[self.free]
        if delta_fixed is not None and self.fixed.size:
            rhs = rhs - self.coupling_block() @ delta_fixed
        dx = np.zeros(self.rhs.size)
        if delta_fixed is not None and self.fixed.size:
            dx[self.fixed] = delta_fixed
        if self.free.size:
            dx[self.free] = solve_linear(self.free_block(), rhs, labels)
        return dx

    def reactions(self) -> np.ndarray:
        return self.rhs[self.fixed]


def solve_linear(matrix, rhs: np.ndarray, rigid_modes: list[str] | None = None) -> np.ndarray:
    """Sparse LU solve with a relative-residual check and one refinement step."""
    matrix = sp.csc_matrix(matrix)
    rhs = np.asarray(rhs, dtype=np.float64)
    norm_b = float(np.linalg.norm(rhs))
    if norm_b == 0.0:
        return np.zeros_like(rhs)
    try:
        lu = splu(matrix)
    except RuntimeError as exc:
        raise SingularSystemError(f"sparse factorisation failed ({exc})", rigid_modes) from exc

    x = lu.solve(rhs)
    rel = float(np.linalg.norm(matrix @ x - rhs)) / norm_b
    if not rel <= RESIDUAL_TOL:
        x = x + lu.solve(rhs - matrix @ x)
        rel = float(np.linalg.norm(matrix @ x - rhs)) / norm_b
    if not np.isfinite(rel) or rel > _BREAKDOWN_TOL:
        raise SingularSystemError(f"linear solve residual check failed (relative residual {rel:.3e})", rigid_modes)
    if rel > RESIDUAL_TOL:
        logger.warning("relative residual=%.3e above %.0e after refinement", rel, RESIDUAL_TOL)
    return x


def unconstrained_rigid_modes(coords: np.ndarray, fixed_dofs: np.ndarray) -> list[str]:
    """Plane rigid modes left free by a set of constrained displacement dofs."""
    fixed_dofs = np.asarray(fixed_dofs, dtype=np.int64)
    x_nodes = fixed_dofs[fixed_dofs % 2 == 0] // 2
    y_nodes = fixed_dofs[fixed_dofs % 2 == 1] // 2
    modes = []
    if x_nodes.size == 0:
        modes.append("translation x")
    if y_nodes.size == 0:
        modes.append("translation y")
    rotation_held = (
        np.unique(np.round(coords[x_nodes, 1], 12)).size > 1
        or np.unique(np.round(coords[y_nodes, 0], 12)).size > 1
    )
    if not rotation_held:
        modes.append("rotation")
    return modes
