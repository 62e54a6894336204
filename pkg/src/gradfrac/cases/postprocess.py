"""Scalar results extracted from a converged state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gradfrac.core.errors import ConfigError
from gradfrac.physics.material import MaterialParams
from gradfrac.solver.assembly import Discretisation

CRACK_THRESHOLD = 0.95
# equivalent plastic strain bounding the plastic zone, in units of sigma_Y/E
PLASTIC_ZONE_STRAIN = 0.2


def measure_crack_extension(
    phi: np.ndarray,
    path: np.ndarray,
    coords: np.ndarray,
    tip: tuple[float, float],
    threshold: float = CRACK_THRESHOLD,
) -> float:
    """Distance from ``tip`` to the farthest path node with phi >= threshold."""
    path = np.asarray(path, dtype=np.int64)
    if path.size == 0:
        return 0.0
    distance = np.linalg.norm(coords[path] - np.asarray(tip, dtype=np.float64), axis=1)
    if np.any(np.diff(distance) < -1e-12 * max(float(distance.max()), 1.0)):
        raise ConfigError("crack_path", "path nodes must be ordered by distance from the crack tip", "mm")
    cracked = np.asarray(phi)[path] >= threshold
    if not cracked.any():
        return 0.0
    return float(distance[np.nonzero(cracked)[0][-1]])


def reaction_force(internal_force: np.ndarray, dofs: np.ndarray) -> float:
    """Sum of the internal force over constrained dofs, N per mm thickness."""
    return float(np.sum(internal_force[np.asarray(dofs, dtype=np.int64)]))


def crack_length_extension(crack_length: float, initial_length: float) -> float:
    """Crack extension from the regularised crack length, never negative."""
    return max(0.0, crack_length - initial_length)


@dataclass(frozen=True)
class PlasticZone:
    area: float  # mm^2 per unit thickness
    radius: float  # mm, farthest yielded Gauss point from the tip


def plastic_zone(
    disc: Discretisation,
    eps_p_eq: np.ndarray,
    material: MaterialParams,
    tip: tuple[float, float],
) -> PlasticZone:
    limit = PLASTIC_ZONE_STRAIN * material.sigma_Y / material.E
    yielded = np.asarray(eps_p_eq).reshape(-1) >= limit
    if not yielded.any():
        return PlasticZone(0.0, 0.0)
    weights = disc.geometry.weights.reshape(-1)
    points = disc.geometry.gp_coords.reshape(-1, 2)[yielded]
    radius = np.linalg.norm(points - np.asarray(tip, dtype=np.float64), axis=1)
    return PlasticZone(area=float(weights[yielded].sum()), radius=float(radius.max()))
