"""Quadratic serendipity quadrilaterals (Q8) on a 2x2 reduced Gauss rule.

Local node order is fixed for the whole package: four corners
counter-clockwise starting at (-1, -1), then the midsides of edges
1-2, 2-3, 3-4 and 4-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit, prange

from gradfrac.core.errors import DistortedElementError, MeshError

XI_NODES = np.array([-1.0, 1.0, 1.0, -1.0, 0.0, 1.0, 0.0, -1.0])
ETA_NODES = np.array([-1.0, -1.0, 1.0, 1.0, -1.0, 0.0, 1.0, 0.0])

# midside k sits between corners MIDSIDE_CORNERS[k - 4]
MIDSIDE_CORNERS = np.array([[0, 1], [1, 2], [2, 3], [3, 0]])

GAUSS_COORD = 1.0 / np.sqrt(3.0)


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray
    order: str


def gauss_2x2() -> QuadratureRule:
    a = GAUSS_COORD
    points = np.array([[-a, -a], [a, -a], [a, a], [-a, a]])
    return QuadratureRule(points=points, weights=np.ones(4), order="2x2")


@njit(cache=True)
def shape_q8(xi, eta):
    """Serendipity Q8 values (8,) and local derivatives (8, 2) at (xi, eta)."""
    values = np.empty(8)
    derivs = np.empty((8, 2))
    for a in range(4):
        xa = XI_NODES[a]
        ea = ETA_NODES[a]
        sx = 1.0 + xi * xa
        se = 1.0 + eta * ea
        values[a] = 0.25 * sx * se * (xi * xa + eta * ea - 1.0)
        derivs[a, 0] = 0.25 * xa * se * (2.0 * xi * xa + eta * ea)
        derivs[a, 1] = 0.25 * ea * sx * (xi * xa + 2.0 * eta * ea)
    for a in range(4, 8):
        xa = XI_NODES[a]
        ea = ETA_NODES[a]
        if xa == 0.0:
            values[a] = 0.5 * (1.0 - xi * xi) * (1.0 + eta * ea)
            derivs[a, 0] = -xi * (1.0 + eta * ea)
            derivs[a, 1] = 0.5 * ea * (1.0 - xi * xi)
        else:
            values[a] = 0.5 * (1.0 + xi * xa) * (1.0 - eta * eta)
            derivs[a, 0] = 0.5 * xa * (1.0 - eta * eta)
            derivs[a, 1] = -eta * (1.0 + xi * xa)
    return values, derivs


@njit(cache=True)
def _map_point(xe, xi, eta):
    _, local = shape_q8(xi, eta)
    jac = np.zeros((2, 2))
    for a in range(8):
        for i in range(2):
            for k in range(2):
                jac[i, k] += xe[a, i] * local[a, k]
    det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
    glob = np.zeros((8, 2))
    if det != 0.0:
        inv00 = jac[1, 1] / det
        inv01 = -jac[0, 1] / det
        inv10 = -jac[1, 0] / det
        inv11 = jac[0, 0] / det
        for a in range(8):
            glob[a, 0] = local[a, 0] * inv00 + local[a, 1] * inv10
            glob[a, 1] = local[a, 0] * inv01 + local[a, 1] * inv11
    return jac, det, glob


@njit(parallel=True, cache=True)
def _element_geometry(xe_all, points):
    ne = xe_all.shape[0]
    ng = points.shape[0]
    derivs = np.empty((ne, ng, 8, 2))
    dets = np.empty((ne, ng))
    for e in prange(ne):
        for g in range(ng):
            _, det, glob = _map_point(xe_all[e], points[g, 0], points[g, 1])
            dets[e, g] = det
            derivs[e, g] = glob
    return derivs, dets


@dataclass(frozen=True)
class Node:
    id: int
    coords: tuple[float, float]


@dataclass(frozen=True)
class ElementQ8:
    id: int
    node_ids: tuple[int, ...]


@dataclass
class Mesh:
    coords: np.ndarray
    elements: np.ndarray
    node_sets: dict[str, np.ndarray] = field(default_factory=dict)
    element_sets: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.coords = np.ascontiguousarray(self.coords, dtype=np.float64)
        self.elements = np.ascontiguousarray(self.elements, dtype=np.int64)
        self.node_sets = {k: np.asarray(v, dtype=np.int64) for k, v in self.node_sets.items()}
        self.element_sets = {k: np.asarray(v, dtype=np.int64) for k, v in self.element_sets.items()}
        self.validate()

    @property
    def n_nodes(self) -> int:
        return self.coords.shape[0]

    @property
    def n_elements(self) -> int:
        return self.elements.shape[0]

    def node(self, node_id: int) -> Node:
        x, y = self.coords[node_id]
        return Node(id=int(node_id), coords=(float(x), float(y)))

    def element(self, element_id: int) -> ElementQ8:
        return ElementQ8(id=int(element_id), node_ids=tuple(int(n) for n in self.elements[element_id]))

    def element_coords(self) -> np.ndarray:
        return self.coords[self.elements]

    def validate(self) -> None:
        if self.coords.ndim != 2 or self.coords.shape[1] != 2:
            raise MeshError(f"node coordinates must have shape (n, 2), got {self.coords.shape}")
        if not np.all(np.isfinite(self.coords)):
            raise MeshError("node coordinates must be finite")
        if self.elements.ndim != 2 or self.elements.shape[1] != 8:
            raise MeshError(f"Q8 connectivity must have shape (m, 8), got {self.elements.shape}")
        if self.elements.size and (self.elements.min() < 0 or self.elements.max() >= self.n_nodes):
            raise MeshError("element connectivity references a missing node")
        corners = np.sort(self.elements[:, :4], axis=1)
        if np.any(corners[:, 1:] == corners[:, :-1]):
            bad = int(np.nonzero(np.any(corners[:, 1:] == corners[:, :-1], axis=1))[0][0])
            raise MeshError(f"element {bad} repeats a corner node")
        for name, ids in self.node_sets.items():
            if ids.size and (ids.min() < 0 or ids.max() >= self.n_nodes):
                raise MeshError(f"node set {name!r} references a missing node")
        for name, ids in self.element_sets.items():
            if ids.size and (ids.min() < 0 or ids.max() >= self.n_elements):
                raise MeshError(f"element set {name!r} references a missing element")


def jacobian_map(mesh: Mesh, element: int, xi: tuple[float, float]):
    """Isoparametric map of one element at local point xi.

    Returns (J, detJ, global_derivs) with global_derivs = local_derivs . J^-1.
    """
    xe = mesh.coords[mesh.elements[element]]
    jac, det, glob = _map_point(xe, float(xi[0]), float(xi[1]))
    if not det > 0.0:
        raise DistortedElementError(element, det)
    return jac, det, glob


def strain_displacement_matrix(global_derivs: np.ndarray) -> np.ndarray:
    """Plane-strain B (..., 3, 16) in Voigt order (eps_xx, eps_yy, gamma_xy).

    Element dofs are interleaved (u_x, u_y) per local node.
    """
    dndx = global_derivs[..., 0]
    dndy = global_derivs[..., 1]
    b = np.zeros(global_derivs.shape[:-2] + (3, 16))
    b[..., 0, 0::2] = dndx
    b[..., 1, 1::2] = dndy
    b[..., 2, 0::2] = dndy
    b[..., 2, 1::2] = dndx
    return b


def _extrapolation_matrix() -> np.ndarray:
    rule = gauss_2x2()
    signs = np.sign(rule.points)
    scale = np.sqrt(3.0)
    matrix = np.zeros((8, 4))
    for c in range(4):
        for g in range(4):
            matrix[c, g] = 0.25 * (1.0 + scale * XI_NODES[c] * signs[g, 0]) * (1.0 + scale * ETA_NODES[c] * signs[g, 1])
    for k, (a, b) in enumerate(MIDSIDE_CORNERS):
        matrix[4 + k] = 0.5 * (matrix[a] + matrix[b])
    return matrix


EXTRAPOLATION = _extrapolation_matrix()


def extrapolate_gp_to_nodes(gp_values: np.ndarray) -> np.ndarray:
    """Element-local recovery of 2x2 Gauss-point values to the 8 nodes.

    The Gauss axis is the first axis: (4, ...) -> (8, ...).
    """
    gp_values = np.asarray(gp_values, dtype=np.float64)
    if gp_values.shape[0] != 4:
        raise ValueError(f"expected 4 Gauss-point values, got {gp_values.shape[0]}")
    return np.tensordot(EXTRAPOLATION, gp_values, axes=(1, 0))


@dataclass(frozen=True)
class ElementGeometry:
    """Shape data of every element at every Gauss point."""

    shape: np.ndarray  # (4, 8)
    derivs: np.ndarray  # (ne, 4, 8, 2)
    weights: np.ndarray  # (ne, 4), quadrature weight times detJ
    b_matrix: np.ndarray  # (ne, 4, 3, 16)
    gp_coords: np.ndarray  # (ne, 4, 2)

    @classmethod
    def from_mesh(cls, mesh: Mesh, rule: QuadratureRule | None = None) -> "ElementGeometry":
        rule = rule or gauss_2x2()
        xe = mesh.element_coords()
        derivs, dets = _element_geometry(xe, rule.points)
        bad = np.nonzero(~(dets > 0.0))
        if bad[0].size:
            e, g = int(bad[0][0]), int(bad[1][0])
            raise DistortedElementError(e, dets[e, g])
        shape = np.array([shape_q8(p[0], p[1])[0] for p in rule.points])
        return cls(
            shape=shape,
            derivs=derivs,
            weights=dets * rule.weights[None, :],
            b_matrix=strain_displacement_matrix(derivs),
            gp_coords=np.einsum("ga,eak->egk", shape, xe),
        )

    @property
    def n_gauss(self) -> int:
        return self.weights.size


@dataclass(frozen=True)
class DofMap:
    """Displacement dofs 2*node + component; phase-field dofs = node ids.

    The combined numbering (u_x, u_y, phi) per node is 3*node + field.
    """

    n_nodes: int

    @property
    def n_u(self) -> int:
        return 2 * self.n_nodes

    @property
    def n_phi(self) -> int:
        return self.n_nodes

    def u_dofs(self, nodes: np.ndarray, component: int) -> np.ndarray:
        return 2 * np.asarray(nodes, dtype=np.int64) + component

    def element_u_dofs(self, elements: np.ndarray) -> np.ndarray:
        dofs = np.empty((elements.shape[0], 16), dtype=np.int64)
        dofs[:, 0::2] = 2 * elements
        dofs[:, 1::2] = 2 * elements + 1
        return dofs

    @staticmethod
    def combined(node: int, field_index: int) -> int:
        return 3 * node + field_index
