"""Structured multi-block Q8 meshing.

Blocks are given as point grids at Q8 resolution (2*ni+1, 2*nj+1, 2):
even indices are corners, odd indices midsides. Blocks that share an edge
must carry the same points on it; coincident points are merged on build.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from gradfrac.core.errors import MeshError
from gradfrac.fem.mesh import Mesh

logger = logging.getLogger(__name__)

# (di, dj) of the 8 local nodes inside a Q8-resolution grid cell
_CELL_OFFSETS = np.array([(0, 0), (2, 0), (2, 2), (0, 2), (1, 0), (2, 1), (1, 2), (0, 1)])
_REVERSED = np.array([0, 3, 2, 1, 7, 6, 5, 4])


def graded(x0: float, x1: float, h0: float, h1: float | None = None) -> np.ndarray:
    """Node positions from x0 to x1, spacing growing geometrically h0 -> h1."""
    h1 = h0 if h1 is None else h1
    length = x1 - x0
    if length <= 0.0 or h0 <= 0.0 or h1 <= 0.0:
        raise MeshError(f"invalid graded segment [{x0}, {x1}] with sizes ({h0}, {h1})")
    if abs(h1 - h0) <= 1e-9 * max(h0, h1):
        n = max(1, int(np.ceil(length / h0 - 1e-9)))
        return np.linspace(x0, x1, n + 1)
    n = max(1, int(round(length * (np.log(h1) - np.log(h0)) / (h1 - h0))))
    if n == 1:
        return np.array([x0, x1])
    ratio = (h1 / h0) ** (1.0 / (n - 1))
    k = np.arange(n + 1)
    x = x0 + length * (ratio**k - 1.0) / (ratio**n - 1.0)
    x[-1] = x1
    return x


def axis(*segments: tuple[float, float, float, float]) -> np.ndarray:
    """Concatenate graded segments (x0, x1, h0, h1) into one node axis."""
    parts = [graded(*segments[0])]
    for seg in segments[1:]:
        piece = graded(*seg)
        parts.append(piece[1:])
    return np.concatenate(parts)


@dataclass(frozen=True)
class BandSize:
    """Element size ``fine`` inside [lo, hi], growing geometrically to ``coarse`` outside."""

    lo: float
    hi: float
    fine: float
    coarse: float
    growth: float = 1.2

    def __call__(self, x: float) -> float:
        distance = max(self.lo - x, x - self.hi, 0.0)
        return min(self.coarse, self.fine + (self.growth - 1.0) * distance)

    @property
    def breaks(self) -> tuple[float, ...]:
        reach = (self.coarse - self.fine) / (self.growth - 1.0) if self.growth > 1.0 else 0.0
        return (self.lo - reach, self.lo, self.hi, self.hi + reach)


def sized_axis(breaks, size: BandSize) -> np.ndarray:
    """Axis through every break point, each gap graded by ``size``."""
    points = np.asarray(breaks, dtype=np.float64)
    lo, hi = points.min(), points.max()
    extra = [b for b in size.breaks if lo < b < hi]
    points = np.unique(np.concatenate([points, extra]))
    # drop slivers left next to a required break
    keep = np.concatenate([[True], np.diff(points) > 1e-9 * (hi - lo)])
    points = points[keep]
    return axis(*[(a, b, size(a), size(b)) for a, b in zip(points[:-1], points[1:])])


def with_midpoints(x: np.ndarray) -> np.ndarray:
    out = np.empty(2 * x.size - 1)
    out[0::2] = x
    out[1::2] = 0.5 * (x[:-1] + x[1:])
    return out


def tensor_patch(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Q8-resolution grid of a rectangle from corner axes xs, ys."""
    gx, gy = np.meshgrid(with_midpoints(xs), with_midpoints(ys), indexing="ij")
    return np.stack([gx, gy], axis=-1)


def cell_centres(grid: np.ndarray) -> np.ndarray:
    return grid[1::2, 1::2]


def ring_patch(
    polyline: np.ndarray,
    centre: tuple[float, float],
    radius: float,
    layers: int,
    ratio: float = 1.0,
) -> np.ndarray:
    """Block between a Q8-resolution polyline and a circular arc.

    Each polyline point is joined radially to the arc point on the ray from
    ``centre``. Layer thickness grows by ``ratio`` from polyline to arc.
    """
    polyline = np.asarray(polyline, dtype=np.float64)
    if polyline.shape[0] % 2 != 1:
        raise MeshError("ring polyline needs an odd number of points (corners and midsides)")
    c = np.asarray(centre, dtype=np.float64)
    rel = polyline - c
    arc = c + radius * rel / np.linalg.norm(rel, axis=1)[:, None]
    if abs(ratio - 1.0) < 1e-12:
        tau = np.linspace(0.0, 1.0, layers + 1)
    else:
        tau = (ratio ** np.arange(layers + 1) - 1.0) / (ratio**layers - 1.0)
    levels = with_midpoints(tau)
    return polyline[:, None, :] + levels[None, :, None] * (arc - polyline)[:, None, :]


def ring_layers(distance: float, first: float, ratio: float) -> int:
    """Layer count whose geometric thicknesses starting at ``first`` span ``distance``."""
    if distance <= first:
        return 1
    if abs(ratio - 1.0) < 1e-12:
        return max(1, int(np.ceil(distance / first)))
    return max(1, int(np.ceil(np.log1p(distance * (ratio - 1.0) / first) / np.log(ratio))))


def box_polyline(grid_x: np.ndarray, grid_y: np.ndarray, sides: str = "brtl") -> np.ndarray:
    """Counter-clockwise walk along the sides of a box of Q8-resolution axes.

    ``sides`` picks and orders the sides: b(ottom), r(ight), t(op), l(eft).
    A closed loop repeats its first point at the end.
    """
    x0, x1 = grid_x[0], grid_x[-1]
    y0, y1 = grid_y[0], grid_y[-1]
    walks = {
        "b": np.column_stack([grid_x, np.full(grid_x.size, y0)]),
        "r": np.column_stack([np.full(grid_y.size, x1), grid_y]),
        "t": np.column_stack([grid_x[::-1], np.full(grid_x.size, y1)]),
        "l": np.column_stack([np.full(grid_y.size, x0), grid_y[::-1]]),
    }
    parts = [walks[sides[0]]]
    for s in sides[1:]:
        parts.append(walks[s][1:])
    return np.concatenate(parts)


class MeshBuilder:
    """Collects Q8 blocks and merges coincident points into one mesh."""

    def __init__(self, tolerance: float):
        self.tolerance = tolerance
        self._cells: list[np.ndarray] = []
        self._tags: list[np.ndarray] = []
        self._tag_names: list[str] = []

    def add_patch(self, grid: np.ndarray, tag: str, mask: np.ndarray | None = None) -> int:
        grid = np.asarray(grid, dtype=np.float64)
        ni = (grid.shape[0] - 1) // 2
        nj = (grid.shape[1] - 1) // 2
        ii = 2 * np.arange(ni)[:, None, None]
        jj = 2 * np.arange(nj)[None, :, None]
        cells = grid[ii + _CELL_OFFSETS[:, 0], jj + _CELL_OFFSETS[:, 1]]  # (ni, nj, 8, 2)
        if mask is not None:
            cells = cells[np.asarray(mask, dtype=bool)]
        cells = cells.reshape(-1, 8, 2)
        if tag not in self._tag_names:
            self._tag_names.append(tag)
        self._cells.append(cells)
        self._tags.append(np.full(cells.shape[0], self._tag_names.index(tag)))
        return cells.shape[0]

    def build(self) -> Mesh:
        if not self._cells:
            raise MeshError("no blocks were added")
        cells = np.concatenate(self._cells)
        tags = np.concatenate(self._tags)

        corners = cells[:, :4]
        area2 = np.sum(corners[:, :, 0] * np.roll(corners[:, :, 1], -1, axis=1)
                       - np.roll(corners[:, :, 0], -1, axis=1) * corners[:, :, 1], axis=1)
        flip = area2 < 0.0
        cells[flip] = cells[flip][:, _REVERSED]

        points = cells.reshape(-1, 2)
        pairs = cKDTree(points).query_pairs(self.tolerance, output_type="ndarray")
        n = points.shape[0]
        graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n)) if len(pairs) else coo_matrix((n, n))
        _, labels = connected_components(graph, directed=False)
        _, first = np.unique(labels, return_index=True)
        order = np.argsort(first)
        new_id = np.empty_like(order)
        new_id[order] = np.arange(order.size)
        node_of_label = new_id
        coords = points[first[order]]
        elements = node_of_label[labels].reshape(-1, 8)

        element_sets = {name: np.nonzero(tags == k)[0] for k, name in enumerate(self._tag_names)}
        mesh = Mesh(coords=coords, elements=elements, element_sets=element_sets)
        logger.debug("built mesh nodes=%d elements=%d", mesh.n_nodes, mesh.n_elements)
        return mesh


def nodes_where(mask: np.ndarray) -> np.ndarray:
    return np.nonzero(np.asarray(mask, dtype=bool))[0].astype(np.int64)


def sorted_along(mesh: Mesh, nodes: np.ndarray, origin: tuple[float, float]) -> np.ndarray:
    """Order nodes by distance from ``origin``."""
    d = np.linalg.norm(mesh.coords[nodes] - np.asarray(origin), axis=1)
    return nodes[np.argsort(d, kind="stable")]


def refined_size(mesh: Mesh, element_set: str) -> float:
    """Largest corner-edge length among elements of a set."""
    ids = mesh.element_sets.get(element_set)
    if ids is None or ids.size == 0:
        return 0.0
    c = mesh.coords[mesh.elements[ids, :4]]
    edges = np.linalg.norm(np.roll(c, -1, axis=1) - c, axis=2)
    return float(edges.max())


def axis_index(grid_axis: np.ndarray, value: float) -> int:
    """Position of ``value`` on a Q8-resolution axis; it must be a grid line."""
    idx = int(np.argmin(np.abs(grid_axis - value)))
    span = float(grid_axis[-1] - grid_axis[0])
    if abs(grid_axis[idx] - value) > 1e-9 * span:
        raise MeshError(f"{value} is not a grid line of the axis")
    return idx


def box_mask(grid: np.ndarray, x0: float, x1: float, y0: float, y1: float) -> np.ndarray:
    """True for cells whose centre lies inside the box."""
    c = cell_centres(grid)
    return (c[..., 0] > x0) & (c[..., 0] < x1) & (c[..., 1] > y0) & (c[..., 1] < y1)
