"""Full compact-tension specimen with two pin holes.

Block layout: a tensor-product rectangle over the whole specimen with the
square boxes around both pin holes cut out; each cut-out is filled by a
closed ring block running from the box edges to the hole circle. The
notch is the line y = 0 from the front face to the crack tip at x = a0
and exists only as a phi = 1 seed.
"""

from __future__ import annotations

import logging

import numpy as np

from gradfrac.cases.spec import COMPACT_TENSION, BuiltCase, CaseSpec, CompactTensionGeometry, Constraints
from gradfrac.core.errors import ConfigError
from gradfrac.fem.meshgen import (
    BandSize,
    MeshBuilder,
    axis_index,
    box_mask,
    box_polyline,
    nodes_where,
    ring_layers,
    ring_patch,
    sized_axis,
    sorted_along,
    tensor_patch,
    with_midpoints,
)

logger = logging.getLogger(__name__)


def _hole_boxes(geometry: CompactTensionGeometry) -> list[tuple[float, float, float, float, float]]:
    """(x0, x1, y0, y1, centre_y) of the blocks around the upper and lower holes."""
    half = 0.2 * geometry.W
    c = geometry.hole_offset
    return [(-half, half, c - half, c + half, c), (-half, half, -c - half, -c + half, -c)]


def compact_tension_mesh(geometry: CompactTensionGeometry, h: float, h_coarse: float, growth: float):
    a0 = geometry.a0
    boxes = _hole_boxes(geometry)
    size_x = BandSize(a0 - geometry.fine_behind, a0 + geometry.fine_length, h, h_coarse, growth)
    size_y = BandSize(-geometry.fine_height, geometry.fine_height, h, h_coarse, growth)
    x_breaks = [geometry.front, boxes[0][0], boxes[0][1], a0 - geometry.fine_behind, a0, a0 + geometry.fine_length, geometry.W]
    y_breaks = [-geometry.half_height, geometry.half_height, -geometry.fine_height, 0.0, geometry.fine_height]
    for _, _, y0, y1, _ in boxes:
        y_breaks += [y0, y1]
    xs = sized_axis(sorted(x_breaks), size_x)
    ys = sized_axis(sorted(y_breaks), size_y)

    grid = tensor_patch(xs, ys)
    gx, gy = grid[:, 0, 0], grid[0, :, 1]
    cut = np.zeros(grid[1::2, 1::2, 0].shape, dtype=bool)
    for x0, x1, y0, y1, _ in boxes:
        cut |= box_mask(grid, x0, x1, y0, y1)

    builder = MeshBuilder(tolerance=1e-9 * geometry.W)
    builder.add_patch(grid, "body", mask=~cut)
    for name, (x0, x1, y0, y1, cy) in zip(("upper_hole", "lower_hole"), boxes):
        bx = gx[axis_index(gx, x0): axis_index(gx, x1) + 1]
        by = gy[axis_index(gy, y0): axis_index(gy, y1) + 1]
        loop = box_polyline(bx, by, "brtl")
        depth = 0.5 * (x1 - x0) - geometry.hole_radius
        layers = ring_layers(depth, min(size_x(x0), size_y(y0), size_y(y1)), 1.0)
        builder.add_patch(ring_patch(loop, (0.0, cy), geometry.hole_radius, layers), name)
    mesh = builder.build()

    centroids = mesh.coords[mesh.elements[:, :4]].mean(axis=1)
    in_band = (
        (centroids[:, 0] > a0 - geometry.fine_behind)
        & (centroids[:, 0] < a0 + geometry.fine_length)
        & (np.abs(centroids[:, 1]) < geometry.fine_height)
    )
    mesh.element_sets["crack_zone"] = np.nonzero(in_band)[0]
    return mesh


def build_compact_tension(spec: CaseSpec) -> BuiltCase:
    if spec.kind != COMPACT_TENSION or not isinstance(spec.geometry, CompactTensionGeometry):
        raise ConfigError("case.kind", "compact-tension builder needs compact_tension geometry")
    geometry = spec.geometry
    mesh = compact_tension_mesh(geometry, spec.mesh.h, spec.mesh.h_coarse, spec.mesh.growth)

    x, y = mesh.coords[:, 0], mesh.coords[:, 1]
    tol = 1e-9 * geometry.W
    r = geometry.hole_radius
    on_line = np.abs(y) <= tol
    seed = nodes_where(on_line & (x <= geometry.a0 + tol))
    ligament = nodes_where(on_line & (x >= geometry.a0 - tol))
    upper = nodes_where(np.abs(np.hypot(x, y - geometry.hole_offset) - r) <= 1e-7 * r)
    lower = nodes_where(np.abs(np.hypot(x, y + geometry.hole_offset) - r) <= 1e-7 * r)
    mesh.node_sets.update(notch=seed, ligament=ligament, upper_pin=upper, lower_pin=lower)

    program = (
        Constraints()
        .fix(upper, 0, 0.0)
        .fix(lower, 0, 0.0)
        .fix(upper, 1, 0.5)
        .fix(lower, 1, -0.5)
        .program(phi_seed=seed)
    )
    logger.info("mesh nodes=%d elements=%d pins=%d+%d seed=%d", mesh.n_nodes, mesh.n_elements, upper.size, lower.size, seed.size)
    tip = (geometry.a0, 0.0)
    return BuiltCase(
        mesh=mesh,
        program=program,
        crack_path=sorted_along(mesh, ligament, tip),
        tip=tip,
        reaction_dofs=2 * upper + 1,
        opposite_dofs=2 * lower + 1,
    )
