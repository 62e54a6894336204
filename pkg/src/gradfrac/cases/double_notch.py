"""Plane-strain bar with two offset semicircular edge notches.

Block layout: a tensor-product rectangle over the bar with a square box cut
out around each notch centre; each cut-out is filled by an open ring
block (three box sides to the notch arc). The crack path is not known in
advance, so crack extension comes from the crack length functional.
"""

from __future__ import annotations

import logging

import numpy as np

from gradfrac.cases.spec import DOUBLE_NOTCH, BuiltCase, CaseSpec, Constraints, DoubleNotchGeometry
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
    tensor_patch,
)

logger = logging.getLogger(__name__)


def _notch_boxes(geometry: DoubleNotchGeometry):
    """(x0, x1, y0, y1, centre, walk) per notch; walks skip the free edge."""
    a, w = geometry.notch_box, geometry.width
    yl, yr = geometry.left_notch_y, geometry.right_notch_y
    return [
        (0.0, a, yl - a, yl + a, (0.0, yl), "brt"),
        (w - a, w, yr - a, yr + a, (w, yr), "tlb"),
    ]


def double_notch_mesh(geometry: DoubleNotchGeometry, h: float, h_coarse: float, growth: float):
    boxes = _notch_boxes(geometry)
    size_x = BandSize(geometry.fine_x0, geometry.fine_x1, h, h_coarse, growth)
    size_y = BandSize(geometry.fine_y0, geometry.fine_y1, h, h_coarse, growth)
    x_breaks = {0.0, geometry.width, geometry.fine_x0, geometry.fine_x1}
    y_breaks = {0.0, geometry.height, geometry.fine_y0, geometry.fine_y1}
    for x0, x1, y0, y1, _, _ in boxes:
        x_breaks |= {x0, x1}
        y_breaks |= {y0, y1}
    xs = sized_axis(sorted(x_breaks), size_x)
    ys = sized_axis(sorted(y_breaks), size_y)

    grid = tensor_patch(xs, ys)
    gx, gy = grid[:, 0, 0], grid[0, :, 1]
    cut = np.zeros(grid[1::2, 1::2, 0].shape, dtype=bool)
    for x0, x1, y0, y1, _, _ in boxes:
        cut |= box_mask(grid, x0, x1, y0, y1)

    builder = MeshBuilder(tolerance=1e-9 * geometry.height)
    builder.add_patch(grid, "body", mask=~cut)
    depth = geometry.notch_box - geometry.notch_radius
    for name, (x0, x1, y0, y1, centre, walk) in zip(("left_notch", "right_notch"), boxes):
        bx = gx[axis_index(gx, x0): axis_index(gx, x1) + 1]
        by = gy[axis_index(gy, y0): axis_index(gy, y1) + 1]
        polyline = box_polyline(bx, by, walk)
        side = size_x(x1) if walk == "brt" else size_x(x0)
        layers = ring_layers(depth, min(side, size_y(centre[1])), 1.0)
        builder.add_patch(ring_patch(polyline, centre, geometry.notch_radius, layers), name)
    mesh = builder.build()

    centroids = mesh.coords[mesh.elements[:, :4]].mean(axis=1)
    in_box = (
        (centroids[:, 0] > geometry.fine_x0)
        & (centroids[:, 0] < geometry.fine_x1)
        & (centroids[:, 1] > geometry.fine_y0)
        & (centroids[:, 1] < geometry.fine_y1)
    )
    mesh.element_sets["crack_zone"] = np.nonzero(in_box)[0]
    return mesh


def build_double_notch(spec: CaseSpec) -> BuiltCase:
    if spec.kind != DOUBLE_NOTCH or not isinstance(spec.geometry, DoubleNotchGeometry):
        raise ConfigError("case.kind", "double-notch builder needs double_notch geometry")
    geometry = spec.geometry
    mesh = double_notch_mesh(geometry, spec.mesh.h, spec.mesh.h_coarse, spec.mesh.growth)

    x, y = mesh.coords[:, 0], mesh.coords[:, 1]
    tol = 1e-9 * geometry.height
    bottom = nodes_where(np.abs(y) <= tol)
    top = nodes_where(np.abs(y - geometry.height) <= tol)
    corner = nodes_where((np.abs(x) <= tol) & (np.abs(y) <= tol))
    mesh.node_sets.update(bottom=bottom, top=top, corner=corner)

    program = (
        Constraints()
        .fix(bottom, 1, 0.0)
        .fix(corner, 0, 0.0)
        .fix(top, 1, 1.0)
        .program(phi_seed=np.zeros(0, dtype=np.int64))
    )
    logger.info("mesh nodes=%d elements=%d top=%d bottom=%d", mesh.n_nodes, mesh.n_elements, top.size, bottom.size)
    return BuiltCase(
        mesh=mesh,
        program=program,
        crack_path=np.zeros(0, dtype=np.int64),
        tip=(geometry.notch_radius, geometry.left_notch_y),
        reaction_dofs=2 * top + 1,
        opposite_dofs=2 * bottom + 1,
    )
