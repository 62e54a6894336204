"""Half boundary-layer model loaded by the mode I K-field.

Block layout: a tensor-product rectangle [-b, b] x [0, b] holding the
refined strip along the ligament, surrounded by one ring block that
carries the rectangle's right, top and left sides out to the semicircle
of radius R. The crack lies on y = 0, x < 0 with its tip at the origin.
"""

from __future__ import annotations

import logging

import numpy as np

from gradfrac.cases.reference import williams_displacement
from gradfrac.cases.spec import BOUNDARY_LAYER, BoundaryLayerGeometry, BuiltCase, CaseSpec, Constraints
from gradfrac.core.errors import ConfigError
from gradfrac.fem.meshgen import (
    BandSize,
    MeshBuilder,
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


def boundary_layer_mesh(geometry: BoundaryLayerGeometry, h: float, h_coarse: float, growth: float):
    b, R = geometry.box_size, geometry.outer_radius
    size_x = BandSize(-geometry.fine_behind, geometry.fine_length, h, h_coarse, growth)
    size_y = BandSize(0.0, geometry.fine_height, h, h_coarse, growth)
    xs = sized_axis([-b, -geometry.fine_behind, 0.0, geometry.fine_length, b], size_x)
    ys = sized_axis([0.0, geometry.fine_height, b], size_y)

    builder = MeshBuilder(tolerance=1e-9 * R)
    grid = tensor_patch(xs, ys)
    builder.add_patch(grid, "inner")

    rim = box_polyline(with_midpoints(xs), with_midpoints(ys), "rtl")
    layers = ring_layers(R - b, size_x(b), growth)
    builder.add_patch(ring_patch(rim, (0.0, 0.0), R, layers, growth), "outer")
    mesh = builder.build()

    centroids = mesh.coords[mesh.elements[:, :4]].mean(axis=1)
    in_band = (
        (centroids[:, 0] > -geometry.fine_behind)
        & (centroids[:, 0] < geometry.fine_length)
        & (centroids[:, 1] < geometry.fine_height)
    )
    mesh.element_sets["crack_zone"] = np.nonzero(in_band)[0]
    return mesh


def build_boundary_layer(spec: CaseSpec) -> BuiltCase:
    if spec.kind != BOUNDARY_LAYER or not isinstance(spec.geometry, BoundaryLayerGeometry):
        raise ConfigError("case.kind", "boundary-layer builder needs boundary_layer geometry")
    geometry = spec.geometry
    R = geometry.outer_radius
    mesh = boundary_layer_mesh(geometry, spec.mesh.h, spec.mesh.h_coarse, spec.mesh.growth)

    x, y = mesh.coords[:, 0], mesh.coords[:, 1]
    tol = 1e-9 * R
    on_axis = np.abs(y) <= tol
    ligament = nodes_where(on_axis & (x >= -tol))
    crack_face = nodes_where(on_axis & (x < -tol))
    radius = np.hypot(x, y)
    rim = nodes_where(np.abs(radius - R) <= 1e-7 * R)
    mesh.node_sets.update(ligament=ligament, crack_face=crack_face, rim=rim)

    theta = np.arctan2(np.maximum(y[rim], 0.0), x[rim])
    ux, uy = williams_displacement(1.0, radius[rim], theta, spec.material.E, spec.material.nu)
    program = (
        Constraints()
        .fix(ligament, 1, 0.0)
        .fix(rim, 0, ux)
        .fix(rim, 1, uy)
        .program(phi_seed=crack_face)
    )
    logger.info("mesh nodes=%d elements=%d rim=%d seed=%d", mesh.n_nodes, mesh.n_elements, rim.size, crack_face.size)
    return BuiltCase(
        mesh=mesh,
        program=program,
        crack_path=sorted_along(mesh, ligament, (0.0, 0.0)),
        tip=(0.0, 0.0),
        reaction_dofs=2 * ligament + 1,
    )
