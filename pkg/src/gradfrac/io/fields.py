"""Field snapshots as VTK-XML unstructured grids (.vtu, quad8 cells)."""

from __future__ import annotations

import logging
from pathlib import Path

import meshio
import numpy as np

from gradfrac.fem.mesh import Mesh
from gradfrac.physics.material import dislocation_densities
from gradfrac.solver.staggered import Model, SolverState

logger = logging.getLogger(__name__)

SIGMA_COMPONENTS = ("xx", "yy", "zz", "xy")


def cell_average(gauss_values: np.ndarray, n_elements: int) -> np.ndarray:
    """Mean over the 4 Gauss points of every element."""
    values = np.asarray(gauss_values, dtype=np.float64)
    return values.reshape((n_elements, 4) + values.shape[1:]).mean(axis=1)


def gather_fields(model: Model, state: SolverState, names) -> tuple[dict, dict]:
    """Nodal and Gauss-point arrays for the requested snapshot fields."""
    gp, disc = state.gp, model.disc
    nodal: dict[str, np.ndarray] = {}
    gauss: dict[str, np.ndarray] = {}
    wanted = set(names)
    if "u" in wanted:
        nodal["u"] = state.u.reshape(-1, 2)
    if "phi" in wanted:
        nodal["phi"] = state.phi
    for key in ("eps_p_eq", "eta_p", "psi_p", "H_plus"):
        if key in wanted:
            gauss[key] = getattr(gp, key)
    if "sigma" in wanted:
        g = disc.degradation_at_gauss(state.phi, model.fracture.kappa).reshape(-1, 1)
        gauss["sigma"] = g * gp.sigma0
    if wanted & {"rho_S", "rho_G"}:
        rho_s, rho_g = dislocation_densities(gp.eps_p_eq, gp.eta_p, model.material)
        if "rho_S" in wanted:
            gauss["rho_S"] = rho_s
        if "rho_G" in wanted:
            gauss["rho_G"] = rho_g
    return nodal, gauss


def _to_meshio(mesh: Mesh, nodal: dict, gauss: dict) -> meshio.Mesh:
    points = np.column_stack([mesh.coords, np.zeros(mesh.n_nodes)])
    point_data = {}
    for name, values in nodal.items():
        values = np.asarray(values, dtype=np.float64)
        if values.ndim == 2 and values.shape[1] == 2:
            values = np.column_stack([values, np.zeros(values.shape[0])])
        point_data[name] = values
    cell_data = {}
    for name, values in gauss.items():
        averaged = cell_average(values, mesh.n_elements)
        if averaged.ndim == 2 and name == "sigma":
            for k, comp in enumerate(SIGMA_COMPONENTS):
                cell_data[f"sigma_{comp}"] = [averaged[:, k]]
        else:
            cell_data[name] = [averaged]
    return meshio.Mesh(points, [("quad8", mesh.elements)], point_data=point_data, cell_data=cell_data)


def write_fields(directory: Path, mesh: Mesh, step: int, nodal: dict, gauss: dict) -> Path | None:
    """Write ``step_<n>.vtu``; an IO failure is logged and returns None."""
    path = Path(directory) / f"step_{step:05d}.vtu"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        meshio.write(path, _to_meshio(mesh, nodal, gauss), file_format="vtu")
    except OSError as exc:
        logger.warning("snapshot step=%d not written: %s", step, exc)
        return None
    logger.debug("snapshot step=%d path=%s", step, path)
    return path


def read_fields(path: Path) -> meshio.Mesh:
    return meshio.read(path)
