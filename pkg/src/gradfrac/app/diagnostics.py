"""`gradfrac-doctor`: environment report plus two small numerical self-checks."""

from __future__ import annotations

import logging
import sys
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from gradfrac import __version__
from gradfrac.core.config import apply_thread_cap, settings
from gradfrac.core.errors import GradFracError
from gradfrac.core.logs import setup_logging
from gradfrac.fem.meshgen import MeshBuilder, tensor_patch
from gradfrac.physics.material import MaterialParams, elastic_moduli
from gradfrac.physics.phasefield import FractureParams, homogeneous_response
from gradfrac.solver.assembly import Discretisation, assemble_displacement, assemble_phase_field
from gradfrac.solver.linear import GlobalSystem

logger = logging.getLogger("gradfrac.diag")

PACKAGES = ("numpy", "scipy", "numba", "meshio", "python-dotenv")


def _patch_discretisation() -> Discretisation:
    axis = np.array([0.0, 0.4, 1.0])
    builder = MeshBuilder(tolerance=1e-9)
    builder.add_patch(tensor_patch(axis, axis), "patch")
    return Discretisation.from_mesh(builder.build())


def patch_test(material: MaterialParams, strain: float = 1e-4) -> float:
    """Max relative out-of-balance force on interior nodes under a uniform strain field."""
    disc = _patch_discretisation()
    x, y = disc.mesh.coords.T
    u = np.zeros(disc.dofs.n_u)
    u[0::2] = strain * x
    u[1::2] = 0.5 * strain * y
    eps = disc.strains(u)
    stress = eps @ elastic_moduli(material).T
    tangent = np.broadcast_to(elastic_moduli(material), (disc.n_gauss, 4, 4))
    fracture = FractureParams(Gc=1.0, ell_f=1.0)
    _, force = assemble_displacement(disc, stress, tangent, np.zeros(disc.mesh.n_nodes), fracture)
    boundary = (np.minimum(x, y) < 1e-12) | (np.maximum(x, y) > 1.0 - 1e-12)
    interior = np.nonzero(~boundary)[0]
    scale = float(np.abs(force).max())
    return float(np.abs(force[np.concatenate([2 * interior, 2 * interior + 1])]).max()) / scale


def homogeneous_phase_field_check(strain: float = 2e-3) -> float:
    """Relative error of the uniform-patch phase field against the closed form."""
    E = 1000.0
    fracture = FractureParams(Gc=1.0, ell_f=0.2)
    disc = _patch_discretisation()
    drive = np.full(disc.n_gauss, 0.5 * E * strain**2)
    k, r = assemble_phase_field(disc, np.zeros(disc.mesh.n_nodes), drive, fracture)
    phi = GlobalSystem.from_parts(k, r, np.zeros(0, dtype=np.int64)).correction()
    expected, _ = homogeneous_response(strain, E, fracture)
    return float(np.abs(phi - expected).max() / expected)


def main() -> int:
    setup_logging(settings.log_level)
    logger.info("gradfrac=%s python=%s", __version__, sys.version.split()[0])
    for name in PACKAGES:
        try:
            logger.info("%s=%s", name, version(name))
        except PackageNotFoundError:
            logger.error("%s: not installed", name)
            return 1
    logger.info("numba threads=%d (GRADFRAC_THREADS=%d)", apply_thread_cap(settings.threads), settings.threads)

    try:
        patch = patch_test(MaterialParams(E=200000.0, nu=0.3, sigma_Y=400.0))
        pf = homogeneous_phase_field_check()
    except GradFracError as exc:
        logger.error("self-check failed: %s", exc)
        return 1
    ok = patch < 1e-10 and pf < 1e-8
    logger.info("patch test interior imbalance=%.2e %s", patch, "ok" if patch < 1e-10 else "FAILED")
    logger.info("homogeneous phase field error=%.2e %s", pf, "ok" if pf < 1e-8 else "FAILED")
    logger.info("ok" if ok else "failed")
    return 0 if ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
