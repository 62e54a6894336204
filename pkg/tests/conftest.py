import numpy as np
import pytest

from gradfrac.fem.mesh import Mesh
from gradfrac.fem.meshgen import MeshBuilder, tensor_patch
from gradfrac.physics.material import LINEAR, MaterialParams
from gradfrac.physics.phasefield import FractureParams

# corners CCW from (0, 0), then midsides 12 23 34 41
UNIT_SQUARE = np.array(
    [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.0], [1.0, 0.5], [0.5, 1.0], [0.0, 0.5]]
)


def q8_square(size: float = 1.0, origin=(0.0, 0.0)) -> Mesh:
    coords = UNIT_SQUARE * size + np.asarray(origin)
    return Mesh(coords=coords, elements=np.arange(8)[None, :])


def rect_mesh(xs, ys) -> Mesh:
    builder = MeshBuilder(tolerance=1e-9)
    builder.add_patch(tensor_patch(np.asarray(xs, float), np.asarray(ys, float)), "body")
    return builder.build()


@pytest.fixture
def square():
    return q8_square()


@pytest.fixture
def steel():
    """Power-law solid with sigma_Y/E = 0.003, N = 0.2."""
    return MaterialParams(E=200000.0, nu=0.3, sigma_Y=600.0, N=0.2)


@pytest.fixture
def aluminium():
    return MaterialParams(E=71480.0, nu=0.3, sigma_Y=345.0, N=0.2)


@pytest.fixture
def linear_hardening():
    return MaterialParams(E=71480.0, nu=0.3, sigma_Y=345.0, hardening=LINEAR, E_t=714.8)


@pytest.fixture
def ct_fracture():
    return FractureParams(Gc=9.31, ell_f=0.15)
