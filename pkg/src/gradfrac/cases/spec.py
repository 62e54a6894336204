"""Declarative description of a benchmark run and its per-step results."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from gradfrac.core.errors import ConfigError
from gradfrac.fem.mesh import Mesh
from gradfrac.physics.material import MaterialParams
from gradfrac.physics.phasefield import FractureParams
from gradfrac.solver.staggered import DirichletProgram, SolverConfig

BOUNDARY_LAYER = "boundary_layer"
COMPACT_TENSION = "compact_tension"
DOUBLE_NOTCH = "double_notch"
CASE_KINDS = (BOUNDARY_LAYER, COMPACT_TENSION, DOUBLE_NOTCH)

# crack path zone must resolve the phase-field length with this many elements
ELEMENTS_PER_LENGTH = 5.0


def _positive(section: str, values: dict[str, float]) -> None:
    for name, value in values.items():
        if not value > 0.0:
            raise ConfigError(f"{section}.{name}", f"must be > 0, got {value}", "mm")


@dataclass(frozen=True)
class BoundaryLayerGeometry:
    outer_radius: float = 500.0
    box_size: float = 10.0
    fine_length: float = 4.0
    fine_height: float = 0.6
    fine_behind: float = 0.5

    def __post_init__(self) -> None:
        _positive("geometry", vars(self))
        if self.box_size >= self.outer_radius:
            raise ConfigError("geometry.box_size", "must be smaller than geometry.outer_radius", "mm")
        if self.fine_length >= self.box_size or self.fine_height >= self.box_size or self.fine_behind >= self.box_size:
            raise ConfigError("geometry.fine_length", "refined strip must fit inside geometry.box_size", "mm")


@dataclass(frozen=True)
class CompactTensionGeometry:
    W: float = 25.0
    a0: float = 12.5
    thickness: float = 4.0
    fine_length: float = 4.0
    fine_height: float = 0.5
    fine_behind: float = 0.3

    def __post_init__(self) -> None:
        _positive("geometry", vars(self))
        if not 0.3 * self.W < self.a0 < 0.9 * self.W:
            raise ConfigError("geometry.a0", f"must lie in (0.3 W, 0.9 W), got {self.a0}", "mm")
        if self.a0 + self.fine_length > self.W:
            raise ConfigError("geometry.fine_length", "refined strip runs past the back face", "mm")
        if self.fine_height >= 0.07 * self.W:
            raise ConfigError("geometry.fine_height", "refined strip reaches the pin holes", "mm")

    @property
    def front(self) -> float:
        return -0.25 * self.W

    @property
    def half_height(self) -> float:
        return 0.6 * self.W

    @property
    def hole_radius(self) -> float:
        return 0.125 * self.W

    @property
    def hole_offset(self) -> float:
        return 0.275 * self.W


@dataclass(frozen=True)
class DoubleNotchGeometry:
    width: float = 10.0
    height: float = 30.0
    notch_radius: float = 2.5
    left_notch_y: float = 16.0
    right_notch_y: float = 14.0
    thickness: float = 1.0
    fine_x0: float = 2.0
    fine_x1: float = 8.0
    fine_y0: float = 13.0
    fine_y1: float = 17.0

    def __post_init__(self) -> None:
        _positive("geometry", {k: getattr(self, k) for k in ("width", "height", "notch_radius", "thickness")})
        if 2.0 * self.notch_radius >= self.width:
            raise ConfigError("geometry.notch_radius", "notches overlap across the width", "mm")
        for key in ("left_notch_y", "right_notch_y"):
            y = getattr(self, key)
            if not 2.0 * self.notch_radius < y < self.height - 2.0 * self.notch_radius:
                raise ConfigError(f"geometry.{key}", "notch too close to the loaded edges", "mm")
        if not (0.0 <= self.fine_x0 < self.fine_x1 <= self.width and 0.0 <= self.fine_y0 < self.fine_y1 <= self.height):
            raise ConfigError("geometry.fine_x0", "refined box must lie inside the bar", "mm")

    @property
    def notch_box(self) -> float:
        """Half-size of the square block around each notch."""
        return min(1.4 * self.notch_radius, 0.5 * self.width - 0.5 * self.notch_radius)


Geometry = BoundaryLayerGeometry | CompactTensionGeometry | DoubleNotchGeometry


@dataclass(frozen=True)
class MeshControls:
    h: float
    h_coarse: float
    growth: float = 1.2

    def __post_init__(self) -> None:
        _positive("mesh", {"h": self.h, "h_coarse": self.h_coarse})
        if self.h_coarse < self.h:
            raise ConfigError("mesh.h_coarse", "must be >= mesh.h", "mm")
        if not 1.0 < self.growth <= 2.0:
            raise ConfigError("mesh.growth", f"must lie in (1, 2], got {self.growth}")


@dataclass(frozen=True)
class LoadControls:
    """Load parameter schedule: K_I in MPa*sqrt(mm) or u in mm."""

    maximum: float
    unload_to: float | None = None

    def schedule(self, n_increments: int) -> np.ndarray:
        loads = np.linspace(0.0, self.maximum, n_increments + 1)[1:]
        if self.unload_to is not None:
            back = np.linspace(self.maximum, self.unload_to, n_increments // 2 + 2)[1:]
            loads = np.concatenate([loads, back])
        return loads


@dataclass(frozen=True)
class CaseSpec:
    kind: str
    geometry: Geometry
    material: MaterialParams
    fracture: FractureParams
    solver: SolverConfig
    mesh: MeshControls
    loading: LoadControls

    def __post_init__(self) -> None:
        if self.kind not in CASE_KINDS:
            raise ConfigError("case.kind", f"must be one of {', '.join(CASE_KINDS)}, got {self.kind!r}")
        limit = self.fracture.ell_f / ELEMENTS_PER_LENGTH
        if self.mesh.h > limit * (1.0 + 1e-9):
            raise ConfigError("mesh.h", f"must be <= ell_f/5 = {limit:.4g} in the crack path zone, got {self.mesh.h}", "mm")

    @property
    def thickness(self) -> float:
        return getattr(self.geometry, "thickness", 1.0)


class Constraints:
    """Collects prescribed displacement dofs; a later ``fix`` overrides an earlier one."""

    def __init__(self) -> None:
        self._unit: dict[int, float] = {}

    def fix(self, nodes: np.ndarray, component: int, unit=0.0) -> "Constraints":
        nodes = np.asarray(nodes, dtype=np.int64)
        values = np.broadcast_to(np.asarray(unit, dtype=np.float64), nodes.shape)
        for node, value in zip(nodes.tolist(), values.tolist()):
            self._unit[2 * node + component] = value
        return self

    def program(self, phi_seed: np.ndarray) -> DirichletProgram:
        dofs = np.array(sorted(self._unit), dtype=np.int64)
        unit = np.array([self._unit[d] for d in dofs.tolist()], dtype=np.float64)
        return DirichletProgram(u_dofs=dofs, unit=unit, phi_seed=phi_seed)


@dataclass(frozen=True)
class BuiltCase:
    """Mesh and boundary program of one case plus the sets used by postprocessing."""

    mesh: Mesh
    program: DirichletProgram
    crack_path: np.ndarray
    tip: tuple[float, float]
    reaction_dofs: np.ndarray
    opposite_dofs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))


@dataclass(frozen=True)
class LoadStepResult:
    step: int
    load: float
    reaction: float  # N/mm
    force_kN: float
    delta_a: float  # mm
    max_phi: float
    plastic_zone_area: float  # mm^2
    plastic_zone_radius: float  # mm
    elastic_energy: float  # N*mm/mm
    plastic_work: float
    fracture_energy: float
    iterations: int
    cutbacks: int
