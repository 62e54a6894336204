"""Exception hierarchy for configuration, meshing and solution failures."""

from __future__ import annotations

from pathlib import Path


class GradFracError(Exception):
    """Base class for every error raised by gradfrac."""


class ConfigError(GradFracError):
    def __init__(self, key: str, message: str, unit: str | None = None):
        self.key = key
        self.unit = unit
        suffix = f" [{unit}]" if unit else ""
        super().__init__(f"{key}: {message}{suffix}")


class ParameterError(GradFracError):
    pass


class MeshError(GradFracError):
    pass


class DistortedElementError(MeshError):
    def __init__(self, element: int, det_j: float):
        self.element = int(element)
        self.det_j = float(det_j)
        super().__init__(f"element {self.element} is distorted (detJ={self.det_j:.3e})")


class LocalNewtonError(GradFracError):
    """Gauss-point update failed; the caller should cut the increment."""


class NewtonDivergenceError(GradFracError):
    def __init__(self, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"Newton did not converge after {iterations} iterations (residual={residual:.3e})")


class SingularSystemError(GradFracError):
    def __init__(self, message: str, rigid_modes: list[str] | None = None):
        self.rigid_modes = list(rigid_modes or [])
        if self.rigid_modes:
            message = f"{message}; unconstrained rigid modes: {', '.join(self.rigid_modes)}"
        super().__init__(message)


class IncrementAbortError(GradFracError):
    def __init__(self, load: float, dump_path: Path | None):
        self.load = load
        self.dump_path = dump_path
        where = f", state dumped to {dump_path}" if dump_path else ""
        super().__init__(f"increment to load={load:.6g} aborted after all cutbacks{where}")
