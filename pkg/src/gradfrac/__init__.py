"""Phase-field fracture with mechanism-based strain gradient plasticity."""

from .paths import CONFIGS_DIR, PROJECT_ROOT, SRC_ROOT

__version__ = "0.1.0"

__all__ = ["CONFIGS_DIR", "PROJECT_ROOT", "SRC_ROOT", "__version__"]
