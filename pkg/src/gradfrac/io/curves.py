"""Load-step tables as CSV with units and normalising constants in the header."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from gradfrac.cases.spec import BOUNDARY_LAYER, LoadStepResult


@dataclass(frozen=True)
class Normalization:
    K0: float  # MPa*sqrt(mm)
    R0: float  # mm
    thickness: float = 1.0  # mm


_COMMON = (
    ("max_phi", "-", lambda r, n: r.max_phi),
    ("plastic_zone_area", "mm^2", lambda r, n: r.plastic_zone_area),
    ("plastic_zone_radius", "mm", lambda r, n: r.plastic_zone_radius),
    ("elastic_energy", "N*mm/mm", lambda r, n: r.elastic_energy),
    ("plastic_work", "N*mm/mm", lambda r, n: r.plastic_work),
    ("fracture_energy", "N*mm/mm", lambda r, n: r.fracture_energy),
    ("iterations", "-", lambda r, n: r.iterations),
    ("cutbacks", "-", lambda r, n: r.cutbacks),
)

BOUNDARY_LAYER_COLUMNS = (
    ("K_I", "MPa*sqrt(mm)", lambda r, n: r.load),
    ("K_I/K0", "-", lambda r, n: r.load / n.K0),
    ("delta_a", "mm", lambda r, n: r.delta_a),
    ("delta_a/R0", "-", lambda r, n: r.delta_a / n.R0),
    ("reaction", "N/mm", lambda r, n: r.reaction),
) + _COMMON

SPECIMEN_COLUMNS = (
    ("u", "mm", lambda r, n: r.load),
    ("force", "kN", lambda r, n: r.force_kN),
    ("reaction", "N/mm", lambda r, n: r.reaction),
    ("delta_a", "mm", lambda r, n: r.delta_a),
) + _COMMON


def columns_for(kind: str):
    return BOUNDARY_LAYER_COLUMNS if kind == BOUNDARY_LAYER else SPECIMEN_COLUMNS


def write_curves(path: Path, kind: str, results: list[LoadStepResult], norm: Normalization) -> Path:
    if not results:
        raise ValueError("no load steps to write")
    columns = columns_for(kind)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        fh.write(f"# case={kind} K0={norm.K0!r} MPa*sqrt(mm) R0={norm.R0!r} mm thickness={norm.thickness!r} mm\n")
        writer = csv.writer(fh)
        writer.writerow([f"{name} [{unit}]" for name, unit, _ in columns])
        for result in results:
            writer.writerow([_cell(get(result, norm)) for _, _, get in columns])
    return path


def _cell(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def read_curves(path: Path) -> dict[str, np.ndarray]:
    """Columns of a curve file keyed by bare name (units stripped)."""
    with Path(path).open(encoding="utf-8") as fh:
        rows = [line for line in fh if not line.startswith("#")]
    reader = csv.reader(rows)
    header = [h.split(" [")[0] for h in next(reader)]
    data = np.array([[float(v) for v in row] for row in reader if row], dtype=np.float64)
    return {name: data[:, k] for k, name in enumerate(header)}
