"""TOML run configuration: parsing, validation, overrides and the log header.

Every physical value is in mm, N, MPa; Gc in MPa*mm (= N/mm) and K in
MPa*sqrt(mm).
"""

from __future__ import annotations

import copy
import tomllib
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

from gradfrac.cases.reference import reference_length, reference_quantities
from gradfrac.cases.spec import (
    BOUNDARY_LAYER,
    CASE_KINDS,
    COMPACT_TENSION,
    DOUBLE_NOTCH,
    ELEMENTS_PER_LENGTH,
    BoundaryLayerGeometry,
    CaseSpec,
    CompactTensionGeometry,
    DoubleNotchGeometry,
    LoadControls,
    MeshControls,
)
from gradfrac.core.errors import ConfigError, ParameterError
from gradfrac.physics.material import POWER_LAW, MaterialParams
from gradfrac.physics.phasefield import FractureParams, length_for_strength
from gradfrac.solver.staggered import SolverConfig

GEOMETRIES = {
    BOUNDARY_LAYER: BoundaryLayerGeometry,
    COMPACT_TENSION: CompactTensionGeometry,
    DOUBLE_NOTCH: DoubleNotchGeometry,
}

FIELD_CHOICES = ("u", "phi", "eps_p_eq", "eta_p", "sigma", "psi_p", "H_plus", "rho_S", "rho_G")
DEFAULT_FIELDS = ("u", "phi", "eps_p_eq", "eta_p", "sigma", "psi_p")

# key -> (type, unit); geometry keys come from the geometry dataclasses
_FLOAT, _INT, _STR, _BOOL, _LIST = float, int, str, bool, list
SCHEMA: dict[str, dict[str, tuple[type, str | None]]] = {
    "case": {"kind": (_STR, None), "name": (_STR, None), "deterministic": (_BOOL, None)},
    "material": {
        "E": (_FLOAT, "MPa"),
        "nu": (_FLOAT, None),
        "sigma_Y": (_FLOAT, "MPa"),
        "hardening": (_STR, None),
        "N": (_FLOAT, None),
        "E_t": (_FLOAT, "MPa"),
        "ell_p": (_FLOAT, "mm"),
        "ell_p_over_R0": (_FLOAT, None),
        "m": (_FLOAT, None),
        "alpha": (_FLOAT, None),
        "M": (_FLOAT, None),
        "r_bar": (_FLOAT, None),
        "b": (_FLOAT, "mm"),
    },
    "fracture": {
        "Gc": (_FLOAT, "MPa*mm"),
        "ell_f": (_FLOAT, "mm"),
        "strength_ratio": (_FLOAT, None),
        "kappa": (_FLOAT, None),
        "driving_force": (_STR, None),
        "split": (_STR, None),
    },
    "solver": {
        "n_increments": (_INT, None),
        "newton_tol": (_FLOAT, None),
        "newton_max_iter": (_INT, None),
        "staggered_passes": (_INT, None),
        "cutback_factor": (_FLOAT, None),
        "max_cutbacks": (_INT, None),
        "max_phi_increment": (_FLOAT, None),
        "step_recovery": (_INT, None),
    },
    "mesh": {"h": (_FLOAT, "mm"), "h_coarse": (_FLOAT, "mm"), "growth": (_FLOAT, None)},
    "loading": {
        "maximum": (_FLOAT, None),
        "maximum_over_K0": (_FLOAT, None),
        "unload_to": (_FLOAT, None),
    },
    "output": {
        "directory": (_STR, None),
        "snapshots": (_BOOL, None),
        "snapshot_interval": (_INT, None),
        "fields": (_LIST, None),
        "dump_on_abort": (_BOOL, None),
    },
}
REQUIRED = {"case": ("kind",), "material": ("E", "nu", "sigma_Y"), "fracture": ("Gc",)}


@dataclass(frozen=True)
class OutputControls:
    directory: Path
    snapshots: bool = True
    snapshot_interval: int = 1
    fields: tuple[str, ...] = DEFAULT_FIELDS
    dump_on_abort: bool = True


@dataclass(frozen=True)
class RunConfig:
    name: str
    case: CaseSpec
    output: OutputControls
    deterministic: bool = False
    source: Path | None = None


def _check_type(key: str, value: Any, kind: type, unit: str | None) -> Any:
    if kind is _FLOAT:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(key, f"expected a number, got {value!r}", unit)
        return float(value)
    if kind is _INT:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(key, f"expected an integer, got {value!r}", unit)
        return value
    if not isinstance(value, kind):
        raise ConfigError(key, f"expected {kind.__name__}, got {value!r}", unit)
    return value


def _section(doc: dict, name: str, schema: dict[str, tuple[type, str | None]]) -> dict[str, Any]:
    raw = doc.get(name, {})
    if not isinstance(raw, dict):
        raise ConfigError(name, "must be a table")
    out = {}
    for key, value in raw.items():
        if key not in schema:
            raise ConfigError(f"{name}.{key}", "unknown key")
        kind, unit = schema[key]
        out[key] = _check_type(f"{name}.{key}", value, kind, unit)
    for key in REQUIRED.get(name, ()):
        if key not in out:
            kind, unit = schema[key]
            raise ConfigError(f"{name}.{key}", "missing required key", unit)
    return out


def _exclusive(section: str, values: dict, a: str, b: str) -> None:
    if a in values and b in values:
        raise ConfigError(f"{section}.{b}", f"give either {section}.{a} or {section}.{b}, not both")


def _build(section: str, factory, values: dict):
    """Construct a parameter dataclass, renaming its errors to dotted config keys."""
    try:
        return factory(**values)
    except ParameterError as exc:
        key = str(exc).split()[0]
        raise ConfigError(f"{section}.{key}", str(exc)) from exc


def _geometry(doc: dict, kind: str):
    cls = GEOMETRIES[kind]
    schema = {f.name: (_FLOAT, "mm") for f in fields(cls)}
    return cls(**_section(doc, "geometry", schema))


def apply_overrides(doc: dict, overrides: list[str]) -> dict:
    """Return a copy of ``doc`` with ``section.key=value`` assignments applied."""
    doc = copy.deepcopy(doc)
    for item in overrides:
        path, sep, text = item.partition("=")
        parts = path.strip().split(".")
        if not sep or len(parts) != 2 or not all(parts):
            raise ConfigError(path or item, "override must look like section.key=value")
        try:
            value = tomllib.loads(f"v = {text.strip()}")["v"]
        except tomllib.TOMLDecodeError:
            value = text.strip()
        section = doc.setdefault(parts[0], {})
        if not isinstance(section, dict):
            raise ConfigError(parts[0], "must be a table")
        section[parts[1]] = value
    return doc


def load_document(path: Path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"file not found: {path}")
    try:
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("config", f"{path}: {exc}") from exc


def config_from_document(doc: dict, source: Path | None = None) -> RunConfig:
    unknown = sorted(set(doc) - set(SCHEMA) - {"geometry"})
    if unknown:
        raise ConfigError(unknown[0], "unknown section")

    case = _section(doc, "case", SCHEMA["case"])
    kind = case["kind"]
    if kind not in CASE_KINDS:
        raise ConfigError("case.kind", f"must be one of {', '.join(CASE_KINDS)}, got {kind!r}")
    geometry = _geometry(doc, kind)

    mat = _section(doc, "material", SCHEMA["material"])
    frac = _section(doc, "fracture", SCHEMA["fracture"])
    _exclusive("material", mat, "ell_p", "ell_p_over_R0")
    _exclusive("fracture", frac, "ell_f", "strength_ratio")
    if mat.get("hardening", POWER_LAW) == POWER_LAW and "E_t" in mat:
        raise ConfigError("material.E_t", "only used with hardening = \"linear\"", "MPa")

    ell_p_over_R0 = mat.pop("ell_p_over_R0", None)
    material = _build("material", MaterialParams, mat)
    if ell_p_over_R0 is not None:
        if ell_p_over_R0 < 0.0:
            raise ConfigError("material.ell_p_over_R0", f"must be >= 0, got {ell_p_over_R0}")
        if not frac["Gc"] > 0.0:
            raise ConfigError("fracture.Gc", f"must be > 0, got {frac['Gc']}", "MPa*mm")
        material = material.with_length(ell_p_over_R0 * reference_length(material, frac["Gc"]))

    ratio = frac.pop("strength_ratio", None)
    if ratio is not None:
        if not ratio > 0.0:
            raise ConfigError("fracture.strength_ratio", f"must be > 0, got {ratio}")
        if not frac["Gc"] > 0.0:
            raise ConfigError("fracture.Gc", f"must be > 0, got {frac['Gc']}", "MPa*mm")
        frac["ell_f"] = length_for_strength(material.E, frac["Gc"], ratio, material.sigma_Y)
    if "ell_f" not in frac:
        raise ConfigError("fracture.ell_f", "missing; give fracture.ell_f or fracture.strength_ratio", "mm")
    fracture = _build("fracture", FractureParams, frac)

    solver = _build("solver", SolverConfig, _section(doc, "solver", SCHEMA["solver"]))

    mesh_raw = _section(doc, "mesh", SCHEMA["mesh"])
    h = mesh_raw.get("h", fracture.ell_f / ELEMENTS_PER_LENGTH)
    mesh = MeshControls(h=h, h_coarse=mesh_raw.get("h_coarse", 20.0 * h), growth=mesh_raw.get("growth", 1.2))

    load_raw = _section(doc, "loading", SCHEMA["loading"])
    _exclusive("loading", load_raw, "maximum", "maximum_over_K0")
    if "maximum_over_K0" in load_raw:
        if kind != BOUNDARY_LAYER:
            raise ConfigError("loading.maximum_over_K0", "only defined for the boundary_layer case")
        maximum = load_raw["maximum_over_K0"] * reference_quantities(material, fracture).K0
    elif "maximum" in load_raw:
        maximum = load_raw["maximum"]
    else:
        raise ConfigError("loading.maximum", "missing; give loading.maximum or loading.maximum_over_K0")
    if maximum == 0.0:
        raise ConfigError("loading.maximum", "must be nonzero")
    loading = LoadControls(maximum=maximum, unload_to=load_raw.get("unload_to"))

    spec = CaseSpec(kind=kind, geometry=geometry, material=material, fracture=fracture,
                    solver=solver, mesh=mesh, loading=loading)

    name = case.get("name") or (source.stem if source is not None else kind)
    out_raw = _section(doc, "output", SCHEMA["output"])
    interval = out_raw.get("snapshot_interval", 1)
    if interval < 1:
        raise ConfigError("output.snapshot_interval", f"must be >= 1, got {interval}")
    chosen = tuple(out_raw.get("fields", DEFAULT_FIELDS))
    bad = [f for f in chosen if f not in FIELD_CHOICES]
    if bad:
        raise ConfigError("output.fields", f"unknown field {bad[0]!r}; choose from {', '.join(FIELD_CHOICES)}")
    output = OutputControls(
        directory=Path(out_raw.get("directory", name)),
        snapshots=out_raw.get("snapshots", True),
        snapshot_interval=interval,
        fields=chosen,
        dump_on_abort=out_raw.get("dump_on_abort", True),
    )
    return RunConfig(name=name, case=spec, output=output,
                     deterministic=case.get("deterministic", False), source=source)


def parse_config(path: Path, overrides: list[str] | None = None) -> RunConfig:
    doc = apply_overrides(load_document(path), overrides or [])
    return config_from_document(doc, Path(path))


def log_header(config: RunConfig) -> list[str]:
    """Parameter echo with units and the derived reference quantities."""
    spec = config.case
    mat, frac = spec.material, spec.fracture
    ref = reference_quantities(mat, frac)
    lines = [
        f"case={spec.kind} name={config.name}",
        "geometry " + " ".join(f"{f.name}={getattr(spec.geometry, f.name):g}mm" for f in fields(spec.geometry)),
        f"material E={mat.E:g}MPa nu={mat.nu:g} sigma_Y={mat.sigma_Y:g}MPa hardening={mat.hardening} "
        + (f"N={mat.N:g}" if mat.hardening == POWER_LAW else f"E_t={mat.E_t:g}MPa")
        + f" ell_p={mat.ell_p:.6g}mm m={mat.m:g} alpha={mat.alpha:g} M={mat.M:g} r_bar={mat.r_bar:g} b={mat.b:g}mm",
        f"fracture Gc={frac.Gc:g}MPa*mm ell_f={frac.ell_f:.6g}mm kappa={frac.kappa:g} "
        f"driving_force={frac.driving_force} split={frac.split}",
        f"mesh h={spec.mesh.h:.6g}mm h_coarse={spec.mesh.h_coarse:.6g}mm growth={spec.mesh.growth:g}",
        f"solver n_increments={spec.solver.n_increments} newton_tol={spec.solver.newton_tol:g} "
        f"staggered_passes={spec.solver.staggered_passes} max_cutbacks={spec.solver.max_cutbacks}",
        f"loading maximum={spec.loading.maximum:.6g}{' MPa*sqrt(mm)' if spec.kind == BOUNDARY_LAYER else ' mm'}",
        f"derived K0={ref.K0:.6g}MPa*sqrt(mm) R0={ref.R0:.6g}mm sigma_hat={ref.sigma_hat:.6g}MPa "
        f"sigma_hat/sigma_Y={ref.sigma_hat_ratio:.4g} R0/ell_f={ref.R0_over_ell_f:.4g} ell_p/R0={mat.ell_p / ref.R0:.4g}",
    ]
    return lines
