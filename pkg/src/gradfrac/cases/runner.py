"""Build a case, drive it along its load schedule and collect step results."""

from __future__ import annotations

import logging
from collections.abc import Callable
from pathlib import Path

import numpy as np

from gradfrac.cases.boundary_layer import build_boundary_layer
from gradfrac.cases.compact_tension import build_compact_tension
from gradfrac.cases.double_notch import build_double_notch
from gradfrac.cases.postprocess import (
    crack_length_extension,
    measure_crack_extension,
    plastic_zone,
    reaction_force,
)
from gradfrac.cases.spec import BOUNDARY_LAYER, COMPACT_TENSION, DOUBLE_NOTCH, BuiltCase, CaseSpec, LoadStepResult
from gradfrac.solver.assembly import energies
from gradfrac.solver.staggered import IncrementReport, Model, SolverState, run_schedule

logger = logging.getLogger("gradfrac.solver")

BUILDERS: dict[str, Callable[[CaseSpec], BuiltCase]] = {
    BOUNDARY_LAYER: build_boundary_layer,
    COMPACT_TENSION: build_compact_tension,
    DOUBLE_NOTCH: build_double_notch,
}

# boundary-layer plastic zone must stay well inside the K-field rim
SSY_FRACTION = 1.0 / 20.0

SnapshotHook = Callable[[int, SolverState], None]


def build_case(spec: CaseSpec) -> BuiltCase:
    return BUILDERS[spec.kind](spec)


class LoadPath:
    """One run of a case; ``results`` keeps every converged step, also after an abort."""

    def __init__(self, spec: CaseSpec, built: BuiltCase | None = None, on_snapshot: SnapshotHook | None = None):
        self.spec = spec
        self.built = build_case(spec) if built is None else built
        self.model = Model(self.built.mesh, spec.material, spec.fracture, self.built.program)
        self.on_snapshot = on_snapshot
        self.results: list[LoadStepResult] = []
        self._delta_a = 0.0
        self._initial_length = 0.0
        self._ssy_warned = False

    def _summarise(self, state: SolverState, report: IncrementReport) -> LoadStepResult:
        spec, built, disc = self.spec, self.built, self.model.disc
        gp = state.gp
        energy = energies(disc, gp.eps_e, gp.psi_p, state.phi, spec.material, spec.fracture)
        if spec.kind == DOUBLE_NOTCH:
            delta_a = crack_length_extension(energy.crack_length, self._initial_length)
        else:
            delta_a = measure_crack_extension(state.phi, built.crack_path, built.mesh.coords, built.tip)
        self._delta_a = max(self._delta_a, delta_a)
        zone = plastic_zone(disc, gp.eps_p_eq, spec.material, built.tip)
        reaction = reaction_force(state.internal_force, built.reaction_dofs)

        if spec.kind == BOUNDARY_LAYER and not self._ssy_warned:
            limit = SSY_FRACTION * spec.geometry.outer_radius
            if zone.radius > limit:
                logger.warning("plastic zone radius=%.4g mm exceeds R/20=%.4g mm; small-scale yielding is lost", zone.radius, limit)
                self._ssy_warned = True

        return LoadStepResult(
            step=len(self.results) + 1,
            load=state.load,
            reaction=reaction,
            force_kN=reaction * spec.thickness / 1000.0,
            delta_a=self._delta_a,
            max_phi=float(state.phi.max()) if state.phi.size else 0.0,
            plastic_zone_area=zone.area,
            plastic_zone_radius=zone.radius,
            elastic_energy=energy.elastic,
            plastic_work=energy.plastic,
            fracture_energy=energy.fracture,
            iterations=report.iterations,
            cutbacks=report.cutbacks,
        )

    def _on_step(self, state: SolverState, report: IncrementReport) -> None:
        result = self._summarise(state, report)
        self.results.append(result)
        logger.info(
            "step=%d load=%.5g iters=%d reaction=%.5g da=%.4g max_phi=%.4f",
            result.step, result.load, result.iterations, result.reaction, result.delta_a, result.max_phi,
        )
        if self.on_snapshot is not None:
            self.on_snapshot(result.step, state)

    def run(self, dump_dir: Path | None = None) -> list[LoadStepResult]:
        spec = self.spec
        state = self.model.initial_state()
        gp = state.gp
        self._initial_length = energies(
            self.model.disc, gp.eps_e, gp.psi_p, state.phi, spec.material, spec.fracture
        ).crack_length
        if self.on_snapshot is not None:
            self.on_snapshot(0, state)
        loads = spec.loading.schedule(spec.solver.n_increments)
        logger.info("schedule increments=%d max_load=%.5g", loads.size, float(np.max(np.abs(loads))))
        run_schedule(self.model, loads, spec.solver, self._on_step, dump_dir, state=state)
        return self.results


def run_loadpath(spec: CaseSpec, dump_dir: Path | None = None, on_snapshot: SnapshotHook | None = None) -> list[LoadStepResult]:
    """Run a case to the end of its schedule; increment aborts propagate."""
    return LoadPath(spec, on_snapshot=on_snapshot).run(dump_dir)
