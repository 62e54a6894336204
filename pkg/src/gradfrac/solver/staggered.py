"""Staggered (u, phi) incremental solution with automatic cutbacks."""

from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from gradfrac.core.errors import (
    IncrementAbortError,
    LocalNewtonError,
    NewtonDivergenceError,
    ParameterError,
)
from gradfrac.fem.mesh import Mesh
from gradfrac.physics.gradient import plastic_gradient_field
from gradfrac.physics.material import (
    GaussPointState,
    MaterialParams,
    cmsg_stress_update,
    elastic_energy,
    elastic_energy_split,
    elastic_moduli,
)
from gradfrac.physics.phasefield import SPLIT_AMOR, FractureParams, driving_force, update_history
from gradfrac.solver.assembly import Discretisation, assemble_displacement, assemble_phase_field
from gradfrac.solver.linear import GlobalSystem, unconstrained_rigid_modes

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    n_increments: int = 50
    newton_tol: float = 1e-6
    newton_max_iter: int = 25
    staggered_passes: int = 1
    cutback_factor: float = 0.5
    max_cutbacks: int = 8
    max_phi_increment: float = 1.0
    # clean sub-steps before a cut step grows back (0 keeps it cut)
    step_recovery: int = 2

    def __post_init__(self) -> None:
        if self.n_increments < 1:
            raise ParameterError(f"n_increments must be >= 1, got {self.n_increments}")
        if not self.newton_tol > 0.0:
            raise ParameterError(f"newton_tol must be > 0, got {self.newton_tol}")
        if self.newton_max_iter < 1:
            raise ParameterError(f"newton_max_iter must be >= 1, got {self.newton_max_iter}")
        if self.staggered_passes < 1:
            raise ParameterError(f"staggered_passes must be >= 1, got {self.staggered_passes}")
        if not 0.0 < self.cutback_factor < 1.0:
            raise ParameterError(f"cutback_factor must lie in (0, 1), got {self.cutback_factor}")
        if self.max_cutbacks < 0:
            raise ParameterError(f"max_cutbacks must be >= 0, got {self.max_cutbacks}")
        if not 0.0 < self.max_phi_increment <= 1.0:
            raise ParameterError(f"max_phi_increment must lie in (0, 1], got {self.max_phi_increment}")
        if self.step_recovery < 0:
            raise ParameterError(f"step_recovery must be >= 0, got {self.step_recovery}")


@dataclass(frozen=True)
class DirichletProgram:
    """Prescribed displacements proportional to one load parameter.

    ``u_dofs`` are displacement dofs with values ``unit * load``; ``phi_seed``
    nodes carry phi = 1 for the whole run.
    """

    u_dofs: np.ndarray
    unit: np.ndarray
    phi_seed: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))

    def __post_init__(self) -> None:
        object.__setattr__(self, "u_dofs", np.asarray(self.u_dofs, dtype=np.int64))
        object.__setattr__(self, "unit", np.asarray(self.unit, dtype=np.float64))
        object.__setattr__(self, "phi_seed", np.asarray(self.phi_seed, dtype=np.int64))
        if self.u_dofs.shape != self.unit.shape:
            raise ParameterError("every constrained dof needs exactly one unit value")
        if np.unique(self.u_dofs).size != self.u_dofs.size:
            raise ParameterError("a displacement dof is constrained twice")

    def values(self, load: float) -> np.ndarray:
        return self.unit * load


@dataclass
class SolverState:
    u: np.ndarray
    phi: np.ndarray
    gp: GaussPointState
    tangent: np.ndarray
    internal_force: np.ndarray
    load: float = 0.0

    def copy(self) -> "SolverState":
        return SolverState(
            u=self.u.copy(),
            phi=self.phi.copy(),
            gp=self.gp.copy(),
            tangent=self.tangent.copy(),
            internal_force=self.internal_force.copy(),
            load=self.load,
        )


@dataclass(frozen=True)
class IncrementReport:
    iterations: int
    residual: float
    phi_jump: float
    cutbacks: int = 0


class Model:
    """Discretised problem: mesh, constitutive parameters and Dirichlet program."""

    def __init__(self, mesh: Mesh, material: MaterialParams, fracture: FractureParams, program: DirichletProgram):
        self.mesh = mesh
        self.material = material
        self.fracture = fracture
        self.program = program
        self.disc = Discretisation.from_mesh(mesh)
        self.rigid_modes = unconstrained_rigid_modes(mesh.coords, program.u_dofs)
        if self.rigid_modes:
            logger.warning("displacement constraints leave rigid modes free: %s", ", ".join(self.rigid_modes))

    @property
    def n_gauss(self) -> int:
        return self.disc.n_gauss

    def initial_state(self) -> SolverState:
        n = self.disc.n_gauss
        phi = np.zeros(self.mesh.n_nodes)
        phi[self.program.phi_seed] = 1.0
        return SolverState(
            u=np.zeros(self.disc.dofs.n_u),
            phi=phi,
            gp=GaussPointState.zeros(n),
            tangent=np.broadcast_to(elastic_moduli(self.material), (n, 4, 4)).copy(),
            internal_force=np.zeros(self.disc.dofs.n_u),
        )

    def tension_energy(self, eps_e: np.ndarray) -> np.ndarray:
        if self.fracture.split == SPLIT_AMOR:
            return elastic_energy_split(eps_e, self.material)[0]
        return elastic_energy(eps_e, self.material)

    def displacement_system(self, sigma0, tangent, phi) -> GlobalSystem:
        k, r = assemble_displacement(self.disc, sigma0, tangent, phi, self.fracture)
        return GlobalSystem.from_parts(k, r, self.program.u_dofs)

    def phase_field_system(self, phi, drive) -> GlobalSystem:
        k, r = assemble_phase_field(self.disc, phi, drive, self.fracture)
        return GlobalSystem.from_parts(k, r, self.program.phi_seed)

    def reaction(self, state: SolverState, dofs: np.ndarray) -> float:
        return float(np.sum(state.internal_force[np.asarray(dofs, dtype=np.int64)]))


def _newton_displacement(model: Model, state_n: SolverState, u: np.ndarray, phi: np.ndarray, config: SolverConfig):
    """Newton loop on u with phi frozen; material always restarts from state_n."""
    ref = 0.0
    for iteration in range(config.newton_max_iter + 1):
        gp, tangent = cmsg_stress_update(state_n.gp, model.disc.strains(u), state_n.gp.eta_p, model.material)
        system = model.displacement_system(gp.sigma0, tangent, phi)
        r_free = system.rhs[system.free]
        norm = float(np.linalg.norm(r_free))
        if not np.isfinite(norm):
            raise NewtonDivergenceError(iteration, norm)
        ref = max(ref, norm if iteration == 0 else 0.0, float(np.linalg.norm(system.reactions())))
        logger.debug("newton it=%d residual=%.3e ref=%.3e", iteration, norm, ref)
        if norm <= config.newton_tol * max(ref, 1e-12):
            return u, gp, tangent, system.rhs, iteration, norm
        if iteration == config.newton_max_iter:
            break
        u = u + system.correction(np.zeros(system.fixed.size), model.rigid_modes)
    raise NewtonDivergenceError(config.newton_max_iter, norm)


def staggered_increment(model: Model, state_n: SolverState, load: float, config: SolverConfig):
    """Advance a converged state to ``load``; returns (state, IncrementReport)."""
    fixed = model.program.u_dofs
    u = state_n.u.copy()
    phi = state_n.phi.copy()
    delta_fixed = model.program.values(load) - u[fixed]

    # lifting step with the converged tangent of the previous increment
    if np.any(delta_fixed != 0.0):
        lift = model.displacement_system(state_n.gp.sigma0, state_n.tangent, phi)
        u = u + lift.correction(delta_fixed, model.rigid_modes)
    u[fixed] = model.program.values(load)

    iterations = 0
    for sweep in range(config.staggered_passes):
        u, gp, tangent, internal, its, residual = _newton_displacement(model, state_n, u, phi, config)
        iterations += its

        gp.eta_p = plastic_gradient_field(model.disc.geometry, gp.eps_p).flat_eta_p()
        gp.H_plus = update_history(state_n.gp.H_plus, model.tension_energy(gp.eps_e))
        drive = driving_force(gp.H_plus, gp.psi_p, model.fracture)

        pf = model.phase_field_system(phi, drive)
        phi = np.clip(phi + pf.correction(np.zeros(pf.fixed.size)), 0.0, 1.0)
        logger.debug("pass=%d iters=%d max_phi=%.4f", sweep + 1, its, float(phi.max()))

    state = SolverState(u=u, phi=phi, gp=gp, tangent=tangent, internal_force=internal, load=load)
    jump = float(np.max(phi - state_n.phi)) if phi.size else 0.0
    return state, IncrementReport(iterations=iterations, residual=residual, phi_jump=jump)


class _PhiJump(Exception):
    pass


StepCallback = Callable[[SolverState, IncrementReport], None]


def dump_state(path: Path, state: SolverState) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savez(path, u=state.u, phi=state.phi, load=state.load, tangent=state.tangent, **state.gp.as_dict())
    return path


def advance(
    model: Model,
    state: SolverState,
    target: float,
    config: SolverConfig,
    on_step: StepCallback | None = None,
    dump_dir: Path | None = None,
) -> SolverState:
    """Reach ``target`` from ``state.load`` cutting the step on failure.

    Every converged sub-step is handed to ``on_step``. A cut step grows back
    by ``1/cutback_factor`` after ``step_recovery`` clean sub-steps, never
    beyond the scheduled increment.
    """
    step = target - state.load
    span = abs(step)
    cutbacks = 0
    clean = 0
    while abs(target - state.load) > 1e-12 * max(span, abs(target), 1.0):
        remaining = target - state.load
        trial = target if abs(step) >= abs(remaining) else state.load + step
        try:
            new_state, report = staggered_increment(model, state, trial, config)
            if report.phi_jump > config.max_phi_increment and cutbacks < config.max_cutbacks:
                raise _PhiJump(f"phi jump {report.phi_jump:.3f} above {config.max_phi_increment}")
        except (NewtonDivergenceError, LocalNewtonError, _PhiJump) as exc:
            cutbacks += 1
            if cutbacks > config.max_cutbacks:
                dump = None
                if dump_dir is not None:
                    dump = dump_state(Path(dump_dir) / f"abort_load_{trial:.6g}.npz", state)
                raise IncrementAbortError(trial, dump) from exc
            step *= config.cutback_factor
            clean = 0
            logger.warning("cutback=%d load=%.6g next_step=%.3e reason=%s", cutbacks, trial, step, exc)
            continue
        state = new_state
        if on_step is not None:
            on_step(state, replace(report, cutbacks=cutbacks))
        clean += 1
        if config.step_recovery and clean >= config.step_recovery and abs(step) < span:
            step = float(np.sign(step)) * min(abs(step) / config.cutback_factor, span)
            clean = 0
            logger.debug("step recovered load=%.6g next_step=%.3e", state.load, step)
    return state


def run_schedule(
    model: Model,
    loads: np.ndarray,
    config: SolverConfig,
    on_step: StepCallback | None = None,
    dump_dir: Path | None = None,
    state: SolverState | None = None,
) -> SolverState:
    """Drive the model through a sequence of load parameter targets."""
    state = model.initial_state() if state is None else state
    for target in np.asarray(loads, dtype=np.float64):
        state = advance(model, state, float(target), config, on_step, dump_dir)
    return state
