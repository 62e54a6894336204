"""CMSG viscoplastic update at Gauss points.

All routines work on stacks of Gauss points: strain-like arrays are
(n, 4) Voigt vectors (xx, yy, zz, gamma_xy) with engineering shear and
stress-like arrays are (n, 4) with (xx, yy, zz, xy).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np

from gradfrac.core.errors import LocalNewtonError, ParameterError

logger = logging.getLogger(__name__)

POWER_LAW = "power_law"
LINEAR = "linear"

LOCAL_TOL = 1e-10
LOCAL_MAX_ITER = 50
_RATE_FLOOR = 1e-14

M_VEC = np.array([1.0, 1.0, 1.0, 0.0])
# maps an engineering-shear strain vector onto tensor components
HALF_SHEAR = np.array([1.0, 1.0, 1.0, 0.5])
DEV_PROJ = np.diag(HALF_SHEAR) - np.outer(M_VEC, M_VEC) / 3.0


@dataclass(frozen=True)
class MaterialParams:
    E: float
    nu: float
    sigma_Y: float
    hardening: str = POWER_LAW
    N: float = 0.2
    E_t: float = 0.0
    ell_p: float = 0.0
    m: float = 5.0
    alpha: float = 0.5
    M: float = 3.06
    r_bar: float = 1.9
    b: float = 2.5e-7

    def __post_init__(self) -> None:
        if not self.E > 0.0:
            raise ParameterError(f"E must be > 0 MPa, got {self.E}")
        if not 0.0 < self.nu < 0.5:
            raise ParameterError(f"nu must lie in (0, 0.5), got {self.nu}")
        if not self.sigma_Y > 0.0:
            raise ParameterError(f"sigma_Y must be > 0 MPa, got {self.sigma_Y}")
        if self.hardening == POWER_LAW:
            if not 0.0 <= self.N < 1.0:
                raise ParameterError(f"N must lie in [0, 1), got {self.N}")
        elif self.hardening == LINEAR:
            if not self.E_t >= 0.0:
                raise ParameterError(f"E_t must be >= 0 MPa, got {self.E_t}")
        else:
            raise ParameterError(f"unknown hardening law {self.hardening!r}")
        if not self.ell_p >= 0.0:
            raise ParameterError(f"ell_p must be >= 0 mm, got {self.ell_p}")
        if not self.m >= 1.0:
            raise ParameterError(f"m must be >= 1, got {self.m}")

    @property
    def mu(self) -> float:
        return self.E / (2.0 * (1.0 + self.nu))

    @property
    def lam(self) -> float:
        return self.E * self.nu / ((1.0 + self.nu) * (1.0 - 2.0 * self.nu))

    @property
    def K(self) -> float:
        return self.E / (3.0 * (1.0 - 2.0 * self.nu))

    @property
    def sigma_ref(self) -> float:
        if self.hardening == POWER_LAW:
            return self.sigma_Y * (self.E / self.sigma_Y) ** self.N
        return self.sigma_Y

    def with_length(self, ell_p: float) -> "MaterialParams":
        return replace(self, ell_p=ell_p)


@dataclass
class GaussPointState:
    """History of every Gauss point, one row per point."""

    sigma0: np.ndarray
    eps: np.ndarray
    eps_p: np.ndarray
    eps_p_eq: np.ndarray
    eta_p: np.ndarray
    psi_p: np.ndarray
    H_plus: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "GaussPointState":
        return cls(
            sigma0=np.zeros((n, 4)),
            eps=np.zeros((n, 4)),
            eps_p=np.zeros((n, 4)),
            eps_p_eq=np.zeros(n),
            eta_p=np.zeros(n),
            psi_p=np.zeros(n),
            H_plus=np.zeros(n),
        )

    @property
    def n_points(self) -> int:
        return self.eps_p_eq.shape[0]

    def copy(self) -> "GaussPointState":
        return GaussPointState(
            sigma0=self.sigma0.copy(),
            eps=self.eps.copy(),
            eps_p=self.eps_p.copy(),
            eps_p_eq=self.eps_p_eq.copy(),
            eta_p=self.eta_p.copy(),
            psi_p=self.psi_p.copy(),
            H_plus=self.H_plus.copy(),
        )

    @property
    def eps_e(self) -> np.ndarray:
        return self.eps - self.eps_p

    def as_dict(self) -> dict[str, np.ndarray]:
        return {
            "sigma0": self.sigma0,
            "eps": self.eps,
            "eps_p": self.eps_p,
            "eps_p_eq": self.eps_p_eq,
            "eta_p": self.eta_p,
            "psi_p": self.psi_p,
            "H_plus": self.H_plus,
        }


def elastic_moduli(params: MaterialParams) -> np.ndarray:
    """4x4 isotropic stiffness acting on engineering-shear strain vectors."""
    return params.K * np.outer(M_VEC, M_VEC) + 2.0 * params.mu * DEV_PROJ


def hardening_curve(eps_p_eq, params: MaterialParams):
    """sigma_ref * f(eps_p): power law or linear hardening, MPa."""
    p = np.asarray(eps_p_eq, dtype=np.float64)
    if params.hardening == POWER_LAW:
        return params.sigma_Y * (1.0 + params.E * p / params.sigma_Y) ** params.N
    return params.sigma_Y + params.E_t * p


def hardening_slope(eps_p_eq, params: MaterialParams):
    p = np.asarray(eps_p_eq, dtype=np.float64)
    if params.hardening == POWER_LAW:
        return params.N * params.E * (1.0 + params.E * p / params.sigma_Y) ** (params.N - 1.0)
    return np.full_like(p, params.E_t)


def taylor_flow_stress(eps_p_eq, eta_p, params: MaterialParams):
    h = hardening_curve(eps_p_eq, params)
    return np.sqrt(h * h + params.sigma_ref**2 * params.ell_p * np.asarray(eta_p, dtype=np.float64))


def _flow_and_slope(eps_p_eq, eta_p, params: MaterialParams):
    h = hardening_curve(eps_p_eq, params)
    flow = np.sqrt(h * h + params.sigma_ref**2 * params.ell_p * eta_p)
    return flow, h * hardening_slope(eps_p_eq, params) / flow


def dislocation_densities(eps_p_eq, eta_p, params: MaterialParams):
    """Statistically stored and geometrically necessary densities, 1/mm^2."""
    if not params.b > 0.0:
        raise ParameterError(f"Burgers vector b must be > 0 mm, got {params.b}")
    h = hardening_curve(eps_p_eq, params)
    rho_s = (h / (params.M * params.alpha * params.mu * params.b)) ** 2
    rho_g = params.r_bar * np.asarray(eta_p, dtype=np.float64) / params.b
    return rho_s, rho_g


def _deviator(eps_voigt: np.ndarray) -> np.ndarray:
    t = eps_voigt * HALF_SHEAR
    tr = t[:, 0] + t[:, 1] + t[:, 2]
    return t - tr[:, None] * M_VEC / 3.0, tr


def _norm_dev(t: np.ndarray) -> np.ndarray:
    return t[:, 0] ** 2 + t[:, 1] ** 2 + t[:, 2] ** 2 + 2.0 * t[:, 3] ** 2


def _solve_plastic_increment(rate, q_tr, p_old, eta_p, params: MaterialParams):
    """Scalar local Newton, safeguarded by bisection, on every active point."""
    mu3 = 3.0 * params.mu
    m = params.m
    lo = np.zeros_like(q_tr)
    hi = q_tr / mu3
    x = np.minimum(rate, 0.5 * hi)
    tol = LOCAL_TOL * np.maximum(rate, _RATE_FLOOR)
    done = np.zeros(q_tr.shape, dtype=bool)
    for it in range(LOCAL_MAX_ITER):
        q = np.maximum(q_tr - mu3 * x, 0.0)
        flow, slope = _flow_and_slope(p_old + x, eta_p, params)
        ratio = q / flow
        phi = ratio**m
        res = x - rate * phi
        done = np.abs(res) <= tol
        if done.all():
            return x, it
        dres = 1.0 + rate * m * ratio ** (m - 1.0) * (mu3 + q * slope / flow) / flow
        hi = np.where(res > 0.0, x, hi)
        lo = np.where(res < 0.0, x, lo)
        step = x - res / dres
        bad = ~((step > lo) & (step < hi))
        x_new = np.where(bad, 0.5 * (lo + hi), step)
        x = np.where(done, x, x_new)
    raise LocalNewtonError(
        f"local Newton failed at {int((~done).sum())} Gauss points after {LOCAL_MAX_ITER} iterations"
    )


def cmsg_stress_update(
    state_old: GaussPointState,
    eps_new: np.ndarray,
    eta_p_old: np.ndarray,
    params: MaterialParams,
):
    """Viscoplastic update with the lagged gradient; returns (state_new, C_ep)."""
    eps_new = np.atleast_2d(np.asarray(eps_new, dtype=np.float64))
    eta_p_old = np.broadcast_to(np.asarray(eta_p_old, dtype=np.float64), state_old.eps_p_eq.shape)
    K, mu = params.K, params.mu
    n = eps_new.shape[0]

    e_tr, tr = _deviator(eps_new - state_old.eps_p)
    s_tr = 2.0 * mu * e_tr
    pressure = K * tr
    q_tr = np.sqrt(1.5 * _norm_dev(s_tr))

    de, _ = _deviator(eps_new - state_old.eps)
    rate = np.sqrt(2.0 / 3.0 * _norm_dev(de))

    active = (rate > _RATE_FLOOR) & (q_tr > 0.0)
    dp = np.zeros(n)
    if active.any():
        dp[active], iters = _solve_plastic_increment(
            rate[active], q_tr[active], state_old.eps_p_eq[active], eta_p_old[active], params
        )
        logger.debug("local newton points=%d iters=%d", int(active.sum()), iters)

    safe_q = np.where(q_tr > 0.0, q_tr, 1.0)
    normal = 1.5 * s_tr / safe_q[:, None]
    beta = np.where(active, 1.0 - 3.0 * mu * dp / safe_q, 1.0)
    s = beta[:, None] * s_tr
    sigma = s + pressure[:, None] * M_VEC

    deps_p = dp[:, None] * normal * np.array([1.0, 1.0, 1.0, 2.0])
    q = beta * q_tr

    state_new = GaussPointState(
        sigma0=sigma,
        eps=eps_new.copy(),
        eps_p=state_old.eps_p + deps_p,
        eps_p_eq=state_old.eps_p_eq + dp,
        eta_p=np.array(eta_p_old, copy=True),
        psi_p=state_old.psi_p + q * dp,
        H_plus=state_old.H_plus.copy(),
    )

    tangent = np.broadcast_to(elastic_moduli(params), (n, 4, 4)).copy()
    if active.any():
        tangent[active] = _consistent_tangent(
            normal[active], de[active], rate[active], dp[active], q_tr[active],
            state_old.eps_p_eq[active], eta_p_old[active], params,
        )
    return state_new, tangent


def _consistent_tangent(normal, de, rate, dp, q_tr, p_old, eta_p, params: MaterialParams):
    K, mu, m = params.K, params.mu, params.m
    beta = 1.0 - 3.0 * mu * dp / q_tr
    q = np.maximum(beta * q_tr, 1e-300)
    flow, slope = _flow_and_slope(p_old + dp, eta_p, params)
    phi = (q / flow) ** m
    denom = 1.0 + rate * m * phi * (3.0 * mu / q + slope / flow)
    g = (
        (phi * (2.0 / 3.0) / rate)[:, None] * de
        + (rate * m * phi / q * 2.0 * mu)[:, None] * normal
    ) / denom[:, None]

    c = K * np.outer(M_VEC, M_VEC)[None] + (2.0 * mu * beta)[:, None, None] * DEV_PROJ[None]
    c += (4.0 * mu / 3.0 * (1.0 - beta))[:, None, None] * np.einsum("ni,nj->nij", normal, normal)
    c -= 2.0 * mu * np.einsum("ni,nj->nij", normal, g)
    return c


def elastic_energy(eps_e: np.ndarray, params: MaterialParams) -> np.ndarray:
    eps_e = np.atleast_2d(eps_e)
    dev, tr = _deviator(eps_e)
    return 0.5 * params.K * tr**2 + params.mu * _norm_dev(dev)


def elastic_energy_split(eps_e: np.ndarray, params: MaterialParams):
    """Volumetric-deviatoric (Amor) split of the elastic energy density."""
    eps_e = np.atleast_2d(eps_e)
    dev, tr = _deviator(eps_e)
    pos = np.maximum(tr, 0.0)
    neg = np.minimum(tr, 0.0)
    # bulk modulus K, not lambda, in the volumetric terms: psi_plus + psi_minus
    # must equal elastic_energy exactly (see DESIGN.md, energy split)
    psi_plus = 0.5 * params.K * pos**2 + params.mu * _norm_dev(dev)
    psi_minus = 0.5 * params.K * neg**2
    return psi_plus, psi_minus


def von_mises(sigma: np.ndarray) -> np.ndarray:
    sigma = np.atleast_2d(sigma)
    p = (sigma[:, 0] + sigma[:, 1] + sigma[:, 2]) / 3.0
    s = sigma - p[:, None] * M_VEC
    return np.sqrt(1.5 * _norm_dev(s))
