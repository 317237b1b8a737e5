"""Dirichlet-ball minimization of I_omega, translated profiles and escape diagnostics"""

import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import solveh_banded

import config
from .cs_energy import CsParams, EnergyBreakdown, energy_I, lumped_mass, radial_gradient, radial_terms
from .errors import ContractError, DivergenceError, DomainError
from .limit_problem import SolitonParams, psi_curve, soliton_k_for, soliton_wk, solve_eq_k
from .radial_core import Field, Mesh1D, integrate_radial

logger = logging.getLogger(__name__)


# --- initial iterates -------------------------------------------------------

@dataclass(frozen=True)
class ZeroPlusBump:
    """Small Gaussian bump centred at the origin; probes the basin of u = 0."""
    amplitude: float = config.BUMP_AMPLITUDE
    width: float = config.BUMP_WIDTH

    def sample(self, mesh: Mesh1D, params: CsParams) -> np.ndarray:
        r = mesh.nodes
        return self.amplitude * np.exp(-(r / self.width) ** 2)


@dataclass(frozen=True)
class TranslatedSoliton:
    """Soliton w_k centred at r = rho, k = k2 (or k0 when k2 does not exist)."""
    rho: float

    def sample(self, mesh: Mesh1D, params: CsParams) -> np.ndarray:
        if not (0.0 < self.rho < mesh.b):
            raise DomainError(f"soliton centre rho={self.rho} must lie inside (0, {mesh.b})")
        sp = SolitonParams(params.p, soliton_k_for(params))
        return soliton_wk(sp, mesh.nodes - self.rho)


@dataclass(frozen=True)
class CustomInit:
    """A caller-supplied profile on the ball mesh."""
    profile: Field

    def sample(self, mesh: Mesh1D, params: CsParams) -> np.ndarray:
        if self.profile.mesh != mesh:
            raise ContractError("custom initial profile must live on the ball mesh")
        return np.array(self.profile.values)


InitialIterate = ZeroPlusBump | TranslatedSoliton | CustomInit


def parse_init(text: str) -> InitialIterate:
    """'zero_plus_bump' or 'translated_soliton:<rho>'."""
    name, _, arg = text.partition(":")
    if name == "zero_plus_bump" and not arg:
        return ZeroPlusBump()
    if name == "translated_soliton" and arg:
        try:
            return TranslatedSoliton(float(arg))
        except ValueError:
            raise DomainError(f"bad soliton centre in init {text!r}") from None
    raise DomainError(f"unknown init {text!r}; use zero_plus_bump or translated_soliton:<rho>")


# --- configuration and result ------------------------------------------------

@dataclass(frozen=True)
class MinimizeConfig:
    radius: float
    n: int
    max_iters: int = config.DEFAULT_MAX_ITERS
    grad_tol: float = config.DEFAULT_GRAD_TOL
    step_init: float = config.DEFAULT_STEP_INIT
    init: InitialIterate = field(default_factory=ZeroPlusBump)

    def __post_init__(self):
        if not self.radius > 0.0:
            raise DomainError(f"ball radius must be > 0, got {self.radius}")
        if int(self.n) != self.n or self.n < 4:
            raise DomainError(f"need at least 4 grid intervals, got {self.n}")
        if self.radius / self.n > config.MAX_SPACING:
            raise DomainError(
                f"spacing {self.radius / self.n:.4g} exceeds {config.MAX_SPACING}; raise n"
            )
        if self.max_iters < 1:
            raise DomainError("max_iters must be positive")
        if not self.grad_tol > 0.0:
            raise DomainError("grad_tol must be > 0")
        if not self.step_init > 0.0:
            raise DomainError("step_init must be > 0")

    @cached_property
    def mesh(self) -> Mesh1D:
        return Mesh1D.radial(self.radius, self.n)


@dataclass(frozen=True)
class MinimizeResult:
    u: Field
    energy: EnergyBreakdown
    iters: int
    grad_norm: float
    centroid_xi: float
    l2_mass: float
    converged: bool
    initial_energy: float
    energy_trace: tuple[float, ...]
    sign_definite: bool

    @property
    def radius(self) -> float:
        return self.u.mesh.b

    def summary(self) -> dict:
        return {
            "energy": self.energy.as_dict(),
            "initial_energy": self.initial_energy,
            "grad_norm": self.grad_norm,
            "centroid_xi": self.centroid_xi,
            "l2_mass": self.l2_mass,
            "iters": self.iters,
            "converged": self.converged,
            "sign_definite": self.sign_definite,
        }


def l2_mass(u: Field) -> float:
    """int u^2 over the disk."""
    return integrate_radial(u.with_values(u.values ** 2))


def mass_centroid(u: Field) -> float:
    """Mean radius of the measure u^2 dx; 0 for the zero profile."""
    mass = l2_mass(u)
    if mass == 0.0:
        return 0.0
    return integrate_radial(u.with_values(u.values ** 2 * u.nodes)) / mass


# --- descent ----------------------------------------------------------------

def _preconditioner(mesh: Mesh1D, mass: np.ndarray) -> np.ndarray:
    """Upper banded form of kinetic stiffness + shift * lumped mass, Dirichlet node dropped."""
    h = mesh.spacing
    mid = mesh.nodes[:-1] + 0.5 * h
    stiffness = 2.0 * np.pi / h * mid
    diag = np.zeros(mesh.n + 1)
    diag[:-1] += stiffness
    diag[1:] += stiffness
    diag += config.PRECONDITIONER_SHIFT * mass

    ab = np.zeros((2, mesh.n))
    ab[1] = diag[:-1]
    ab[0, 1:] = -stiffness[:-1]
    return ab


def _total(u: np.ndarray, mesh: Mesh1D, params: CsParams) -> float:
    return float(sum(radial_terms(u, mesh, params)))


def minimize_on_ball(params: CsParams, cfg: MinimizeConfig) -> MinimizeResult:
    """Preconditioned gradient descent with Armijo backtracking on radial profiles with u(R) = 0.

    The search direction is -P^{-1} grad E with P the discrete -Delta + 1
    (a Sobolev gradient); steps start at step_init and are halved until the
    Armijo decrease holds.
    """
    mesh = cfg.mesh
    mass = lumped_mass(mesh)
    ab = _preconditioner(mesh, mass)
    interior = slice(1, -1)

    u = np.array(cfg.init.sample(mesh, params), dtype=float)
    u[-1] = 0.0
    energy = _total(u, mesh, params)
    trace = [energy]
    if not np.isfinite(energy):
        raise DivergenceError("initial iterate has non-finite energy", trace)

    logger.info(
        "minimizing on B(0,%g): n=%d p=%g omega=%g E0=%.9g",
        cfg.radius, cfg.n, params.p, params.omega, energy,
    )

    converged = False
    grad_norm = np.inf
    iters = 0
    for iters in range(cfg.max_iters + 1):
        grad = radial_gradient(u, mesh, params)
        grad[-1] = 0.0
        grad_norm = float(np.max(np.abs(grad[interior] / mass[interior])))
        if grad_norm <= cfg.grad_tol:
            converged = True
            break
        if iters == cfg.max_iters:
            break

        direction = np.zeros_like(u)
        direction[:-1] = -solveh_banded(ab, grad[:-1])
        slope = float(np.dot(grad, direction))

        step = cfg.step_init
        for _ in range(config.MAX_BACKTRACKS):
            trial = u + step * direction
            trial_energy = _total(trial, mesh, params)
            if not np.isfinite(trial_energy):
                trace.append(trial_energy)
                raise DivergenceError(
                    f"non-finite energy at iteration {iters} (step {step:g})", trace
                )
            if trial_energy <= energy + config.ARMIJO_C * step * slope:
                break
            step *= 0.5
        else:
            logger.info("line search stalled at iteration %d, grad_norm=%.3g", iters, grad_norm)
            break

        u, energy = trial, trial_energy
        trace.append(energy)
        if iters % 100 == 0:
            logger.debug("iter %d: E=%.12g grad_norm=%.3g step=%g", iters, energy, grad_norm, step)

    result_field = Field(mesh, u)
    peak = np.max(np.abs(u))
    sign_definite = bool(peak == 0.0 or np.min(u) >= -1e-8 * peak or np.max(u) <= 1e-8 * peak)
    if not sign_definite:
        logger.warning("minimizer candidate changes sign (min %.3g, max %.3g)", np.min(u), np.max(u))

    logger.info(
        "descent finished: iters=%d E=%.9g grad_norm=%.3g converged=%s",
        iters, energy, grad_norm, converged,
    )
    return MinimizeResult(
        u=result_field,
        energy=energy_I(result_field, params),
        iters=iters,
        grad_norm=grad_norm,
        centroid_xi=mass_centroid(result_field),
        l2_mass=l2_mass(result_field),
        converged=converged,
        initial_energy=trace[0],
        energy_trace=tuple(trace),
        sign_definite=sign_definite,
    )


# --- translated profiles ------------------------------------------------------

def translate_to_radial(U: Field, rho: float) -> Field:
    """U(r - rho) on the radial mesh [0, rho + b] with U's spacing, zero outside U's support."""
    if not rho > 0.0:
        raise DomainError(f"translation rho must be > 0, got {rho}")
    at_origin = float(np.interp(-rho, U.nodes, U.values, left=0.0, right=0.0))
    if abs(at_origin) > 1e-12:
        raise DomainError(f"U(-rho) = {at_origin:.3g} is not negligible; increase rho")
    h = U.mesh.spacing
    n = int(np.ceil((rho + U.mesh.b) / h - 1e-9))
    mesh = Mesh1D.radial(n * h, n)
    values = np.interp(mesh.nodes - rho, U.nodes, U.values, left=0.0, right=0.0)
    return Field(mesh, values)


def translated_profile_energy(U: Field, rho: float, params: CsParams) -> EnergyBreakdown:
    """I_omega of the radial field r -> U(r - rho)."""
    return energy_I(translate_to_radial(U, rho), params)


# --- escape diagnostics -------------------------------------------------------

@dataclass(frozen=True)
class EscapeReport:
    radii: tuple[float, ...]
    energies: tuple[float, ...]
    l2_masses: tuple[float, ...]
    centroids: tuple[float, ...]
    centroid_ratios: tuple[float, ...]
    slope: float
    reference_slope: float | None
    slope_ratio: float | None

    def rows(self) -> list[dict]:
        return [
            {"radius": r, "energy": e, "l2_mass": m, "centroid_xi": c, "centroid_over_mass": q}
            for r, e, m, c, q in zip(
                self.radii, self.energies, self.l2_masses, self.centroids, self.centroid_ratios
            )
        ]


def escape_diagnostics(results, params: CsParams | None = None) -> EscapeReport:
    """Trend of energy, mass and centroid across minimizations on growing balls.

    The fitted slope of energy against radius is compared with 2*pi*psi(k2),
    the rate at which a drifting soliton lowers the energy.
    """
    results = list(results)
    if len(results) < 3:
        raise DomainError(f"escape diagnostics need at least 3 radii, got {len(results)}")
    radii = np.array([res.radius for res in results])
    if np.any(np.diff(radii) <= 0.0):
        raise DomainError("results must be ordered by increasing radius")

    energies = np.array([res.energy.total for res in results])
    masses = np.array([res.l2_mass for res in results])
    centroids = np.array([res.centroid_xi for res in results])
    ratios = np.divide(centroids, masses, out=np.zeros_like(centroids), where=masses > 0.0)
    slope = float(np.polyfit(radii, energies, 1)[0])

    reference = ratio = None
    if params is not None:
        roots = solve_eq_k(params)
        if roots.k2 is not None:
            reference = float(2.0 * np.pi * psi_curve(roots.k2, params))
            ratio = slope / reference if reference != 0.0 else None

    return EscapeReport(
        radii=tuple(radii.tolist()),
        energies=tuple(energies.tolist()),
        l2_masses=tuple(masses.tolist()),
        centroids=tuple(centroids.tolist()),
        centroid_ratios=tuple(ratios.tolist()),
        slope=slope,
        reference_slope=reference,
        slope_ratio=ratio,
    )
