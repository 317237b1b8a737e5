"""Limit functional J_omega, explicit solitons w_k and the thresholds omega_0, omega_1

Everything here is one-dimensional: fields live on a line mesh [-L, L].
The only constant that needs quadrature is m(p) = int w_1^2; the rest is
closed form in m, p and omega.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

import config
from .cs_energy import CsParams, EnergyBreakdown, nonexistence_threshold, validate_p
from .errors import ContractError, DomainError, RootUnavailableError
from .radial_core import (
    Field,
    Mesh1D,
    Weight,
    derivative,
    forward_difference_energy,
    integrate_line,
    prefix_integral,
    second_derivative,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolitonParams:
    """Exponent p and frequency k of w_k, the positive solution of -w'' + k w = w^p."""
    p: float
    k: float

    def __post_init__(self):
        validate_p(self.p)
        if not np.isfinite(self.k) or self.k <= 0.0:
            raise DomainError(f"soliton frequency k must be > 0, got {self.k}")


@dataclass(frozen=True)
class RootReport:
    """Positive roots k1 < k2 of k = omega + m^2/4 k^((5-p)/(p-1))."""
    count: int
    k1: float | None = None
    k2: float | None = None

    def root(self, which: str) -> float:
        value = {"k1": self.k1, "k2": self.k2}.get(which)
        if value is None:
            raise RootUnavailableError(f"root {which} does not exist ({self.count} positive roots)")
        return value


@dataclass(frozen=True)
class Thresholds:
    """m(p), omega_0(p) < omega_1(p) < omega_bar(p)."""
    p: float
    m: float
    omega0: float
    omega1: float
    omega_bar: float

    def as_dict(self) -> dict:
        return {
            "p": self.p,
            "m": self.m,
            "omega0": self.omega0,
            "omega1": self.omega1,
            "omega_bar": self.omega_bar,
        }


# --- solitons ---------------------------------------------------------------

def _log_cosh(x: np.ndarray) -> np.ndarray:
    return np.logaddexp(x, -x) - np.log(2.0)


def _as_output(values: np.ndarray, r) -> float | np.ndarray:
    return float(values) if np.ndim(r) == 0 else values


def soliton_w1(p: float, r):
    """w_1(r) = ((2/(p+1)) cosh^2((p-1) r/2))^(1/(1-p)), evaluated in log space."""
    validate_p(p)
    x = 0.5 * (p - 1.0) * np.asarray(r, dtype=float)
    log_w = (np.log(2.0 / (p + 1.0)) + 2.0 * _log_cosh(x)) / (1.0 - p)
    return _as_output(np.exp(log_w), r)


def soliton_wk(sp: SolitonParams, r):
    """w_k(r) = k^(1/(p-1)) w_1(sqrt(k) r)."""
    scaled = np.sqrt(sp.k) * np.asarray(r, dtype=float)
    values = sp.k ** (1.0 / (sp.p - 1.0)) * np.asarray(soliton_w1(sp.p, scaled))
    return _as_output(values, r)


def soliton_wk_prime(sp: SolitonParams, r):
    """Analytic derivative of w_k, using w_1' = -tanh((p-1) r/2) w_1."""
    scaled = np.sqrt(sp.k) * np.asarray(r, dtype=float)
    w1 = np.asarray(soliton_w1(sp.p, scaled))
    w1_prime = -np.tanh(0.5 * (sp.p - 1.0) * scaled) * w1
    values = sp.k ** (1.0 / (sp.p - 1.0)) * np.sqrt(sp.k) * w1_prime
    return _as_output(values, r)


def soliton_mesh(k: float, n: int = config.SOLITON_INTERVALS) -> Mesh1D:
    """Symmetric mesh [-L, L] with L = 40/sqrt(k), wide enough for the exp(-sqrt(k)|r|) tails."""
    return Mesh1D.line(config.SOLITON_HALF_WIDTH_FACTOR / np.sqrt(k), n)


def sample_soliton(sp: SolitonParams, mesh: Mesh1D | None = None) -> Field:
    mesh = mesh or soliton_mesh(sp.k)
    return Field(mesh, soliton_wk(sp, mesh.nodes))


@lru_cache(maxsize=512)
def soliton_mass(p: float, n: int = config.MASS_INTERVALS) -> float:
    """m(p) = int w_1^2 dr, line quadrature on [-80/(p-1), 80/(p-1)]."""
    validate_p(p)
    mesh = Mesh1D.line(config.MASS_HALF_WIDTH_FACTOR / (p - 1.0), n)
    w1 = np.asarray(soliton_w1(p, mesh.nodes))
    return integrate_line(Field(mesh, w1 * w1))


def hamiltonian_residual(sp: SolitonParams, mesh: Mesh1D, numerical: bool = False) -> float:
    """max |-w'^2/2 + k w^2/2 - w^(p+1)/(p+1)| over the mesh.

    With numerical=True the derivative comes from finite differences of the
    sampled profile instead of the closed form.
    """
    w = soliton_wk(sp, mesh.nodes)
    if numerical:
        w_prime = derivative(Field(mesh, w)).values
    else:
        w_prime = soliton_wk_prime(sp, mesh.nodes)
    energy = -0.5 * w_prime ** 2 + 0.5 * sp.k * w ** 2 - w ** (sp.p + 1.0) / (sp.p + 1.0)
    return float(np.max(np.abs(energy)))


def relation_predictions(p: float) -> tuple[float, float]:
    """Closed forms ((p-1)/(p+3) m, 2(p+1)/(p+3) m)."""
    m = soliton_mass(p)
    return (p - 1.0) / (p + 3.0) * m, 2.0 * (p + 1.0) / (p + 3.0) * m


def soliton_relations(p: float, n: int = config.MASS_INTERVALS) -> tuple[float, float]:
    """Quadrature values (int |w_1'|^2, int w_1^(p+1))."""
    validate_p(p)
    sp = SolitonParams(p, 1.0)
    mesh = Mesh1D.line(config.MASS_HALF_WIDTH_FACTOR / (p - 1.0), n)
    w = soliton_wk(sp, mesh.nodes)
    w_prime = soliton_wk_prime(sp, mesh.nodes)
    kinetic = integrate_line(Field(mesh, w_prime ** 2))
    power = integrate_line(Field(mesh, w ** (p + 1.0)))
    return kinetic, power


# --- limit functional -------------------------------------------------------

def energy_J(u: Field, params: CsParams) -> EnergyBreakdown:
    """J_omega(u) = 1/2 int (u'^2 + omega u^2) + (int u^2)^3/24 - int |u|^(p+1)/(p+1)."""
    l2 = integrate_line(u.with_values(u.values ** 2))
    return EnergyBreakdown.from_terms(
        kinetic=0.5 * forward_difference_energy(u),
        mass=0.5 * params.omega * l2,
        nonlocal_=l2 ** 3 / 24.0,
        potential=-integrate_line(u.with_values(np.abs(u.values) ** (params.p + 1.0)))
        / (params.p + 1.0),
    )


def limit_el_residual(u: Field, params: CsParams) -> Field:
    """-u'' + omega u + (int u^2)^2 u/4 - |u|^(p-1) u."""
    l2 = integrate_line(u.with_values(u.values ** 2))
    v = u.values
    residual = (
        -second_derivative(u).values
        + (params.omega + 0.25 * l2 ** 2) * v
        - np.abs(v) ** (params.p - 1.0) * v
    )
    return u.with_values(residual)


def asymptotic_offset(U: Field) -> float:
    """(pi/4) C, where I_omega(U(. - rho)) = 2 pi rho J_omega(U) - (pi/4) C + o(1).

    C = int U^2 x A^2 dx - 2 int U^2 A B dx with A = int_{-inf}^x U^2 and
    B = int_{-inf}^x s U^2 ds; U must be even and decay at both ends.
    """
    if not (U.mesh.a < 0.0 < U.mesh.b):
        raise ContractError("asymptotic offset needs a line mesh around 0")
    x = U.nodes
    density = U.with_values(U.values ** 2)
    A = prefix_integral(density, Weight.PLAIN).values
    B = prefix_integral(density, Weight.TIMES_R).values
    first = integrate_line(U.with_values(density.values * x * A * A))
    second = integrate_line(U.with_values(density.values * A * B))
    return float(0.25 * np.pi * (first - 2.0 * second))


# --- soliton curve and thresholds -----------------------------------------------

def _exponents(p: float) -> tuple[float, float, float]:
    return (
        (3.0 + p) / (2.0 * (p - 1.0)),
        (5.0 - p) / (2.0 * (p - 1.0)),
        3.0 * (5.0 - p) / (2.0 * (p - 1.0)),
    )


def psi_curve(k, params: CsParams):
    """psi(k) = J_omega(w_k) in closed form."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(~(k_arr > 0.0)):
        raise DomainError("psi is defined for k > 0")
    p = params.p
    m = soliton_mass(p)
    e_kin, e_mass, e_nl = _exponents(p)
    log_k = np.log(k_arr)
    with np.errstate(over="ignore"):
        values = m * (
            (p - 5.0) / (2.0 * (3.0 + p)) * np.exp(e_kin * log_k)
            + 0.5 * params.omega * np.exp(e_mass * log_k)
            + m * m / 24.0 * np.exp(e_nl * log_k)
        )
    return _as_output(values, k)


def psi_derivative(k, params: CsParams):
    """dpsi/dk = m k^((7-3p)/(2(p-1))) (5-p)/(4(p-1)) [omega + m^2/4 k^((5-p)/(p-1)) - k]."""
    k_arr = np.asarray(k, dtype=float)
    if np.any(~(k_arr > 0.0)):
        raise DomainError("psi is defined for k > 0")
    p = params.p
    m = soliton_mass(p)
    prefactor = m * k_arr ** ((7.0 - 3.0 * p) / (2.0 * (p - 1.0))) * (5.0 - p) / (4.0 * (p - 1.0))
    values = prefactor * _root_function(k_arr, params.omega, p, m)
    return _as_output(values, k)


def _root_function(k, omega: float, p: float, m: float):
    return omega + 0.25 * m * m * k ** ((5.0 - p) / (p - 1.0)) - k


def _tangency_base(p: float) -> float:
    m = soliton_mass(p)
    return (5.0 - p) * m * m / (4.0 * (p - 1.0))


def degenerate_k(p: float) -> float:
    """k0, the double root of the frequency equation at omega = omega_1."""
    validate_p(p)
    return _tangency_base(p) ** (-(p - 1.0) / (2.0 * (3.0 - p)))


def omega1(p: float) -> float:
    """Largest omega for which k = omega + m^2/4 k^((5-p)/(p-1)) has a root."""
    validate_p(p)
    m = soliton_mass(p)
    base = _tangency_base(p)
    return float(
        base ** (-(p - 1.0) / (2.0 * (3.0 - p)))
        - 0.25 * m * m * base ** (-(5.0 - p) / (2.0 * (3.0 - p)))
    )


def omega0(p: float) -> float:
    """Threshold below which J_omega takes negative values and I_omega is unbounded below."""
    validate_p(p)
    m = soliton_mass(p)
    exponent = (p - 1.0) / (2.0 * (3.0 - p))
    return float(
        (3.0 - p) / (3.0 + p)
        * 3.0 ** exponent
        * 2.0 ** (2.0 / (3.0 - p))
        * (m * m * (3.0 + p) / (p - 1.0)) ** (-exponent)
    )


def solve_eq_k(params: CsParams) -> RootReport:
    """Positive roots of k = omega + m^2/4 k^((5-p)/(p-1)), classified against omega_1."""
    p, omega = params.p, params.omega
    m = soliton_mass(p)
    w1 = omega1(p)
    k0 = degenerate_k(p)

    if abs(omega - w1) <= config.OMEGA1_EQUALITY_TOL:
        return RootReport(count=1, k1=k0)
    if omega > w1:
        return RootReport(count=0)

    def g(k: float) -> float:
        return float(_root_function(k, omega, p, m))

    k_max = 2.0 * k0
    while g(k_max) <= 0.0:
        k_max *= 2.0
        logger.debug("growing upper bracket for k2 to %g", k_max)
    k2 = brentq(g, k0, k_max, xtol=config.ROOT_XTOL * k0, rtol=4 * np.finfo(float).eps)

    if omega == 0.0:
        return RootReport(count=1, k2=float(k2))
    # g(omega/2) > 0 for every omega > 0
    lower = min(config.K1_LOWER_BRACKET, 0.5 * omega)
    k1 = brentq(g, lower, k0, xtol=config.ROOT_XTOL * lower, rtol=4 * np.finfo(float).eps)
    return RootReport(count=2, k1=float(k1), k2=float(k2))


def soliton_k_for(params: CsParams) -> float:
    """k2 when it exists, otherwise the degenerate k0."""
    report = solve_eq_k(params)
    return report.k2 if report.k2 is not None else degenerate_k(params.p)


@lru_cache(maxsize=512)
def thresholds(p: float) -> Thresholds:
    """m, omega_0, omega_1 and omega_bar for one exponent, ordering checked."""
    validate_p(p)
    result = Thresholds(
        p=float(p),
        m=soliton_mass(p),
        omega0=omega0(p),
        omega1=omega1(p),
        omega_bar=nonexistence_threshold(p),
    )
    if not (0.0 < result.omega0 < result.omega1 < result.omega_bar):
        raise ContractError(
            f"threshold ordering violated at p={p}: "
            f"{result.omega0} < {result.omega1} < {result.omega_bar} fails"
        )
    return result
