"""Radial Chern-Simons-Schrodinger energy I_omega, its gauge fields and residual

All plane integrals are reduced to 2*pi * int_0^R (...) r dr on a radial mesh.
The gauge constant xi is fixed to 0, so omega is the only frequency parameter.
"""

import logging
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.optimize import brentq, minimize_scalar

import config
from .errors import DomainError
from .radial_core import (
    Field,
    Mesh1D,
    Weight,
    derivative,
    integrate_radial,
    prefix_integral,
    radial_forward_difference_energy,
    require_radial,
    require_same_mesh,
    second_derivative,
    suffix_integral,
)

logger = logging.getLogger(__name__)


def validate_p(p: float) -> float:
    """Reject exponents outside the band where all closed forms stay finite."""
    if not np.isfinite(p) or not (config.P_MIN < p < config.P_MAX):
        raise DomainError(
            f"p={p} outside the validity band ({config.P_MIN}, {config.P_MAX})"
        )
    return float(p)


@dataclass(frozen=True)
class CsParams:
    """Exponent p of the power nonlinearity and frequency omega."""
    p: float
    omega: float

    def __post_init__(self):
        validate_p(self.p)
        if not np.isfinite(self.omega) or self.omega < 0.0:
            raise DomainError(f"omega must be finite and >= 0, got {self.omega}")


@dataclass(frozen=True)
class EnergyBreakdown:
    """Additive terms of I_omega (or J_omega) and their sum."""
    kinetic: float
    mass: float
    nonlocal_: float
    potential: float
    total: float

    @classmethod
    def from_terms(
        cls, kinetic: float, mass: float, nonlocal_: float, potential: float
    ) -> "EnergyBreakdown":
        return cls(
            kinetic=float(kinetic),
            mass=float(mass),
            nonlocal_=float(nonlocal_),
            potential=float(potential),
            total=float(kinetic + mass + nonlocal_ + potential),
        )

    def as_dict(self) -> dict:
        data = asdict(self)
        data["nonlocal"] = data.pop("nonlocal_")
        return data


@dataclass(frozen=True)
class PointwiseProfile:
    """Negative set (alpha, beta) of f(t) = omega t^2/4 + t^4/8 - t^(p+1)/(p+1)."""
    alpha: float
    beta: float
    c0: float
    exists_negative: bool


def _inverse_r(r: np.ndarray) -> np.ndarray:
    inv = np.zeros_like(r)
    inv[1:] = 1.0 / r[1:]
    return inv


def radial_terms(u: np.ndarray, mesh: Mesh1D, params: CsParams) -> tuple[float, float, float, float]:
    """(kinetic, mass, nonlocal, potential) of the discrete I_omega at nodal values u."""
    r = mesh.nodes
    h = mesh.spacing
    w = mesh.weights
    du = np.diff(u)
    mid = r[:-1] + 0.5 * h
    kinetic = np.pi * np.dot(mid * du, du) / h
    u2 = u * u
    mass = np.pi * params.omega * np.dot(w * r, u2)
    # G = int_0^r s u^2 ds = 2 h(r)
    G = cumulative_trapezoid(r * u2, dx=h, initial=0.0)
    nonlocal_ = 0.25 * np.pi * np.dot(w, u2 * G * G * _inverse_r(r))
    potential = -2.0 * np.pi / (params.p + 1.0) * np.dot(w * r, np.abs(u) ** (params.p + 1.0))
    return float(kinetic), float(mass), float(nonlocal_), float(potential)


def radial_gradient(u: np.ndarray, mesh: Mesh1D, params: CsParams) -> np.ndarray:
    """Exact gradient of radial_terms' sum with respect to the nodal values."""
    r = mesh.nodes
    h = mesh.spacing
    w = mesh.weights
    inv_r = _inverse_r(r)

    flux = (r[:-1] + 0.5 * h) * np.diff(u)
    grad = np.zeros_like(u)
    grad[:-1] -= flux
    grad[1:] += flux
    grad *= 2.0 * np.pi / h

    wr = w * r
    grad += 2.0 * np.pi * params.omega * wr * u
    grad -= 2.0 * np.pi * wr * np.abs(u) ** (params.p - 1.0) * u

    u2 = u * u
    G = cumulative_trapezoid(r * u2, dx=h, initial=0.0)
    T = w * u2 * G * inv_r
    tail = np.cumsum(T[::-1])[::-1] - 0.5 * T
    grad += 0.5 * np.pi * w * u * G * G * inv_r
    grad += np.pi * h * r * u * tail
    return grad


def lumped_mass(mesh: Mesh1D) -> np.ndarray:
    """Area 2*pi*r*w of the annulus owned by each node; a disk of radius h/2 at r = 0."""
    require_radial(mesh)
    m = 2.0 * np.pi * mesh.weights * mesh.nodes
    m[0] = 0.25 * np.pi * mesh.spacing ** 2
    return m


def gauge_h(u: Field) -> Field:
    """h(r) = 1/2 int_0^r s u^2(s) ds."""
    require_radial(u.mesh)
    g = prefix_integral(u.with_values(u.values ** 2), Weight.TIMES_R)
    return g.with_values(0.5 * g.values)


def a0_tail(u: Field, h: Field) -> Field:
    """int_r^R (h(s)/s) u^2(s) ds, the decaying part of A_0."""
    require_same_mesh(u, h)
    return suffix_integral(u.with_values(h.values * u.values ** 2), Weight.INVERSE_R)


def energy_I(u: Field, params: CsParams) -> EnergyBreakdown:
    """Discrete I_omega(u) for a radial profile sampled on [0, R]."""
    require_radial(u.mesh)
    return EnergyBreakdown.from_terms(*radial_terms(u.values, u.mesh, params))


def energy_gradient(u: Field, params: CsParams) -> np.ndarray:
    """d(energy_I(u).total)/du_i for every node i."""
    require_radial(u.mesh)
    return radial_gradient(u.values, u.mesh, params)


def el_residual(u: Field, params: CsParams) -> Field:
    """-u'' - u'/r + (omega + h^2/r^2 + A0 tail) u - |u|^(p-1) u on interior nodes."""
    require_radial(u.mesh)
    h = gauge_h(u)
    tail = a0_tail(u, h)
    r = u.nodes
    v = u.values
    d1 = derivative(u).values
    d2 = second_derivative(u).values

    inner = slice(1, -1)
    ri = r[inner]
    vi = v[inner]
    potential = params.omega + (h.values[inner] / ri) ** 2 + tail.values[inner]
    residual = np.zeros_like(v)
    residual[inner] = (
        -d2[inner] - d1[inner] / ri + potential * vi - np.abs(vi) ** (params.p - 1.0) * vi
    )
    return u.with_values(residual)


def nehari_value(u: Field, params: CsParams) -> float:
    """<I'_omega(u), u> = int |grad u|^2 + omega u^2 + 3/4 (nonlocal core) - int |u|^(p+1)."""
    e = energy_I(u, params)
    return 2.0 * e.kinetic + 2.0 * e.mass + 6.0 * e.nonlocal_ + (params.p + 1.0) * e.potential


def pointwise_density(t: np.ndarray, params: CsParams) -> np.ndarray:
    """f(t) = omega t^2/4 + t^4/8 - |t|^(p+1)/(p+1)."""
    t = np.abs(t)
    return 0.25 * params.omega * t ** 2 + t ** 4 / 8.0 - t ** (params.p + 1.0) / (params.p + 1.0)


def coercivity_bound(u: Field, params: CsParams) -> float:
    """Lower bound for I_omega(u) obtained from the fundamental inequality.

    Half the kinetic, mass and nonlocal energy plus 2*pi int f(u) r dr.
    """
    e = energy_I(u, params)
    density = u.with_values(pointwise_density(u.values, params))
    return 0.5 * (e.kinetic + e.mass + e.nonlocal_) + integrate_radial(density)


def cs_inequality_gap(u: Field) -> float:
    """2 (int |grad u|^2)^(1/2) (nonlocal core)^(1/2) - int u^4, nonnegative for radial u."""
    require_radial(u.mesh)
    r = u.nodes
    u2 = u.values ** 2
    grad_sq = 2.0 * np.pi * radial_forward_difference_energy(u)
    G = cumulative_trapezoid(r * u2, dx=u.mesh.spacing, initial=0.0)
    core = 2.0 * np.pi * np.dot(u.mesh.weights, u2 * G * G * _inverse_r(r))
    quartic = integrate_radial(u.with_values(u2 * u2))
    return float(2.0 * np.sqrt(grad_sq) * np.sqrt(core) - quartic)


def pointwise_profile(params: CsParams) -> PointwiseProfile:
    """Endpoints of {t > 0: f(t) < 0} and the depth c0 = -min f."""
    p, omega = params.p, params.omega

    def reduced(t: float) -> float:
        # f(t) / t^2, convex on t > 0 with the same sign as f
        return 0.25 * omega + t * t / 8.0 - t ** (p - 1.0) / (p + 1.0)

    t_low = (4.0 * (p - 1.0) / (p + 1.0)) ** (1.0 / (3.0 - p))
    if reduced(t_low) >= 0.0:
        return PointwiseProfile(alpha=0.0, beta=0.0, c0=0.0, exists_negative=False)

    if omega == 0.0:
        alpha = 0.0
    else:
        lo = t_low
        while reduced(lo) <= 0.0:
            lo *= 0.5
        alpha = brentq(reduced, lo, t_low, xtol=config.ROOT_XTOL)

    hi = 2.0 * t_low
    while reduced(hi) <= 0.0:
        hi *= 2.0
    beta = brentq(reduced, t_low, hi, xtol=config.ROOT_XTOL)

    def density(t: float) -> float:
        return float(pointwise_density(np.asarray(t), params))

    res = minimize_scalar(
        density, bounds=(alpha, beta), method="bounded",
        options={"xatol": config.EXTREMUM_XTOL},
    )
    return PointwiseProfile(alpha=float(alpha), beta=float(beta), c0=float(-res.fun), exists_negative=True)


def nonexistence_threshold(p: float) -> float:
    """omega_bar = max_{t>0} (t^(p-1) - 3/4 t^2).

    Above omega_bar the map t -> omega t^2 + 3/4 t^4 - t^(p+1) is nonnegative,
    which forces every solution of the stationary equation to vanish.
    """
    validate_p(p)
    t_star = (2.0 * (p - 1.0) / 3.0) ** (1.0 / (3.0 - p))
    closed_form = t_star ** (p - 1.0) - 0.75 * t_star ** 2

    t = np.linspace(0.0, 4.0 * t_star, 200_001)[1:]
    scanned = float(np.max(t ** (p - 1.0) - 0.75 * t ** 2))
    if scanned > closed_form + 1e-9 * max(1.0, abs(closed_form)):
        logger.warning(
            "omega_bar(%s): grid maximum %.12g exceeds closed form %.12g", p, scanned, closed_form
        )
    return float(closed_form)
