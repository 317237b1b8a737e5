"""Invariant checks behind the `verify` command.

Each check measures one quantity, compares it with a tolerance and returns
a Check. The fast level covers closed forms, soliton identities, the
psi/root duality, the discrete gradient and the nonexistence regime; the
full level adds the translated-profile rate and the ball minimizations on
large radii.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.optimize import brentq
from tqdm import tqdm

import config
from .cs_energy import (
    CsParams,
    cs_inequality_gap,
    el_residual,
    energy_gradient,
    energy_I,
    lumped_mass,
    nonexistence_threshold,
)
from .errors import CsPhaseError, DomainError
from .limit_problem import (
    SolitonParams,
    energy_J,
    hamiltonian_residual,
    limit_el_residual,
    omega0,
    omega1,
    psi_curve,
    sample_soliton,
    soliton_mass,
    soliton_relations,
    soliton_wk,
    solve_eq_k,
)
from .minimizer import (
    MinimizeConfig,
    TranslatedSoliton,
    ZeroPlusBump,
    escape_diagnostics,
    minimize_on_ball,
    translated_profile_energy,
)
from .radial_core import Field, Mesh1D

logger = logging.getLogger(__name__)

SAMPLE_EXPONENTS = (1.5, 2.0, 2.5)


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool

    def as_dict(self) -> dict:
        return asdict(self)


def _at_most(name: str, value: float, tolerance: float) -> Check:
    value = float(value)
    return Check(name, value, tolerance, bool(np.isfinite(value) and value <= tolerance))


@dataclass
class VerifyContext:
    rng: np.random.Generator
    omega0_fn: Callable[[float], float]


def random_radial_field(rng: np.random.Generator, mesh: Mesh1D, bumps: int = 3) -> Field:
    """Sum of Gaussian rings with random amplitude, centre and width, vanishing at r = R."""
    r = mesh.nodes
    values = np.zeros_like(r)
    for _ in range(bumps):
        amplitude = rng.uniform(0.2, 1.5)
        centre = rng.uniform(0.0, 0.5 * mesh.b)
        width = rng.uniform(0.5, 2.0)
        values += amplitude * np.exp(-((r - centre) / width) ** 2)
    values -= values[-1] * (r / mesh.b) ** 2
    return Field(mesh, values)


# --- closed forms at p = 2 ----------------------------------------------------

def check_p2_mass(ctx: VerifyContext) -> list[Check]:
    return [_at_most("p2_mass", abs(soliton_mass(2.0) - 6.0), 1e-8)]


def check_p2_omega1(ctx: VerifyContext) -> list[Check]:
    return [_at_most("p2_omega1", abs(omega1(2.0) - 2.0 / (9.0 * np.sqrt(3.0))), 1e-9)]


def check_p2_omega0(ctx: VerifyContext) -> list[Check]:
    return [_at_most("p2_threshold_omega0", abs(ctx.omega0_fn(2.0) - 2.0 / (5.0 * np.sqrt(15.0))), 1e-9)]


def check_p2_omega_bar(ctx: VerifyContext) -> list[Check]:
    t = np.linspace(0.0, 2.0, 2_000_001)
    scanned = float(np.max(t - 0.75 * t ** 2))
    return [
        _at_most("p2_omega_bar_closed_form", abs(nonexistence_threshold(2.0) - 1.0 / 3.0), 1e-10),
        _at_most("p2_omega_bar_grid_scan", abs(nonexistence_threshold(2.0) - scanned), 1e-10),
    ]


def check_p2_k2_at_omega0(ctx: VerifyContext) -> list[Check]:
    params = CsParams(2.0, ctx.omega0_fn(2.0))
    k2 = solve_eq_k(params).k2
    k2_error = abs(k2 - 1.0 / np.sqrt(15.0)) if k2 is not None else np.inf
    exact = CsParams(2.0, 2.0 / (5.0 * np.sqrt(15.0)))
    return [
        _at_most("p2_k2_at_omega0", k2_error, 1e-10),
        _at_most("p2_psi_zero_at_omega0", abs(psi_curve(1.0 / np.sqrt(15.0), exact)), 1e-12),
    ]


# --- solitons -----------------------------------------------------------------

def check_hamiltonian(ctx: VerifyContext) -> list[Check]:
    mesh = Mesh1D.line(40.0, 8000)
    return [_at_most("hamiltonian_residual", hamiltonian_residual(SolitonParams(2.0, 1.0), mesh), 1e-6)]


def check_relations(ctx: VerifyContext) -> list[Check]:
    kinetic, power = soliton_relations(2.0)
    return [
        _at_most("relation_kinetic", abs(kinetic - 6.0 / 5.0), 1e-7),
        _at_most("relation_power", abs(power - 36.0 / 5.0), 1e-7),
    ]


def check_limit_residuals(ctx: VerifyContext) -> list[Check]:
    checks = []
    for p in SAMPLE_EXPONENTS:
        params = CsParams(p, 0.8 * omega1(p))
        roots = solve_eq_k(params)
        for which in ("k1", "k2"):
            sp = SolitonParams(p, roots.root(which))
            U = sample_soliton(sp, Mesh1D.line(config.SOLITON_HALF_WIDTH_FACTOR / np.sqrt(sp.k), 16000))
            residual = np.max(np.abs(limit_el_residual(U, params).values))
            checks.append(_at_most(f"limit_residual_{which}_p{p:g}", residual, 1e-5))
    return checks


# --- psi curve and roots ------------------------------------------------------

def _fd_psi_derivative(k: float, params: CsParams, rel: float = 1e-5) -> float:
    dk = rel * k
    return float((psi_curve(k + dk, params) - psi_curve(k - dk, params)) / (2.0 * dk))


def check_psi_duality(ctx: VerifyContext) -> list[Check]:
    checks = []
    for p in SAMPLE_EXPONENTS:
        params = CsParams(p, 0.8 * omega1(p))
        roots = solve_eq_k(params)
        grid = np.geomspace(roots.k1 * 1e-2, roots.k2 * 1e2, 4001)
        slopes = np.array([_fd_psi_derivative(k, params) for k in grid])
        flips = np.nonzero(np.sign(slopes[:-1]) * np.sign(slopes[1:]) < 0)[0]
        zeros = [
            brentq(_fd_psi_derivative, grid[i], grid[i + 1], args=(params,), xtol=1e-14)
            for i in flips
        ]
        if len(zeros) != 2:
            checks.append(Check(f"psi_duality_p{p:g}", float(len(zeros)), 2.0, False))
            continue
        error = max(abs(zeros[0] - roots.k1) / roots.k1, abs(zeros[1] - roots.k2) / roots.k2)
        checks.append(_at_most(f"psi_duality_p{p:g}", error, 1e-6))
        gap = psi_curve(roots.k2, params) - psi_curve(roots.k1, params)
        checks.append(_at_most(f"psi_k1_above_k2_p{p:g}", gap, 0.0))
    return checks


def _psi_at_k2(omega: float, p: float) -> float:
    return float(psi_curve(solve_eq_k(CsParams(p, omega)).k2, CsParams(p, omega)))


def check_psi_sign_flip(ctx: VerifyContext) -> list[Check]:
    checks = []
    for p in SAMPLE_EXPONENTS:
        w1 = omega1(p)
        flip = brentq(_psi_at_k2, 0.01 * w1, w1 * (1.0 - 1e-6), args=(p,), xtol=1e-13)
        checks.append(_at_most(f"psi_sign_flip_p{p:g}", abs(flip - ctx.omega0_fn(p)), 1e-8))
        psi_at_omega0 = abs(_psi_at_k2(ctx.omega0_fn(p), p))
        checks.append(_at_most(f"omega0_system_p{p:g}", psi_at_omega0, 1e-8))
    return checks


# --- radial energy ----------------------------------------------------------------

def check_cs_inequality(ctx: VerifyContext) -> list[Check]:
    mesh = Mesh1D.radial(20.0, 2000)
    worst = min(cs_inequality_gap(random_radial_field(ctx.rng, mesh)) for _ in range(100))
    return [_at_most("cs_inequality_gap", -worst, 1e-8)]


def check_gradient(ctx: VerifyContext) -> list[Check]:
    mesh = Mesh1D.radial(20.0, 4000)
    params = CsParams(2.0, 0.1)
    u = random_radial_field(ctx.rng, mesh)
    grad = energy_gradient(u, params)
    worst = 0.0
    for _ in range(10):
        v = random_radial_field(ctx.rng, mesh).values
        eps = 1e-6
        plus = energy_I(u.with_values(u.values + eps * v), params).total
        minus = energy_I(u.with_values(u.values - eps * v), params).total
        numeric = (plus - minus) / (2.0 * eps)
        exact = float(np.dot(grad, v))
        worst = max(worst, abs(numeric - exact) / max(abs(exact), 1e-12))

    mass = lumped_mass(mesh)
    residual = el_residual(u, params).values[1:-1]
    scaled = grad[1:-1] / mass[1:-1]
    mismatch = np.max(np.abs(residual - scaled)) / max(np.max(np.abs(scaled)), 1e-12)
    return [
        _at_most("gradient_directional", worst, 1e-4),
        _at_most("el_residual_matches_gradient", mismatch, 1e-8),
    ]


def check_nonexistence_minimization(ctx: VerifyContext) -> list[Check]:
    params = CsParams(2.0, 0.5)
    checks = []
    for label, init in (("bump", ZeroPlusBump()), ("soliton", TranslatedSoliton(60.0))):
        res = minimize_on_ball(params, MinimizeConfig(radius=100.0, n=2000, max_iters=500, init=init))
        checks.append(_at_most(f"nonexistence_energy_{label}", -res.energy.total, 1e-8))
        checks.append(_at_most(f"nonexistence_amplitude_{label}", np.max(np.abs(res.u.values)), 1e-3))
    return checks


# --- large-radius checks ----------------------------------------------------------

def check_translated_rate(ctx: VerifyContext) -> list[Check]:
    params = CsParams(2.0, ctx.omega0_fn(2.0))
    k2 = solve_eq_k(params).k2
    mesh = Mesh1D.line_with_spacing(config.SOLITON_HALF_WIDTH_FACTOR / np.sqrt(k2), config.ASYMPTOTICS_SPACING)
    U = Field(mesh, soliton_wk(SolitonParams(2.0, k2), mesh.nodes))
    J = energy_J(U, params).total
    corrections = {}
    for rho in config.ASYMPTOTICS_RHOS:
        total = translated_profile_energy(U, rho, params).total
        corrections[rho] = total - 2.0 * np.pi * rho * J
    values = list(corrections.values())
    variation = abs(corrections[400.0] - corrections[200.0]) / abs(corrections[400.0])
    return [
        _at_most("translated_correction_negative", max(values), 0.0),
        _at_most("translated_correction_converges", variation, 0.1),
    ]


def _escape_runs(params: CsParams, max_iters: int) -> list:
    runs = []
    for radius in (100.0, 200.0, 400.0):
        cfg = MinimizeConfig(
            radius=radius, n=int(radius / config.MAX_SPACING), max_iters=max_iters,
            init=TranslatedSoliton(radius - 40.0),
        )
        runs.append(minimize_on_ball(params, cfg))
    return runs


def check_escape(ctx: VerifyContext) -> list[Check]:
    params = CsParams(2.0, 0.05)
    runs = _escape_runs(params, max_iters=300)
    report = escape_diagnostics(runs, params)
    ratio = report.slope_ratio if report.slope_ratio is not None else np.inf
    return [
        _at_most("escape_energy_R400", runs[-1].energy.total, -10.0),
        _at_most("escape_slope_ratio", abs(ratio - 1.0), 0.25),
        _at_most("escape_centroid_monotone", -float(np.min(np.diff(report.centroids))), 0.0),
    ]


def check_coercive_regime(ctx: VerifyContext) -> list[Check]:
    params = CsParams(2.0, 2.0 * omega1(2.0))
    checks = []
    for label, init in (("bump", ZeroPlusBump()), ("soliton", TranslatedSoliton(360.0))):
        cfg = MinimizeConfig(radius=400.0, n=8000, max_iters=300, init=init)
        res = minimize_on_ball(params, cfg)
        checks.append(_at_most(f"coercive_energy_{label}", -res.energy.total, 1e-3))
    return checks


FAST_CHECKS = [
    check_p2_mass,
    check_p2_omega1,
    check_p2_omega0,
    check_p2_omega_bar,
    check_p2_k2_at_omega0,
    check_hamiltonian,
    check_relations,
    check_limit_residuals,
    check_psi_duality,
    check_psi_sign_flip,
    check_cs_inequality,
    check_gradient,
    check_nonexistence_minimization,
]

FULL_CHECKS = FAST_CHECKS + [
    check_translated_rate,
    check_escape,
    check_coercive_regime,
]


def run_checks(
    level: str = "fast",
    seed: int = config.DEFAULT_SEED,
    omega0_fn: Callable[[float], float] | None = None,
    progress: bool = False,
) -> list[Check]:
    """Run every check of the level; a check that raises is reported as failed."""
    if level not in ("fast", "full"):
        raise DomainError(f"level must be fast or full, got {level!r}")
    ctx = VerifyContext(rng=np.random.default_rng(seed), omega0_fn=omega0_fn or omega0)
    suite = FAST_CHECKS if level == "fast" else FULL_CHECKS

    results: list[Check] = []
    for check in tqdm(suite, desc=f"verify {level}", disable=not progress):
        name = check.__name__.removeprefix("check_")
        try:
            produced = check(ctx)
        except (CsPhaseError, ArithmeticError, ValueError) as e:
            logger.error("check %s raised: %s", name, e)
            produced = [Check(name, float("nan"), 0.0, False)]
        for c in produced:
            logger.info("%s: %.6g (tolerance %.3g) %s", c.name, c.value, c.tolerance, "ok" if c.passed else "FAIL")
        results.extend(produced)
    return results
