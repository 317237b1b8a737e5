"""Command pipelines: one run_* function per CLI subcommand"""

import logging
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from tqdm import tqdm

import config
from .cs_energy import CsParams, validate_p
from .errors import DivergenceError, DomainError
from .limit_problem import (
    SolitonParams,
    asymptotic_offset,
    degenerate_k,
    energy_J,
    psi_curve,
    psi_derivative,
    soliton_mesh,
    soliton_wk,
    soliton_wk_prime,
    solve_eq_k,
    thresholds,
)
from .minimizer import MinimizeConfig, minimize_on_ball, parse_init, translated_profile_energy
from .output import ArtifactWriter, manifest_path_for, write_table
from .radial_core import Field, Mesh1D
from .verify import run_checks

logger = logging.getLogger(__name__)

SWEEP_HEADER = ["p", "m", "omega0", "omega1", "omega_bar"]


def _banner(title: str, lines: list[str], verbose: bool) -> None:
    if not verbose:
        return
    print("\n" + "=" * 50)
    print(title)
    for line in lines:
        print(f"  {line}")


def run_threshold(p: float, out: Optional[Path] = None, verbose: bool = True) -> dict:
    """
    Thresholds m, omega_0, omega_1, omega_bar for one exponent.

    Returns:
        dict with m, omega0, omega1, omega_bar, k0 and the root-count regimes
    """
    t = thresholds(p)
    result = t.as_dict()
    result["k0"] = degenerate_k(p)
    result["regimes"] = {
        "two_roots": f"0 < omega < {t.omega1:.9g}",
        "one_root": f"omega = {t.omega1:.9g} (k0 = {result['k0']:.9g}) or omega = 0",
        "no_root": f"omega > {t.omega1:.9g}",
    }

    if out is not None:
        with ArtifactWriter("threshold", {"p": p}, manifest_path_for(out)) as writer:
            writer.write_json(out, result)

    _banner(
        f"Thresholds at p = {p:g}",
        [
            f"m={t.m:.6f}",
            f"omega0={t.omega0:.6f}",
            f"omega1={t.omega1:.6f}",
            f"omega_bar={t.omega_bar:.6f}",
            f"k0={result['k0']:.6f}",
        ],
        verbose,
    )
    return result


def sweep_table(pmin: float, pmax: float, steps: int, progress: bool = False) -> np.ndarray:
    """Rows (p, m, omega0, omega1, omega_bar) on steps+1 equally spaced exponents."""
    validate_p(pmin)
    validate_p(pmax)
    if not pmin < pmax:
        raise DomainError(f"need pmin < pmax, got {pmin} >= {pmax}")
    if steps < 1:
        raise DomainError(f"steps must be >= 1, got {steps}")

    rows = []
    for p in tqdm(np.linspace(pmin, pmax, steps + 1), desc="sweep", disable=not progress):
        t = thresholds(float(p))
        rows.append((t.p, t.m, t.omega0, t.omega1, t.omega_bar))
    return np.array(rows)


def run_sweep(
    out: Path,
    pmin: float = config.SWEEP_PMIN,
    pmax: float = config.SWEEP_PMAX,
    steps: int = config.SWEEP_STEPS,
    verbose: bool = True,
) -> dict:
    """
    Threshold curves over an exponent band, written as CSV.

    Returns:
        dict with rows, out path and the largest omega0/omega1 ratio seen
    """
    table = sweep_table(pmin, pmax, steps, progress=verbose)
    write_table(out, SWEEP_HEADER, table, "sweep", {"pmin": pmin, "pmax": pmax, "steps": steps})

    stats = {
        "rows": int(table.shape[0]),
        "out": str(out),
        "max_omega0_over_omega1": float(np.max(table[:, 2] / table[:, 3])),
    }
    _banner(
        "Sweep complete!",
        [
            f"Rows: {stats['rows']} (p from {pmin:g} to {pmax:g})",
            f"Max omega0/omega1: {stats['max_omega0_over_omega1']:.6f}",
            f"Written to: {out}",
        ],
        verbose,
    )
    return stats


def soliton_frequency(params: CsParams, which: str) -> float:
    """k for which in {k1, k2, k0}; raises RootUnavailableError when the root does not exist."""
    if which == "k0":
        return degenerate_k(params.p)
    if which not in ("k1", "k2"):
        raise DomainError(f"which must be k1, k2 or k0, got {which!r}")
    return solve_eq_k(params).root(which)


def run_soliton(
    p: float,
    omega: float,
    which: str,
    out: Path,
    n: int = config.SOLITON_INTERVALS,
    verbose: bool = True,
) -> dict:
    """
    Export r, w_k(r), w_k'(r) for the selected root of the frequency equation.

    Returns:
        dict with k, w(0), L and out path
    """
    params = CsParams(p, omega)
    k = soliton_frequency(params, which)
    sp = SolitonParams(p, k)
    mesh = soliton_mesh(k, n)
    r = mesh.nodes
    table = np.column_stack([r, soliton_wk(sp, r), soliton_wk_prime(sp, r)])
    write_table(out, ["r", "w", "wprime"], table, "soliton",
                {"p": p, "omega": omega, "which": which, "n": n})

    stats = {"k": k, "w0": float(soliton_wk(sp, 0.0)), "half_width": mesh.b, "out": str(out)}
    _banner(
        f"Soliton {which} exported",
        [f"k={k:.9g}", f"w(0)={stats['w0']:.9g}", f"Mesh: [-{mesh.b:g}, {mesh.b:g}], n={n}", f"Written to: {out}"],
        verbose,
    )
    return stats


def run_minimize(
    p: float,
    omega: float,
    radius: float,
    n: int,
    init: str,
    out_dir: Path = config.OUTPUT_DIR,
    max_iters: int = config.DEFAULT_MAX_ITERS,
    grad_tol: float = config.DEFAULT_GRAD_TOL,
    step_init: float = config.DEFAULT_STEP_INIT,
    verbose: bool = True,
) -> dict:
    """
    Minimize I_omega on B(0, R) and write profile.csv, energy_trace.csv and summary.json.

    Returns:
        the summary dict (energy breakdown, grad_norm, centroid_xi, l2_mass, iters, converged)
    """
    params = CsParams(p, omega)
    cfg = MinimizeConfig(
        radius=radius, n=n, max_iters=max_iters, grad_tol=grad_tol,
        step_init=step_init, init=parse_init(init),
    )
    out_dir = Path(out_dir)
    parameters = {
        "p": p, "omega": omega, "radius": radius, "n": n, "init": init,
        "max_iters": max_iters, "grad_tol": grad_tol, "step_init": step_init,
    }
    trace_path = out_dir / "energy_trace.csv"

    with ArtifactWriter("minimize", parameters, out_dir / "manifest.json") as writer:
        try:
            result = minimize_on_ball(params, cfg)
        except DivergenceError as e:
            trace = np.array(e.energy_trace, dtype=float)
            writer.write_csv(trace_path, ["iteration", "energy"],
                             np.column_stack([np.arange(trace.size), trace]))
            raise DivergenceError(f"{e} (energy trace: {trace_path})", e.energy_trace) from e

        writer.write_csv(out_dir / "profile.csv", ["r", "u"], np.column_stack([result.u.nodes, result.u.values]))
        trace = np.array(result.energy_trace)
        writer.write_csv(trace_path, ["iteration", "energy"], np.column_stack([np.arange(trace.size), trace]))
        summary = result.summary()
        writer.write_json(out_dir / "summary.json", summary)

    _banner(
        "Minimization complete!",
        [
            f"Energy: {result.energy.total:.9g} (initial {result.initial_energy:.9g})",
            f"Iterations: {result.iters} (converged: {result.converged})",
            f"Gradient norm: {result.grad_norm:.3g}",
            f"L2 mass: {result.l2_mass:.6g}, centroid: {result.centroid_xi:.6g}",
            f"Written to: {out_dir}",
        ],
        verbose,
    )
    return summary


def run_psi(
    p: float,
    omega: float,
    out: Path,
    kmin: Optional[float] = None,
    kmax: Optional[float] = None,
    points: int = config.PSI_POINTS,
    verbose: bool = True,
) -> dict:
    """
    Tabulate psi(k) = J_omega(w_k) and dpsi/dk on a log-spaced k grid.

    Returns:
        dict with the grid bounds, the roots of the frequency equation and out path
    """
    params = CsParams(p, omega)
    k0 = degenerate_k(p)
    kmin = kmin if kmin is not None else config.PSI_KMIN_FACTOR * k0
    kmax = kmax if kmax is not None else config.PSI_KMAX_FACTOR * k0
    if not 0.0 < kmin < kmax:
        raise DomainError(f"need 0 < kmin < kmax, got {kmin}, {kmax}")
    if points < 2:
        raise DomainError("psi curve needs at least 2 points")

    k = np.geomspace(kmin, kmax, points)
    table = np.column_stack([k, psi_curve(k, params), psi_derivative(k, params)])
    write_table(out, ["k", "psi", "dpsi"], table, "psi",
                {"p": p, "omega": omega, "kmin": kmin, "kmax": kmax, "points": points})

    roots = solve_eq_k(params)
    stats = {"kmin": kmin, "kmax": kmax, "count": roots.count, "k1": roots.k1, "k2": roots.k2, "out": str(out)}
    _banner(
        "psi curve exported",
        [f"k in [{kmin:.6g}, {kmax:.6g}], {points} points",
         f"Roots: {roots.count} (k1={roots.k1}, k2={roots.k2})",
         f"Written to: {out}"],
        verbose,
    )
    return stats


def asymptotics_table(
    U: Field, rhos, params: CsParams, progress: bool = False
) -> np.ndarray:
    """Rows (rho, I(U_rho), 2 pi rho J(U), correction, predicted correction)."""
    J = energy_J(U, params).total
    predicted = -asymptotic_offset(U)
    rows = []
    for rho in tqdm(rhos, desc="rho", disable=not progress):
        total = translated_profile_energy(U, float(rho), params).total
        linear = 2.0 * np.pi * rho * J
        rows.append((rho, total, linear, total - linear, predicted))
    return np.array(rows)


def run_asymptotics(
    p: float,
    omega: float,
    out: Path,
    which: str = "k2",
    rhos=config.ASYMPTOTICS_RHOS,
    spacing: float = config.ASYMPTOTICS_SPACING,
    verbose: bool = True,
) -> dict:
    """
    Energy of the soliton w_k translated to radius rho, against its linear asymptote.

    Returns:
        dict with J(U), the predicted offset and out path
    """
    params = CsParams(p, omega)
    k = soliton_frequency(params, which)
    mesh = Mesh1D.line_with_spacing(config.SOLITON_HALF_WIDTH_FACTOR / np.sqrt(k), spacing)
    U = Field(mesh, soliton_wk(SolitonParams(p, k), mesh.nodes))
    table = asymptotics_table(U, rhos, params, progress=verbose)
    write_table(out, ["rho", "total", "linear", "correction", "predicted"], table, "asymptotics",
                {"p": p, "omega": omega, "which": which, "rhos": list(rhos), "spacing": spacing})

    stats = {"k": k, "J": float(energy_J(U, params).total), "predicted": float(table[0, 4]), "out": str(out)}
    _banner(
        "Asymptotics complete!",
        [f"k={k:.9g}, J(U)={stats['J']:.6g}",
         f"Predicted correction: {stats['predicted']:.6g}",
         f"Written to: {out}"],
        verbose,
    )
    return stats


def run_verify(
    level: str = "fast",
    seed: int = config.DEFAULT_SEED,
    out: Optional[Path] = None,
    omega0_fn: Optional[Callable[[float], float]] = None,
    verbose: bool = True,
) -> dict:
    """
    Run the invariant checks.

    Returns:
        dict with passed (bool), failed check names and the full check list
    """
    checks = run_checks(level=level, seed=seed, omega0_fn=omega0_fn, progress=verbose)
    failed = [c.name for c in checks if not c.passed]
    report = {
        "level": level,
        "seed": seed,
        "passed": not failed,
        "failed": failed,
        "checks": [c.as_dict() for c in checks],
    }
    if out is not None:
        with ArtifactWriter("verify", {"level": level, "seed": seed}, manifest_path_for(out)) as writer:
            writer.write_json(out, report)

    if verbose:
        print("\n" + "=" * 50)
        for c in checks:
            status = "ok  " if c.passed else "FAIL"
            print(f"  [{status}] {c.name}: {c.value:.6g} (tolerance {c.tolerance:.3g})")
    _banner(
        "Verification passed" if not failed else "Verification FAILED",
        [f"Checks: {len(checks)}, failed: {len(failed)}"] + [f"- {name}" for name in failed],
        verbose,
    )
    return report
