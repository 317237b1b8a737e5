#!/usr/bin/env python3
"""
csphase - CLI Entry Point

Thresholds, solitons and ball minimization for the radial
Chern-Simons-Schrodinger energy with a power nonlinearity.
"""

import argparse
import logging
import re
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

import config
from src.errors import CsPhaseError, DomainError
from src.limit_problem import omega0, omega1
from src.cs_energy import nonexistence_threshold
from src.output import to_json
from src import pipeline

NAMED_FREQUENCIES = {
    "omega0": omega0,
    "omega1": omega1,
    "omega_bar": nonexistence_threshold,
}
_OMEGA_EXPR = re.compile(r"^\s*(?:([0-9.eE+-]+)\s*\*\s*)?(omega0|omega1|omega_bar)\s*$")


def parse_omega(text: str, p: float) -> float:
    """A number, a named threshold ('omega0') or a multiple of one ('0.8*omega1')."""
    try:
        return float(text)
    except ValueError:
        pass
    match = _OMEGA_EXPR.match(text)
    if match is None:
        raise DomainError(f"cannot read omega {text!r}; use a number or e.g. 2*omega1")
    factor = float(match.group(1)) if match.group(1) else 1.0
    return factor * NAMED_FREQUENCIES[match.group(2)](p)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Print the result as JSON on stdout")
    common.add_argument("--out", type=Path, default=None, help="Artifact path (file or directory)")
    common.add_argument(
        "--seed",
        type=int,
        default=config.DEFAULT_SEED,
        help=f"Seed of the randomized verification checks (default: {config.DEFAULT_SEED})"
    )
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level on stderr (default: WARNING)"
    )

    parser = argparse.ArgumentParser(
        description="csphase - Chern-Simons-Schrodinger thresholds and minimizers"
    )
    parser.add_argument("--version", action="version", version=f"csphase {config.VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    threshold = sub.add_parser("threshold", parents=[common], help="m, omega0, omega1, omega_bar for one p")
    threshold.add_argument("--p", type=float, required=True)
    threshold.set_defaults(handler=cmd_threshold)

    sweep = sub.add_parser("sweep", parents=[common], help="Threshold curves over a band of p")
    sweep.add_argument("--pmin", type=float, default=config.SWEEP_PMIN)
    sweep.add_argument("--pmax", type=float, default=config.SWEEP_PMAX)
    sweep.add_argument("--steps", type=int, default=config.SWEEP_STEPS)
    sweep.set_defaults(handler=cmd_sweep)

    soliton = sub.add_parser("soliton", parents=[common], help="Export w_k for a root of the frequency equation")
    soliton.add_argument("--p", type=float, required=True)
    soliton.add_argument("--omega", required=True, help="Number or named threshold, e.g. omega0")
    soliton.add_argument("--which", choices=["k1", "k2", "k0"], default="k2")
    soliton.add_argument("--n", type=int, default=config.SOLITON_INTERVALS)
    soliton.set_defaults(handler=cmd_soliton)

    minimize = sub.add_parser("minimize", parents=[common], help="Minimize I_omega on a Dirichlet ball")
    minimize.add_argument("--p", type=float, required=True)
    minimize.add_argument("--omega", required=True)
    minimize.add_argument("--radius", type=float, required=True)
    minimize.add_argument("--n", type=int, default=None, help="Grid intervals (default: radius / 0.05)")
    minimize.add_argument("--init", default="zero_plus_bump", help="zero_plus_bump or translated_soliton:<rho>")
    minimize.add_argument("--max-iters", type=int, default=config.DEFAULT_MAX_ITERS)
    minimize.add_argument("--grad-tol", type=float, default=config.DEFAULT_GRAD_TOL)
    minimize.add_argument("--step-init", type=float, default=config.DEFAULT_STEP_INIT)
    minimize.set_defaults(handler=cmd_minimize)

    verify = sub.add_parser("verify", parents=[common], help="Run the invariant checks")
    level = verify.add_mutually_exclusive_group()
    level.add_argument("--fast", dest="level", action="store_const", const="fast")
    level.add_argument("--full", dest="level", action="store_const", const="full")
    verify.set_defaults(handler=cmd_verify, level="fast")

    psi = sub.add_parser("psi", parents=[common], help="Tabulate psi(k) and dpsi/dk")
    psi.add_argument("--p", type=float, required=True)
    psi.add_argument("--omega", required=True)
    psi.add_argument("--kmin", type=float, default=None)
    psi.add_argument("--kmax", type=float, default=None)
    psi.add_argument("--points", type=int, default=config.PSI_POINTS)
    psi.set_defaults(handler=cmd_psi)

    asymptotics = sub.add_parser("asymptotics", parents=[common], help="Energy of translated solitons vs rho")
    asymptotics.add_argument("--p", type=float, required=True)
    asymptotics.add_argument("--omega", required=True)
    asymptotics.add_argument("--which", choices=["k1", "k2", "k0"], default="k2")
    asymptotics.add_argument("--rho", type=float, nargs="+", default=list(config.ASYMPTOTICS_RHOS))
    asymptotics.set_defaults(handler=cmd_asymptotics)

    return parser


def _out(args, default_name: str) -> Path:
    return args.out if args.out is not None else config.OUTPUT_DIR / default_name


def cmd_threshold(args) -> dict:
    return pipeline.run_threshold(args.p, out=args.out, verbose=not args.json)


def cmd_sweep(args) -> dict:
    return pipeline.run_sweep(
        _out(args, "sweep.csv"), pmin=args.pmin, pmax=args.pmax, steps=args.steps, verbose=not args.json
    )


def cmd_soliton(args) -> dict:
    return pipeline.run_soliton(
        args.p, parse_omega(args.omega, args.p), args.which, _out(args, "soliton.csv"),
        n=args.n, verbose=not args.json,
    )


def cmd_minimize(args) -> dict:
    n = args.n if args.n is not None else int(round(args.radius / config.MAX_SPACING))
    return pipeline.run_minimize(
        args.p,
        parse_omega(args.omega, args.p),
        args.radius,
        n,
        args.init,
        out_dir=_out(args, "minimize"),
        max_iters=args.max_iters,
        grad_tol=args.grad_tol,
        step_init=args.step_init,
        verbose=not args.json,
    )


def cmd_verify(args) -> dict:
    return pipeline.run_verify(level=args.level, seed=args.seed, out=args.out, verbose=not args.json)


def cmd_psi(args) -> dict:
    return pipeline.run_psi(
        args.p, parse_omega(args.omega, args.p), _out(args, "psi.csv"),
        kmin=args.kmin, kmax=args.kmax, points=args.points, verbose=not args.json,
    )


def cmd_asymptotics(args) -> dict:
    return pipeline.run_asymptotics(
        args.p, parse_omega(args.omega, args.p), _out(args, "asymptotics.csv"),
        which=args.which, rhos=tuple(args.rho), verbose=not args.json,
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=args.log_level,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
        stream=sys.stderr,
    )

    if not args.json:
        print("=" * 50)
        print(f"csphase {config.VERSION}: {args.command}")
        print("=" * 50)

    try:
        result = args.handler(args)
    except CsPhaseError as e:
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        return config.EXIT_IO
    except KeyboardInterrupt:
        print("\nInterrupted by user", file=sys.stderr)
        return 1

    if args.json:
        sys.stdout.write(to_json(result))
    if args.command == "verify" and not result["passed"]:
        return config.EXIT_VERIFY_FAILED
    return config.EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
