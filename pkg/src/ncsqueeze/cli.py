"""Command-line entry point.

Exit codes: 0 success, 2 bad flags, 3 some points unconverged, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings

from . import __version__
from .beamsplitter import make_config
from .entanglement import entropy_of_state
from .model import DeformedOscillator
from .states import (
    DEFAULT_TAIL_TOL,
    Family,
    StateSpec,
    TruncationWarning,
    build_state,
    converge_truncation,
    fock_state,
)
from . import sweep

EXIT_OK, EXIT_USAGE, EXIT_UNCONVERGED, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _add_state_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", default="nc-squeezed",
                   help="nc-coherent, nc-squeezed, ho-squeezed or ho-coherent")
    p.add_argument("--alpha", default="0", help="displacement, e.g. 1 or 0.5+0.2j")
    p.add_argument("--zeta", default="0", help="squeezing parameter (0 for coherent families)")
    p.add_argument("--tau", type=float, default=0.0, help="deformation parameter tau >= 0")
    p.add_argument("--levels", default="auto", help="Fock truncation N (>= 8) or 'auto'")
    p.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL,
                   help="tail-mass tolerance for convergence (default %(default)g)")


def _state_from_args(args):
    try:
        spec = StateSpec(Family.parse(args.family), sweep.parse_complex(args.alpha),
                         sweep.parse_complex(args.zeta), DeformedOscillator(args.tau))
        levels = sweep.parse_levels(args.levels)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        if levels == "auto":
            return converge_truncation(spec, args.tail_tol, sweep.AUTO_N_START, sweep.AUTO_N_MAX)
        vec = build_state(spec, levels)
    return vec, vec.tail_mass < args.tail_tol


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_state(args) -> int:
    vec, converged = _state_from_args(args)
    payload = vec.to_json()
    payload["converged"] = converged
    _emit(json.dumps(payload) + "\n", args.output)
    return EXIT_OK if converged else EXIT_UNCONVERGED


def cmd_entropy(args) -> int:
    bs = make_config(args.theta, args.phi)
    if args.fock is not None:
        if args.fock < 0:
            raise UsageError("--fock must be >= 0")
        vec, converged = fock_state(args.fock), True
        zeta, tau, alpha = 0j, 0.0, 0j
    else:
        vec, converged = _state_from_args(args)
        alpha, zeta, tau = vec.spec.alpha, vec.spec.zeta, vec.spec.tau
    res = entropy_of_state(vec, bs, von_neumann=args.von_neumann, converged=converged)
    row = {
        "alpha": alpha, "zeta": zeta, "tau": tau, "theta": bs.theta, "phi": bs.phi,
        "levels": res.truncation, "linear_entropy": res.linear_entropy, "purity": res.purity,
        "von_neumann": res.von_neumann, "converged": res.converged, "tail_mass": res.tail_mass,
    }
    _emit(sweep.render([row], args.format), args.output)
    return EXIT_OK if converged else EXIT_UNCONVERGED


def _sweep_config(args) -> sweep.SweepConfig:
    data = {}
    if args.config:
        with open(args.config) as fh:
            data = json.load(fh)
    flags = {
        "family": args.family,
        "alpha_grid": args.alpha,
        "zeta": args.zeta,
        "tau_grid": args.tau,
        "theta": args.theta,
        "phi": args.phi,
        "levels": args.levels,
        "tail_tol": args.tail_tol,
        "output_path": args.output,
        "output_format": args.format,
    }
    data.update({k: v for k, v in flags.items() if v is not None})
    return sweep.SweepConfig.from_dict(data)


def cmd_sweep(args) -> int:
    try:
        config = _sweep_config(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        raise UsageError(str(exc)) from exc
    rows = sweep.run_sweep(config, args.workers)
    text = sweep.render(rows, config.output_format)
    sweep.write_output(text, config.output_path, sweep.metadata(config, rows=rows))
    return sweep.exit_status(rows)


def cmd_figure(args) -> int:
    if args.name not in sweep.PRESETS:
        raise UsageError(f"unknown figure preset {args.name!r} (choose from {', '.join(sweep.PRESETS)})")
    preset, rows = sweep.run_figure(args.name, args.workers)
    text = sweep.render(rows, args.format, overlay=preset.kind == "overlay")
    path = args.output if args.output is not None else f"{args.name}.{args.format}"
    if path == "-":
        path = None
    sweep.write_output(text, path, sweep.metadata(preset.config, preset=preset, rows=rows))
    return sweep.exit_status(rows)


def cmd_selftest(args) -> int:
    from .selftest import run_checks

    failures = 0
    for name, ok, detail in run_checks():
        failures += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
    return EXIT_OK if failures == 0 else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ncsqueeze",
        description="Deformed-oscillator coherent/squeezed states and beam-splitter entanglement.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", help="build one normalized state and print it as JSON")
    _add_state_flags(p)
    p.add_argument("--output", "-o", help="write JSON here instead of stdout")
    p.set_defaults(func=cmd_state)

    p = sub.add_parser("entropy", help="entropy of one state after a beam splitter with vacuum")
    _add_state_flags(p)
    p.add_argument("--fock", type=int, help="use the number state |n> instead of a state family")
    p.add_argument("--theta", type=float, default=math.pi / 2, help="splitter angle (default pi/2)")
    p.add_argument("--phi", type=float, default=0.0, help="splitter phase (default 0)")
    p.add_argument("--von-neumann", action="store_true", help="also report von Neumann entropy")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("sweep", help="evaluate entropy over an (alpha, tau) grid")
    p.add_argument("--config", help="JSON file with SweepConfig fields; flags override it")
    p.add_argument("--family")
    p.add_argument("--alpha", help="alpha grid: start:stop:step or comma list")
    p.add_argument("--zeta")
    p.add_argument("--tau", help="tau grid: start:stop:step or comma list")
    p.add_argument("--theta", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--levels")
    p.add_argument("--tail-tol", type=float)
    p.add_argument("--output", "-o")
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--workers", type=int, help=f"worker processes (default ${sweep.WORKERS_ENV} or 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="regenerate the data behind a figure preset")
    p.add_argument("name", help=", ".join(sweep.PRESETS))
    p.add_argument("--output", "-o", help="output path (default <name>.<format>; '-' for stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("selftest", help="run the built-in oracle and fixed-point checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.exit(EXIT_USAGE, f"{parser.prog}: error: {exc}\n")
    except (ArithmeticError, RuntimeError) as exc:
        print(f"{parser.prog}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
