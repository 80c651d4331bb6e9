"""Command-line front end.

    gqsearch search    --theta pi/2 --phi pi/2 --iters 10 --round 2
    gqsearch sweep     --theta-range pi/4:3pi/2 --phi-range pi/4:3pi/2 --steps 6
    gqsearch compile   --theta pi/2 --phi pi/2 --out q.seq
    gqsearch pulse-sim --theta pi/2 --phi pi/2 --iters 6 --density-out rho.json
    gqsearch compare   theory.json experiment.json

Exit codes: 0 success, 2 usage or validation error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import re
import sys
from pathlib import Path

import numpy as np

from gqsearch import analysis, nmr
from gqsearch.search import SearchConfig, grover_generalized

EXIT_USAGE = 2
EXIT_IO = 3

_PI_FORM = re.compile(r"^([+-]?)(\d+(?:\.\d*)?|\.\d+)?\s*\*?\s*pi(?:\s*/\s*(\d+(?:\.\d*)?|\.\d+))?$")


class UsageError(Exception):
    pass


def parse_angle(text: str) -> float:
    """Radians from ``1.5708``, ``pi``, ``pi/2``, ``3pi/2``, ``-3*pi/4`` and the like."""
    s = text.strip().lower()
    m = _PI_FORM.match(s)
    if m:
        sign, mult, div = m.groups()
        value = (float(mult) if mult else 1.0) * math.pi / (float(div) if div else 1.0)
        if not math.isfinite(value) or (div and float(div) == 0):
            raise argparse.ArgumentTypeError(f"invalid angle {text!r}")
        return -value if sign == "-" else value
    try:
        value = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid angle {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"invalid angle {text!r}")
    return value


def parse_range(text: str) -> tuple[float, float]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise argparse.ArgumentTypeError(f"range must look like LO:HI, got {text!r}")
    return parse_angle(lo), parse_angle(hi)


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _config(args) -> SearchConfig:
    try:
        return SearchConfig(n=args.n, tau=args.tau, theta=args.theta, phi=args.phi, iterations=args.iters)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _check_open_phase(value: float, flag: str) -> None:
    if not 0 < value < 2 * math.pi:
        raise UsageError(f"{flag} must lie in (0, 2pi), got {value!r}")


def cmd_search(args) -> int:
    config = _config(args)
    trace = grover_generalized(config, keep_states=False)
    rows = analysis.trace_rows(trace, include_initial=config.iterations == 0)
    if args.format == "json":
        doc = {
            "config": {"n": config.n, "tau": config.tau, "theta": config.theta, "phi": config.phi,
                       "iterations": config.iterations},
            "steps": rows,
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        _emit(analysis.trace_to_csv(rows, args.round), args.out)
    return 0


def _linspace(lo: float, hi: float, steps: int) -> list[float]:
    if steps == 1 or lo == hi:
        return [lo]
    return [float(x) for x in np.linspace(lo, hi, steps)]


def cmd_sweep(args) -> int:
    for flag, (lo, hi) in (("--theta-range", args.theta_range), ("--phi-range", args.phi_range)):
        if lo > hi:
            raise UsageError(f"{flag} is empty ({lo} > {hi})")
        if lo <= 0 or hi > 2 * math.pi + 1e-12:
            raise UsageError(f"{flag} must lie within (0, 2pi]")
    if args.steps < 1:
        raise UsageError("--steps must be >= 1")
    if args.iters < 1:
        raise UsageError("--iters must be >= 1")
    if not 0 <= args.tau < 2**args.n:
        raise UsageError(f"marked index {args.tau} out of range for n={args.n}")
    cells = []
    for theta in _linspace(*args.theta_range, args.steps):
        for phi in _linspace(*args.phi_range, args.steps):
            trace = grover_generalized(SearchConfig(args.n, args.tau, theta, phi, args.iters), keep_states=False)
            best = trace.best_step()
            cells.append({"theta": theta, "phi": phi, "max_p_success": best.probability, "best_step": best.step})
    if args.format == "json":
        _emit(json.dumps({"cells": cells}, indent=2) + "\n", args.out)
    else:
        lines = ["theta,phi,max_p_success,best_step"]
        lines += [f"{c['theta']!r},{c['phi']!r},{c['max_p_success']!r},{c['best_step']}" for c in cells]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _system(args) -> nmr.SpinSystem:
    try:
        return nmr.SpinSystem(j_coupling=args.j, hard_pulse_duration=args.pulse_us * 1e-6)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_compile(args) -> int:
    _check_open_phase(args.theta, "--theta")
    _check_open_phase(args.phi, "--phi")
    if not 0 <= args.tau < 4:
        raise UsageError(f"marked index {args.tau} out of range for two spins")
    system = _system(args)
    seq = nmr.compile_iteration(args.theta, args.phi, args.tau, compact=not args.expanded)
    seq = seq.reordered(nmr.TimeOrder.FIRST_LISTED_FIRST)
    _emit(nmr.format_sequence(seq, system), args.out)
    return 0


def cmd_pulse_sim(args) -> int:
    system = _system(args)
    if args.iters < 0:
        raise UsageError("--iters must be >= 0")
    if not 0 <= args.tau < 4:
        raise UsageError(f"marked index {args.tau} out of range for two spins")
    if args.sequence is not None:
        text = Path(args.sequence).read_text()
        try:
            seq, _ = nmr.parse_sequence(text)
        except nmr.SequenceFormatError as exc:
            raise UsageError(f"{args.sequence}: {exc}") from None
        walsh = args.walsh
    else:
        _check_open_phase(args.theta, "--theta")
        _check_open_phase(args.phi, "--phi")
        seq = nmr.compile_iteration(args.theta, args.phi, args.tau)
        walsh = True
    _, states = nmr.run_pulse_path(args.theta, args.phi, args.iters, args.tau, system, iteration=seq, walsh=walsh)
    populations = [float(s[args.tau, args.tau].real) for s in states]
    final = analysis.density_to_json(states[-1])
    if args.density_out:
        Path(args.density_out).write_text(json.dumps(final) + "\n")
    if args.format == "json":
        doc = {"marked_population": [{"step": k, "population": p} for k, p in enumerate(populations)],
               "density": final}
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
    else:
        lines = ["step,marked_population"] + [f"{k},{p!r}" for k, p in enumerate(populations)]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_compare(args) -> int:
    try:
        theory = analysis.load_density(args.theory)
        experiment = analysis.load_density(args.experiment)
        err = analysis.relative_error(theory, experiment)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        _emit(json.dumps({"delta_rho": err, "percent": 100 * err, "norm": "frobenius"}) + "\n", args.out)
    else:
        _emit(f"delta_rho={err:.12g} ({100 * err:.2f}%)\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gqsearch", description="Generalized phase-rotation quantum search.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_out(p, formats=("csv", "json")):
        p.add_argument("--format", choices=formats, default=formats[0])
        p.add_argument("--out", default=None, help="output path (default: standard output)")

    def register(p, n=True):
        if n:
            p.add_argument("--n", type=int, default=2, help="qubit count")
        p.add_argument("--tau", type=int, default=3, help="marked basis index")

    def spin_system(p):
        p.add_argument("--j", type=float, default=nmr.J_COUPLING_HZ, help="J coupling in Hz")
        p.add_argument("--pulse-us", type=float, default=nmr.HARD_PULSE_SECONDS * 1e6,
                       help="hard pulse duration in microseconds")

    p = sub.add_parser("search", help="ideal state-vector search trace")
    register(p)
    p.add_argument("--theta", type=parse_angle, default=math.pi / 2)
    p.add_argument("--phi", type=parse_angle, default=math.pi / 2)
    p.add_argument("--iters", type=int, default=10)
    p.add_argument("--round", type=int, default=None, metavar="PLACES",
                   help="round the magnitude columns half-up to PLACES decimals")
    common_out(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("sweep", help="max success probability over a (theta, phi) grid")
    register(p)
    p.add_argument("--theta-range", type=parse_range, default=(math.pi / 4, 3 * math.pi / 2))
    p.add_argument("--phi-range", type=parse_range, default=(math.pi / 4, 3 * math.pi / 2))
    p.add_argument("--steps", type=int, default=6)
    p.add_argument("--iters", type=int, default=10)
    common_out(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("compile", help="write the pulse sequence of one search iteration")
    register(p, n=False)
    p.add_argument("--theta", type=parse_angle, required=True)
    p.add_argument("--phi", type=parse_angle, required=True)
    p.add_argument("--expanded", action="store_true", help="W-sandwiched diffusion plus oracle instead of the compact form")
    spin_system(p)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("pulse-sim", help="simulate the pulse path from a pseudo-pure |00>")
    register(p, n=False)
    p.add_argument("--theta", type=parse_angle, default=math.pi / 2)
    p.add_argument("--phi", type=parse_angle, default=math.pi / 2)
    p.add_argument("--iters", type=int, default=10)
    p.add_argument("--sequence", default=None, help="pulse-sequence file repeated --iters times")
    p.add_argument("--walsh", action="store_true", help="with --sequence, apply W before the repetitions")
    p.add_argument("--density-out", default=None, help="write the final effective density matrix (JSON)")
    spin_system(p)
    common_out(p)
    p.set_defaults(func=cmd_pulse_sim)

    p = sub.add_parser("compare", help="relative error between two density-matrix files")
    p.add_argument("theory")
    p.add_argument("experiment")
    common_out(p, formats=("text", "json"))
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"gqsearch {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"gqsearch {args.command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
