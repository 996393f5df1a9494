"""Command-line entry point: ``partialpump {steady,spectrum,sweep,classify,oracle-check}``."""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_model_args(p):
    p.add_argument("--model", required=True,
                   choices=["toy", "interacting", "collective_pump", "auxiliary", "hp_toy"])
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--phi", type=float, default=0.0)
    p.add_argument("--V", type=float, default=0.0)
    p.add_argument("--kappa", type=float, default=0.0)
    p.add_argument("--basis", choices=["dicke", "hp"], default="dicke")
    p.add_argument("--n-cut", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="partialpump", description=__doc__)
    parser.add_argument("--json", action="store_true", help="machine-readable output and errors")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("steady", help="steady-state observables of one model point")
    _add_model_args(p)
    p.add_argument("--k-max", type=int, default=3)

    p = sub.add_parser("spectrum", help="emission spectrum of one model point")
    _add_model_args(p)
    p.add_argument("--omega-min", type=float)
    p.add_argument("--omega-max", type=float)
    p.add_argument("--points", type=int, default=4001)
    p.add_argument("--per-mode", action="store_true")
    p.add_argument("--output", type=Path, help="CSV file for (omega, S[, modes])")
    p.add_argument("--svg", type=Path)

    p = sub.add_parser("sweep", help="two-axis sweep from a YAML config")
    p.add_argument("config", type=Path)

    p = sub.add_parser("classify", help="relabel a saved sweep without solving")
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--epsilon-c", type=float, required=True)
    p.add_argument("--N", type=int, help="needed for CSV input")
    p.add_argument("--output", type=Path)

    p = sub.add_parser("oracle-check", help="compare solvers against reference results")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--all", action="store_true")
    g.add_argument("--case", choices=["two_spin", "brute_force", "thermal", "hp"], action="append")
    return parser


def _spec(args):
    from .liouvillian import ModelSpec
    return ModelSpec(args.model, args.N, args.w, phi=args.phi, V=args.V, kappa=args.kappa,
                     basis=args.basis, n_cut=args.n_cut)


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def cmd_steady(args, out):
    from .observables import evaluate
    from .steady import steady_state
    state = steady_state(_spec(args))
    obs = evaluate(state, args.k_max)
    payload = {"Sz": obs.Sz, "intensity": obs.intensity,
               **{f"g{k}": _num(v) for k, v in sorted(obs.g.items())},
               "phase_in": obs.phase_in, "residual": state.residual_norm,
               "min_eigenvalue": state.min_eigenvalue}
    if args.json:
        payload["rho_real"] = state.rho.real.tolist()
        payload["rho_imag"] = state.rho.imag.tolist()
        out.write(json.dumps(payload) + "\n")
    else:
        for k, v in payload.items():
            out.write(f"{k:>15} {v}\n" if isinstance(v, str) else f"{k:>15} {v:.10g}\n")
        with np.printoptions(precision=6, suppress=True, linewidth=120):
            out.write(f"rho =\n{state.rho}\n")
    return EXIT_OK


def cmd_spectrum(args, out):
    from .spectrum import analyze_emission, default_grid
    from .sweep import atomic_write, fmt, plot_spectrum_csv
    spec = _spec(args)
    grid = default_grid(spec, args.points)
    lo = grid[0] if args.omega_min is None else args.omega_min
    hi = grid[-1] if args.omega_max is None else args.omega_max
    if hi <= lo:
        raise UsageError("--omega-max must exceed --omega-min")
    an = analyze_emission(spec, np.linspace(lo, hi, args.points), per_mode=args.per_mode)
    sr = an.spectrum
    modes = []
    if args.per_mode and sr.per_mode:
        keep = [m for m in sr.per_mode if abs(m[1]) > 1e-10 * max(abs(x[1]) for x in sr.per_mode)]
        modes = [{"k": i + 1, "lambda": [m[0].real, m[0].imag], "c": [m[1].real, m[1].imag]}
                 for i, m in enumerate(keep)]
    if args.output:
        header = ["omega", "S"] + [f"mode{m['k']}" for m in modes]
        cols = [sr.omega, sr.S] + ([p for _, _, p in keep] if modes else [])
        lines = [",".join(header)] + [",".join(fmt(c[i]) for c in cols) for i in range(sr.omega.size)]
        atomic_write(args.output, "\n".join(lines) + "\n")
        if args.svg:
            plot_spectrum_csv(args.output, args.svg)
    summary = {"linewidth": _num(sr.linewidth), "peak_shift": _num(sr.peak_shift),
               "peak_structure": sr.peak_structure.value if sr.peak_structure else None,
               "method": sr.method, "condition": sr.meta.get("condition"), "modes": modes}
    if args.json:
        out.write(json.dumps(summary) + "\n")
    else:
        out.write(f"linewidth {sr.linewidth:.10g}  peak_shift {sr.peak_shift:.10g}  "
                  f"structure {summary['peak_structure']}  method {sr.method}\n")
        for m in modes:
            lam, c = complex(*m["lambda"]), complex(*m["c"])
            out.write(f"  mode {m['k']:>3}  lambda {lam:.6g}  c {c:.6g}\n")
    return EXIT_OK


def cmd_sweep(args, out):
    from .sweep import load_config, run_sweep, write_outputs
    config = load_config(args.config)
    result = run_sweep(config)
    written = write_outputs(result)
    summary = {"points": len(result.records), "failures": len(result.failures),
               "files": {k: str(v) for k, v in written.items()},
               "errors": [f"({r['axis1']:.6g}, {r['axis2']:.6g}): {r['error']}" for r in result.failures]}
    if args.json:
        out.write(json.dumps(summary) + "\n")
    else:
        out.write(f"{summary['points']} points, {summary['failures']} failed\n")
        for k, v in summary["files"].items():
            out.write(f"  {k}: {v}\n")
        for e in summary["errors"]:
            out.write(f"  FAILED {e}\n")
    return EXIT_FAIL if result.failures else EXIT_OK


def cmd_classify(args, out):
    from .sweep import atomic_write, csv_text, read_csv, relabel
    path = args.input
    if path.suffix == ".json":
        payload = json.loads(path.read_text())
        records = payload["records"]
    else:
        if args.N is None:
            raise UsageError("--N is required for CSV input")
        records = [dict(r, N=args.N) for r in read_csv(path)]
        payload = None
    new = relabel(records, args.epsilon_c)
    if payload is not None and (args.output is None or args.output.suffix == ".json"):
        payload = dict(payload, records=new, eps_c=args.epsilon_c)
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    else:
        text = csv_text(new)
    if args.output:
        atomic_write(args.output, text)
        if args.json:
            out.write(json.dumps({"records": len(new), "output": str(args.output)}) + "\n")
    else:
        out.write(text)
    return EXIT_OK


def cmd_oracle(args, out):
    from . import oracle_check as oc
    runners = {"two_spin": oc.two_spin_cases, "brute_force": oc.brute_force_cases,
               "thermal": oc.thermal_cases, "hp": oc.hp_cases}
    names = list(runners) if args.all else args.case
    reports = [r for name in names for r in runners[name]()]
    if args.json:
        out.write(json.dumps([r.as_json() for r in reports]) + "\n")
    else:
        out.write(oc.format_table(reports) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


COMMANDS = {"steady": cmd_steady, "spectrum": cmd_spectrum, "sweep": cmd_sweep,
            "classify": cmd_classify, "oracle-check": cmd_oracle}


def main(argv=None, out=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    out = out or sys.stdout
    as_json = "--json" in argv
    from .sweep import ConfigError

    def fail(kind, message, code):
        if as_json:
            out.write(json.dumps({"error": kind, "message": message, "exit_code": code}) + "\n")
        else:
            sys.stderr.write(f"partialpump: {kind}: {message}\n")
        return code

    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        return fail("usage", str(exc), EXIT_USAGE)
    except (ConfigError, FileNotFoundError) as exc:
        return fail("config", str(exc), EXIT_USAGE)
    except ValueError as exc:
        return fail("invalid", str(exc), EXIT_USAGE)
    except Exception as exc:
        return fail(type(exc).__name__, str(exc), EXIT_FAIL)


if __name__ == "__main__":
    sys.exit(main())
