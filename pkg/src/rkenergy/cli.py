"""Command-line front end: ``rkenergy {analyze,verify,simulate,converge}``.

Exit status is 0 on success, 1 when a check or a numerical step fails and 2
for usage errors (bad flags, unknown method or system names).
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Iterator, Sequence, TextIO

import numpy as np

from . import continuum, pade
from .energy import analyze as analyze_method
from .exactnum import ContractViolation, format_rational, parse_rational
from .methods import approximation_order, resolve
from .simulator import (
    SYSTEM_NAMES,
    SeminegativeSystem,
    SeminegativityError,
    StepFailure,
    convergence_study,
    energy_trace,
    example_initial_state,
    example_system,
    random_seminegative,
    write_convergence_csv,
    write_trace_csv,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SCOPES = ("pade-cholesky", "hilbert", "binomial-sum", "shifted-mu", "integer-consistency",
          "identities", "pochhammer", "all")


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _rational_list(text: str) -> list[Fraction]:
    try:
        return [parse_rational(t) for t in text.split(",") if t.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated rationals, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--format", choices=("text", "json", "csv"), default="text")
    shared.add_argument("--output", "-o", help="write the report here instead of stdout")
    shared.add_argument("--seed", type=int, default=0, help="seed for random systems (default 0)")

    p = argparse.ArgumentParser(prog="rkenergy",
                                description="Energy laws of Runge-Kutta stability functions.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[shared], help="exact energy law and stability class")
    a.add_argument("--method", required=True,
                   help="euler-backward, crank-nicolson, qin-zhang, kraaijevanger-spijker, "
                        "pade:M,N, taylor:P or butcher:PATH")

    v = sub.add_parser("verify", parents=[shared], help="exact identity checks")
    v.add_argument("--scope", choices=SCOPES, default="all")
    v.add_argument("--s-max", type=int, default=20)
    v.add_argument("--n-max", type=int, default=20)
    v.add_argument("--p-max", type=int, default=10)
    v.add_argument("--samples", type=_rational_list, default=list(pade.SAMPLE_POINTS),
                   help="comma-separated rationals x with 2x not an integer")

    system_help = f"{', '.join(SYSTEM_NAMES)} or random:DIM"
    s = sub.add_parser("simulate", parents=[shared], help="energy trace of one run")
    s.add_argument("--method", required=True)
    s.add_argument("--system", required=True, help=system_help)
    s.add_argument("--n-cells", type=int, default=20)
    s.add_argument("--tau", type=float, default=0.1)
    s.add_argument("--t-end", type=float, default=4.0)
    s.add_argument("--u0", type=_float_list)
    s.add_argument("--trace", help="also write the per-step CSV trace to this path")

    c = sub.add_parser("converge", parents=[shared], help="error and order table")
    c.add_argument("--method", required=True)
    c.add_argument("--system", default="example1", help=system_help)
    c.add_argument("--n-cells", type=int, default=20)
    c.add_argument("--t-end", type=float, default=8.0)
    c.add_argument("--taus", type=_float_list, default=[1.6, 0.8, 0.4, 0.2])
    c.add_argument("--u0", type=_float_list)
    return p


@contextlib.contextmanager
def _sink(path: str | None) -> Iterator[TextIO]:
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _json_dump(obj, fh: TextIO) -> None:
    fh.write(json.dumps(obj, ensure_ascii=False, indent=2) + "\n")


def _method(text: str):
    try:
        return resolve(text)
    except (LookupError, ContractViolation, OSError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _system(name: str, n_cells: int, seed: int) -> SeminegativeSystem:
    if name.startswith("random:"):
        try:
            dim = int(name.split(":", 1)[1])
        except ValueError as exc:
            raise UsageError(f"bad random system {name!r}; use random:DIM") from exc
        L = random_seminegative(dim, np.random.default_rng(seed))
        return SeminegativeSystem(L, name, {"dim": dim, "seed": seed})
    try:
        return example_system(name, n_cells)
    except LookupError as exc:
        raise UsageError(str(exc)) from exc


def _initial(system: SeminegativeSystem, u0, seed: int) -> np.ndarray:
    if u0 is not None:
        if len(u0) != system.dim:
            raise UsageError(f"--u0 has {len(u0)} entries, system has dimension {system.dim}")
        return np.array(u0, dtype=float)
    if system.name.startswith("random:"):
        return np.random.default_rng(seed + 1).standard_normal(system.dim)
    return example_initial_state(system)


# ------------------------------------------------------------------ analyze

def cmd_analyze(args) -> int:
    if args.format == "csv":
        raise UsageError("analyze supports --format text or json")
    sf = _method(args.method)
    result = analyze_method(sf)
    report = result.to_json()
    report["order"] = approximation_order(sf)
    with _sink(args.output) as out:
        if args.format == "json":
            _json_dump(report, out)
        else:
            out.write(_analyze_text(result, report))
    return EXIT_OK


def _matrix_text(rows: Sequence[Sequence[str]], indent: str = "    ") -> str:
    if not rows:
        return indent + "(empty)\n"
    width = max(len(e) for r in rows for e in r)
    return "".join(indent + "  ".join(e.rjust(width) for e in r) + "\n" for r in rows)


def _analyze_text(result, report) -> str:
    sf = result.sf
    vec = lambda xs: "(" + ", ".join(xs) + ")"
    lines = [
        f"method          {report['method']}",
        f"                {sf.describe()}",
        f"stages s        {report['s']}    order {report['order']}",
        f"beta            {vec(report['beta'])}",
        "gamma",
        _matrix_text(report["gamma"]).rstrip("\n"),
        f"delta           {vec(report['delta'])}",
        f"d_tilde         {vec(report['d_tilde'])}",
        "U_tilde",
        _matrix_text(report["u_tilde"]).rstrip("\n"),
        f"zeta={report['zeta']}  rho={report['rho']}  kappa={report['kappa']}",
        f"classification  {report['classification']}",
        f"energy law      ‖u⁺‖² − ‖u‖² = {report['energy_law']}",
    ]
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------------- verify

def _matrix_check(name: str, residual, **parameters) -> pade.CheckResult:
    if residual.is_zero():
        return pade.CheckResult(name, parameters, True, residual.rows * residual.cols)
    bad = next((i, j) for i in range(residual.rows) for j in range(residual.cols)
               if residual[i, j] != 0)
    return pade.CheckResult(name, parameters, False, residual.rows * residual.cols,
                            {"entry": list(bad), "residual": residual[bad]})


def _positive_d_hat(s_max: int) -> pade.CheckResult:
    bad = next((k for k in range(s_max) if continuum.d_hat(k) <= 0), None)
    return pade.CheckResult("d-hat-positive", {"k_max": s_max - 1}, bad is None, s_max,
                            None if bad is None else {"k": bad})


def run_checks(scope: str, s_max: int, n_max: int, p_max: int,
               samples: Sequence[Fraction]) -> list[pade.CheckResult]:
    want = (lambda name: scope in (name, "all"))
    out: list[pade.CheckResult] = []
    if want("pade-cholesky"):
        out += [_matrix_check("pade-cholesky", pade.verify_pade_cholesky(s), s=s)
                for s in range(1, s_max + 1)]
        out.append(_positive_d_hat(s_max))
    if want("hilbert"):
        out += [_matrix_check("hilbert-cholesky", continuum.verify_hilbert_cholesky(N), N=N)
                for N in range(n_max + 1)]
    if want("binomial-sum"):
        out += [pade.verify_binomial_sum_identity(s) for s in range(1, min(s_max, 15) + 1)]
    if want("shifted-mu"):
        out += [pade.verify_shifted_mu_coefficients(s) for s in range(1, min(s_max, 12) + 1)]
    if want("integer-consistency"):
        out.append(pade.verify_integer_consistency(min(s_max, 10)))
    if want("identities"):
        out += pade.verify_extended_all(samples, p_max, max(p_max, 12))
    if want("pochhammer"):
        out.append(pade.verify_pochhammer_identities(samples, min(p_max, 10)))
    return out


def cmd_verify(args) -> int:
    for x in args.samples:
        if args.scope in ("identities", "all") and (2 * x).denominator == 1:
            raise UsageError(f"sample {format_rational(x)} has 2x an integer")
    if min(args.s_max, args.p_max) < 1 or args.n_max < 0:
        raise UsageError("--s-max and --p-max must be positive, --n-max nonnegative")
    results = run_checks(args.scope, args.s_max, args.n_max, args.p_max, args.samples)
    passed = all(results)
    with _sink(args.output) as out:
        if args.format == "json":
            for r in results:
                out.write(json.dumps(r.as_dict(), ensure_ascii=False) + "\n")
        elif args.format == "csv":
            w = csv.writer(out, lineterminator="\n")
            w.writerow(["check", "parameters", "status", "cases", "counterexample"])
            for r in results:
                d = r.as_dict()
                w.writerow([d["check"], json.dumps(d["parameters"]), d["status"], d["cases"],
                            json.dumps(d.get("counterexample", ""))])
        else:
            for r in results:
                d = r.as_dict()
                params = " ".join(f"{k}={v}" for k, v in d["parameters"].items()
                                  if not isinstance(v, list))
                line = f"{'PASS' if r else 'FAIL'}  {d['check']:<22} {params}  ({d['cases']} cases)"
                if not r:
                    line += f"  counterexample {json.dumps(d['counterexample'])}"
                out.write(line + "\n")
            out.write(f"{sum(map(bool, results))}/{len(results)} checks passed\n")
    return EXIT_OK if passed else EXIT_FAIL


# ----------------------------------------------------------------- simulate

def cmd_simulate(args) -> int:
    sf = _method(args.method)
    system = _system(args.system, args.n_cells, args.seed)
    u0 = _initial(system, args.u0, args.seed)
    if args.tau <= 0 or args.t_end <= 0:
        raise UsageError("--tau and --t-end must be positive")
    n_steps = max(1, round(args.t_end / args.tau))
    trace = energy_trace(sf, system, args.tau, n_steps, u0)
    if args.trace:
        trace.write_csv(args.trace)
    records = trace.records
    growth_steps = sum(r.measured_drop < 0 for r in records)
    summary = {
        "method": sf.name,
        "system": system.name,
        "dim": system.dim,
        "tau": args.tau,
        "steps": n_steps,
        "tau_norm_L": args.tau * system.norm,
        "initial_energy": records[0].energy,
        "final_energy": float(trace.final_state @ trace.final_state),
        "energy_increasing_steps": growth_steps,
        "max_rel_gap": trace.max_rel_gap,
    }
    with _sink(args.output) as out:
        if args.format == "csv":
            write_trace_csv(trace, out)
        elif args.format == "json":
            _json_dump(summary, out)
        else:
            for k, v in summary.items():
                out.write(f"{k:<24}{v}\n")
            if growth_steps:
                out.write(f"energy grew on {growth_steps} of {n_steps} steps\n")
    return EXIT_OK


# ----------------------------------------------------------------- converge

def cmd_converge(args) -> int:
    sf = _method(args.method)
    system = _system(args.system, args.n_cells, args.seed)
    u0 = _initial(system, args.u0, args.seed)
    try:
        rows = convergence_study(sf, system, u0, args.t_end, args.taus)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    with _sink(args.output) as out:
        if args.format == "csv":
            write_convergence_csv(rows, out)
        elif args.format == "json":
            clean = lambda v: None if math.isnan(v) else v
            _json_dump([{"tau": r.tau, "l2_error": r.l2_error, "order": clean(r.order),
                         "delta_E": r.delta_E, "de_order": clean(r.de_order)} for r in rows], out)
        else:
            out.write(f"{sf.name} on {system.name}, T = {args.t_end}\n")
            out.write(f"{'tau':>8}  {'l2 error':>10}  {'order':>6}  {'dE':>10}  {'order':>6}\n")
            fmt = lambda v: "-" if math.isnan(v) else f"{v:.2f}"
            for r in rows:
                out.write(f"{r.tau:>8g}  {r.l2_error:>10.2e}  {fmt(r.order):>6}  "
                          f"{r.delta_E:>10.2e}  {fmt(r.de_order):>6}\n")
    return EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "verify": cmd_verify,
            "simulate": cmd_simulate, "converge": cmd_converge}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"rkenergy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StepFailure, SeminegativityError) as exc:
        print(f"rkenergy: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
