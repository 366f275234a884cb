"""Command-line entry point: ``ballmag {magnitude,crosscheck,verify-analytic,export}``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or precondition
error, 3 internal invariant violation.  Errors are reported as one JSON
object on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

import mpmath

from . import analytic, hankel, schroeder, weights
from .errors import InvariantViolation, PreconditionError
from .exactalg import IntPoly, RationalFn

FORMAT_VERSION = 1
PRECISION_ENV = "BALLMAG_PRECISION"
LONG_ROOTS_P = 10

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INVARIANT = 0, 1, 2, 3


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def poly_to_dict(poly: IntPoly) -> dict:
    return {"degree": poly.degree if poly.coeffs else None,
            "coefficients": [str(c) for c in poly.coeffs]}


def poly_from_dict(d: dict) -> IntPoly:
    poly = IntPoly(tuple(int(c) for c in d["coefficients"]))
    if (poly.degree if poly.coeffs else None) != d["degree"]:
        raise ValueError("degree field does not match the coefficient list")
    return poly


def result_to_dict(r: hankel.MagnitudeResult) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "n": r.n,
        "p": r.p,
        "method": r.method,
        "numerator": poly_to_dict(r.numerator),
        "denominator": poly_to_dict(r.denominator),
        "scale": str(math.factorial(r.n)),
        "checks": dict(sorted(r.checks.items())),
    }


def result_from_dict(d: dict) -> hankel.MagnitudeResult:
    num = poly_from_dict(d["numerator"])
    den = poly_from_dict(d["denominator"])
    mag = RationalFn(num, den * int(d["scale"]))
    return hankel.MagnitudeResult(d["n"], d["p"], num, den, mag, d["method"], dict(d.get("checks", {})))


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def default_precision() -> int:
    raw = os.environ.get(PRECISION_ENV)
    if raw is None:
        return analytic.DEFAULT_DIGITS
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"{PRECISION_ENV} must be an integer, got {raw!r}")
    if value < 15:
        raise UsageError(f"{PRECISION_ENV} must be at least 15")
    return value


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"not a rational number: {text!r}")


def resolve_p(dim, p) -> int:
    if dim is not None:
        if dim < 1 or dim % 2 == 0:
            raise UsageError("--dim must be a positive odd integer")
        return (dim - 1) // 2
    if p < 0:
        raise UsageError("--p must be nonnegative")
    return p


def compute(p: int, method: str, k_max: int = schroeder.K_MAX) -> hankel.MagnitudeResult:
    if method == "hankel":
        return hankel.magnitude_hankel(p)
    if method == "cramer":
        return weights.magnitude_cramer(p)
    num = schroeder.combinatorial_N(p, k_max)
    den = schroeder.combinatorial_D(p, k_max)
    n = 2 * p + 1
    r = hankel.MagnitudeResult(n, p, num, den, RationalFn(num, den * math.factorial(n)), "schroeder")
    return hankel.MagnitudeResult(n, p, num, den, r.magnitude, "schroeder", hankel.structural_checks(r))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_magnitude(args) -> int:
    p = resolve_p(args.dim, args.p)
    r = compute(p, args.method, args.k_max)
    payload = result_to_dict(r)
    payload["N"] = str(r.numerator)
    payload["D"] = str(r.denominator)
    if args.betas:
        if p < 1:
            raise UsageError("--betas needs p >= 1 (the weighting system is empty at p = 0)")
        sol = weights.solve_weights(weights.build_system(p))
        payload["betas"] = [{"num": poly_to_dict(b.num), "den": poly_to_dict(b.den)} for b in sol.betas]
        payload["betas_residual_zero"] = sol.residual_zero
    if args.radius is not None:
        radius = parse_rational(args.radius)
        if radius < 0:
            raise UsageError("--radius must be nonnegative")
        value = r.value_at(radius)
        payload["radius"] = str(radius)
        payload["value"] = str(value)
        with mpmath.workdps(args.precision):
            payload["decimal"] = mpmath.nstr(mpmath.mpf(value.numerator) / value.denominator, args.precision)
    print(dumps(payload))
    return EXIT_OK if all(r.checks.values()) else EXIT_FAIL


def _check(report: list, name: str, ok: bool, **extra) -> None:
    entry = {"name": name, "passed": bool(ok)}
    entry.update(extra)
    report.append(entry)


def cmd_crosscheck(args) -> int:
    skip = set(args.skip or ())
    report: list = []
    for p in range(args.max_p + 1):
        h = hankel.magnitude_hankel(p)
        if "structural" not in skip:
            failed = sorted(k for k, v in h.checks.items() if not v)
            _check(report, f"structural[p={p}]", not failed, failed=failed)
        if "cramer" not in skip and p >= 1:
            c = weights.magnitude_cramer(p)
            _check(report, f"hankel=cramer[p={p}]", c.magnitude == h.magnitude)
        if "schroeder" not in skip and p + 1 <= args.k_max:
            _check(report, f"hankel=schroeder[p={p}]",
                   schroeder.combinatorial_N(p, args.k_max) == h.numerator
                   and schroeder.combinatorial_D(p, args.k_max) == h.denominator)
    if "cf" not in skip:
        terms = min(13, 2 * args.max_p + 3)
        _check(report, f"continued_fraction[terms={terms}]", schroeder.cf_matches_chi(terms))
    if "lgv" not in skip:
        for k in range(min(3, args.max_p) + 1):
            for shift in (0, 1):
                _check(report, f"lgv[k={k},shift={shift}]", schroeder.lgv_check(k, shift))
    ok = all(e["passed"] for e in report)
    print(dumps({"max_p": args.max_p, "skipped": sorted(skip), "checks": report, "passed": ok}))
    return EXIT_OK if ok else EXIT_FAIL


def parse_cloud(text: str) -> dict:
    # "n=1,R=1,sizes=11..101", "n=3,R=1,sizes=1;3;5;9" or "n=3,gen=halton,sizes=10;40;160"
    fields = {}
    head, _, sizes = text.partition("sizes=")
    for item in filter(None, head.rstrip(",").split(",")):
        key, _, val = item.partition("=")
        fields[key.strip()] = val.strip()
    unknown = set(fields) - {"n", "R", "gen"}
    if unknown:
        raise UsageError(f"unknown --cloud keys: {sorted(unknown)}")
    gen = fields.get("gen", "grid")
    if gen not in ("grid", "halton"):
        raise UsageError(f"--cloud gen must be grid or halton, got {gen!r}")
    try:
        dim = int(fields.get("n", 1))
        radius = parse_rational(fields.get("R", "1"))
        if ".." in sizes:
            if gen != "grid":
                raise ValueError("lo..hi chains are for grid clouds")
            lo, hi = sizes.split("..")
            axis = analytic.nested_axis_points(int(lo), int(hi))
        elif sizes:
            axis = [int(x) for x in sizes.replace(";", " ").replace(",", " ").split()]
        elif gen == "grid":
            axis = analytic.nested_axis_points(1, 17 if dim > 1 else 101)
        else:
            axis = [10, 40, 160]
    except ValueError as exc:
        raise UsageError(f"bad --cloud specification {text!r}: {exc}")
    return {"dim": dim, "radius": radius, "sizes": axis, "generator": gen}


def _key_check(spec):
    return analytic.key_integral_check(spec)


def cmd_verify_analytic(args) -> int:
    single = [args.p, args.R, args.s]
    if any(v is not None for v in single) and not all(v is not None for v in single):
        raise UsageError("--p, --R and --s must be given together")
    reports = []
    if args.cloud is None or all(v is not None for v in single):
        if all(v is not None for v in single):
            spec = analytic.QuadratureSpec(args.p, parse_rational(args.R), parse_rational(args.s),
                                           args.nodes, args.precision)
            reports.append(analytic.key_integral_check(spec))
            for j in range(1, args.p + 1):
                reports.append(analytic.general_key_integral_check(spec, j))
        else:
            specs = [analytic.QuadratureSpec(p, R, R * fr, args.nodes, args.precision)
                     for p in (1, 2, 3) for R in (Fraction(1), Fraction(2), Fraction(5))
                     for fr in (0, Fraction(1, 4), Fraction(1, 2), Fraction(3, 4))]
            if args.jobs > 1:
                with ProcessPoolExecutor(args.jobs) as pool:
                    reports.extend(pool.map(_key_check, specs))
            else:
                reports.extend(map(_key_check, specs))
            for p in (1, 2, 3):
                spec = analytic.QuadratureSpec(p, 2, 1, args.nodes, args.precision)
                reports.append(analytic.general_key_integral_check(spec, p))
    payload = {"quadrature": [r.to_dict() for r in reports]}
    ok = all(r.passed for r in reports)
    if args.cloud is not None:
        cfg = parse_cloud(args.cloud)
        study = analytic.cloud_convergence_study(cfg["dim"], cfg["radius"], cfg["sizes"],
                                                 cfg["generator"], args.seed)
        payload["cloud"] = study.to_dict()
        ok &= study.passed
    payload["passed"] = ok
    print(dumps(payload))
    return EXIT_OK if ok else EXIT_FAIL


def _write_csv(path: Path, results: list) -> None:
    width = max(max(len(r.numerator.coeffs), len(r.denominator.coeffs)) for r in results)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["p", "n", "side", "degree"] + [f"c{k}" for k in range(width)])
        for r in results:
            for side, poly in (("N", r.numerator), ("D", r.denominator)):
                row = [r.p, r.n, side, poly.degree] + [str(c) for c in poly.coeffs]
                w.writerow(row + [""] * (width - len(poly.coeffs)))


def _write_dat(path: Path, rows) -> None:
    with path.open("w") as fh:
        for a, b in rows:
            fh.write(f"{a} {b}\n")


def cmd_export(args) -> int:
    if args.p is not None:
        ps = [args.p]
    else:
        ps = list(range(args.max_p + 1))
    if any(p < 0 for p in ps):
        raise UsageError("p must be nonnegative")
    if args.roots and max(ps) > LONG_ROOTS_P and not args.long_running:
        raise UsageError(f"root export beyond p={LONG_ROOTS_P} needs --long-running")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = [hankel.magnitude_hankel(p) for p in ps]
    written, root_info = [], []
    tag = f"p{ps[0]}" if len(ps) == 1 else f"p0-{ps[-1]}"
    if args.format == "csv":
        path = out / f"magnitude_{tag}.csv"
        _write_csv(path, results)
        written.append(path)
    elif args.format == "json":
        path = out / f"magnitude_{tag}.json"
        path.write_text(dumps([result_to_dict(r) for r in results]) + "\n")
        written.append(path)
    if args.plotdata or args.format == "dat":
        for r in results:
            for side, poly in (("N", r.numerator), ("D", r.denominator)):
                path = out / f"coeffs_{side}_p{r.p}.dat"
                _write_dat(path, ((k, f"{math.log10(c):.12f}") for k, c in enumerate(poly.coeffs)))
                written.append(path)
    if args.roots:
        from .roots import magnitude_roots

        for r in results:
            for side in ("N", "D"):
                rep = magnitude_roots(r.p, side)
                path = out / f"roots_{side}_p{r.p}.dat"
                _write_dat(path, rep.as_pairs())
                written.append(path)
                root_info.append({"file": str(path), "bits": rep.precision, "certified": rep.certified,
                                  "conjugate_error": rep.conjugate_error, "max_residual": rep.max_residual,
                                  "all_in_sector": rep.all_in_sector})
    payload = {"written": [str(p) for p in written]}
    if args.roots:
        payload["roots"] = root_info
    print(dumps(payload))
    return EXIT_OK if all(e["certified"] for e in root_info) else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ballmag", description="Exact magnitudes of odd-dimensional balls.")
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("magnitude", help="compute N_p / (n! D_p)")
    g = m.add_mutually_exclusive_group(required=True)
    g.add_argument("--dim", type=int, help="odd dimension n")
    g.add_argument("--p", type=int, help="p with n = 2p + 1")
    m.add_argument("--radius", help="rational radius, e.g. 7/2")
    m.add_argument("--method", choices=hankel.METHODS, default="hankel")
    m.add_argument("--k-max", type=int, default=schroeder.K_MAX)
    m.add_argument("--betas", action="store_true", help="include the boundary weights beta_j")
    m.set_defaults(func=cmd_magnitude)

    c = sub.add_parser("crosscheck", help="compare the three routes and run structural checks")
    c.add_argument("--max-p", type=int, default=4)
    c.add_argument("--skip", action="append", choices=["cramer", "schroeder", "structural", "cf", "lgv"])
    c.add_argument("--k-max", type=int, default=schroeder.K_MAX)
    c.set_defaults(func=cmd_crosscheck)

    v = sub.add_parser("verify-analytic", help="quadrature and point-cloud checks")
    v.add_argument("--p", type=int)
    v.add_argument("--R")
    v.add_argument("--s")
    v.add_argument("--nodes", type=int, default=analytic.DEFAULT_NODES)
    v.add_argument("--cloud", help="e.g. n=1,R=1,sizes=11..101 or n=3,gen=halton,sizes=10;40")
    v.add_argument("--seed", type=int, default=0, help="skip count for the halton generator")
    v.add_argument("--jobs", type=int, default=1, help="worker processes for the quadrature grid")
    v.set_defaults(func=cmd_verify_analytic)

    e = sub.add_parser("export", help="write coefficient tables and plot data")
    g = e.add_mutually_exclusive_group(required=True)
    g.add_argument("--max-p", type=int)
    g.add_argument("--p", type=int)
    e.add_argument("--format", choices=["csv", "json", "dat"], default="csv")
    e.add_argument("--plotdata", action="store_true", help="also write (index, log10 coeff) .dat files")
    e.add_argument("--roots", action="store_true", help="also write (re, im) root files")
    e.add_argument("--long-running", action="store_true", help="allow root export beyond p=10")
    e.add_argument("--out", default=".")
    e.set_defaults(func=cmd_export)

    for sp in (m, c, v, e):
        sp.add_argument("--precision", type=int, default=None, help=f"decimal digits (env {PRECISION_ENV})")
    return parser


def _fail(code: int, kind: str, exc: BaseException) -> int:
    print(json.dumps({"error": kind, "type": type(exc).__name__, "message": str(exc)}, sort_keys=True),
          file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.precision is None:
            args.precision = default_precision()
        return args.func(args)
    except (UsageError, PreconditionError) as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    except InvariantViolation as exc:
        return _fail(EXIT_INVARIANT, "invariant", exc)
    except (ValueError, TypeError) as exc:
        return _fail(EXIT_USAGE, "usage", exc)
    except OSError as exc:
        return _fail(EXIT_FAIL, "io", exc)


if __name__ == "__main__":
    sys.exit(main())
