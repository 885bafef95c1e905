"""Command-line front end: ``rtmp solve|check|verify|convert|preset``.

Exit status is 0 when a problem is solved or a check passes, 2 when it is
infeasible or a check fails, and 1 on any error.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace
from fractions import Fraction
from pathlib import Path
from typing import Any

from .hankel import MomentSequence
from .kset import ClosedSet
from .polyalg import format_poly
from .problem import Problem, ProblemError, load_preset, parse_problem, preset_data, preset_names
from .rational import rational_to_power, solve_rtmp, verify_rtmp
from .semialg import Interval
from .solver import (
    AtomicMeasure,
    InfeasibleReason,
    PoleSet,
    PositivityCertificate,
    PreconditionError,
    SolverConfig,
    SolverError,
    extension_region,
    positivity_certificate,
    solve,
    solve_singular,
    verify_measure,
)
from .special import (
    CircleMeasure,
    bivariate_square_positive,
    circle_relations_check,
    circle_solve,
    circle_to_univariate,
    circle_univariate_moments,
    circle_verify,
    strong_hamburger_solve,
)

EXIT_OK, EXIT_ERROR, EXIT_INFEASIBLE = 0, 1, 2
_STATUS_EXIT = {"solved": EXIT_OK, "pass": EXIT_OK, "infeasible": EXIT_INFEASIBLE, "fail": EXIT_INFEASIBLE,
                "error": EXIT_ERROR}


# ---------------------------------------------------------------- encoding


def num(x) -> str:
    """17 significant digits; parses back to the same double."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def exact(x) -> str:
    return str(x) if isinstance(x, (int, Fraction)) else num(x)


def measure_json(mu: AtomicMeasure | CircleMeasure) -> dict:
    if isinstance(mu, CircleMeasure):
        out: dict[str, Any] = {"atoms": [[num(x), num(y)] for x, y in mu.atoms],
                               "densities": [num(r) for r in mu.densities]}
        if mu.exact:
            out["exact_atoms"] = [[exact(x), exact(y)] for x, y in mu.atoms]
            out["exact_densities"] = [exact(r) for r in mu.densities]
        return out
    out = {"atoms": [num(a) for a in mu.atoms], "densities": [num(r) for r in mu.densities]}
    if mu.exact:
        out["exact_atoms"] = [exact(a) for a in mu.atoms]
        out["exact_densities"] = [exact(r) for r in mu.densities]
    return out


def certificate_json(cert: PositivityCertificate) -> dict:
    return {
        "verdict": cert.verdict,
        "witness": format_poly(cert.witness.f) if cert.witness is not None else None,
        "products": [
            {"product": format_poly(p.f), "status": rep.status, "rank": rep.rank,
             "eigenvalues": [num(v) for v in rep.eigenvalue_estimates],
             "kernel": [format_poly(k) for k in rep.kernel_basis]}
            for p, rep in cert.per_product.items()
        ],
    }


def interval_json(iv: Interval) -> dict:
    lo, hi = iv.bounds
    return {"lo": num(lo), "hi": num(hi), "lo_closed": iv.lo_closed, "hi_closed": iv.hi_closed}


def reason_json(r: InfeasibleReason) -> dict:
    out = {"kind": r.kind, "detail": r.detail}
    if isinstance(r.witness, Fraction):
        out["witness"] = exact(r.witness)
    return out


def config_json(cfg: SolverConfig) -> dict:
    return asdict(cfg)


def _parse_measure(raw: Any, circle: bool) -> AtomicMeasure | CircleMeasure:
    if not isinstance(raw, dict):
        raise ProblemError("/", "measure must be a JSON object")
    if "measure" in raw and isinstance(raw["measure"], dict):
        raw = raw["measure"]
    use_exact = "exact_atoms" in raw and "exact_densities" in raw
    akey, dkey = ("exact_atoms", "exact_densities") if use_exact else ("atoms", "densities")
    if akey not in raw or dkey not in raw:
        raise ProblemError("/", "measure needs 'atoms' and 'densities'")
    atoms, dens = raw[akey], raw[dkey]
    if len(atoms) != len(dens):
        raise ProblemError(f"/{dkey}", "atoms and densities differ in length")
    conv = (lambda v: Fraction(v)) if use_exact else float
    try:
        rs = tuple(conv(v) for v in dens)
        if circle:
            pts = tuple((conv(x), conv(y)) for x, y in atoms)
            return CircleMeasure(pts, rs, use_exact)
        return AtomicMeasure(tuple(conv(a) for a in atoms), rs, use_exact)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise ProblemError(f"/{akey}", f"bad number: {exc}") from None


# ---------------------------------------------------------------- pipelines


def _power_moments(p: Problem) -> MomentSequence:
    if p.kind == "power_tmp":
        return p.moments
    if p.kind == "circle":
        return circle_univariate_moments(p.beta)
    return rational_to_power(p.data, p.spec)


def solve_problem(p: Problem) -> dict:
    cfg = p.config
    out: dict[str, Any] = {"name": p.name, "kind": p.kind}
    t0 = time.perf_counter()
    try:
        if p.kind == "circle":
            res = circle_solve(p.beta, cfg)
        elif p.kind == "power_tmp":
            res = solve(p.moments, p.K, p.poles, cfg, p.fixed_extension or None)
        elif p.kind == "strong_hamburger":
            res = strong_hamburger_solve(p.data, p.spec, cfg)
        else:
            res = solve_rtmp(p.data, p.spec, p.K, cfg, p.fixed_extension or None)
    except (SolverError, PreconditionError, ArithmeticError, ValueError) as exc:
        out.update(status="error", error=f"{type(exc).__name__}: {exc}")
        res = None
    elapsed = time.perf_counter() - t0
    if isinstance(res, InfeasibleReason):
        out.update(status="infeasible", reason=reason_json(res))
    elif res is not None:
        out.update(status="solved", measure=measure_json(res))
        ver = verify_result(p, res)
        out["residuals"] = ver
        if "power_measure" in res.info:
            out["power_measure"] = measure_json(res.info["power_measure"])
    if p.kind != "circle" and out["status"] != "error":
        try:
            out["certificate"] = certificate_json(positivity_certificate(_power_moments(p), p.K))
        except ValueError:
            pass
    out["config"] = config_json(cfg)
    out["timings"] = {"solve_seconds": round(elapsed, 6)}
    return out


def verify_result(p: Problem, mu) -> dict:
    tol = p.config.tol
    if p.kind == "circle":
        rep = circle_verify(mu, p.beta, tol)
        return {"passed": rep.passed, "on_circle": rep.on_circle,
                "moments": {f"{i},{j}": num(r) for (i, j), r in rep.residuals}}
    if p.kind == "power_tmp":
        rep = verify_measure(mu, p.moments, p.K, p.poles, tol)
        return {"passed": rep.passed, "failures": rep.failures(),
                "moments": [num(r) for r in rep.moment_residuals]}
    rep = verify_rtmp(mu, p.data, p.spec, tol)
    outside = max((_distance(p.K, float(a)) for a in mu.atoms), default=0.0)
    return {"passed": rep.passed and outside <= tol, "support_distance": num(outside),
            "pole_distance": num(rep.pole_distance), "moments": {lab: num(r) for lab, r in rep.residuals}}


def _distance(K: ClosedSet, x: float) -> float:
    return 0.0 if K.contains(x, 0.0) else min(
        min(abs(x - float(lo)), abs(x - float(hi))) for lo, hi in K.intervals)


def check_problem(p: Problem) -> dict:
    out: dict[str, Any] = {"name": p.name, "kind": p.kind}
    if p.kind == "circle":
        rep = bivariate_square_positive(p.beta)
        rel = circle_relations_check(p.beta)
        out.update(status="pass" if rep.is_psd and rel else "fail", square_positive=rep.status, rank=rep.rank,
                   relations=rel)
        return out
    cert = positivity_certificate(_power_moments(p), p.K)
    out.update(status="fail" if cert.verdict == "violated" else "pass", certificate=certificate_json(cert))
    return out


def convert_problem(p: Problem) -> dict:
    if p.kind == "power_tmp":
        raise ProblemError("/kind", "convert needs rational or circle data")
    if p.kind == "circle":
        data = circle_to_univariate(p.beta)
        gamma = circle_univariate_moments(p.beta)
        return {"name": p.name, "kind": p.kind, "status": "pass",
                "power_moments": [exact(v) for v in gamma.values],
                "rational_moments": [exact(v) for v in data.flat()]}
    gamma = rational_to_power(p.data, p.spec)
    return {"name": p.name, "kind": p.kind, "status": "pass", "power_moments": [exact(v) for v in gamma.values],
            "power_moments_float": [num(v) for v in gamma.values]}


def verify_problem(p: Problem, measure_raw: Any) -> dict:
    mu = _parse_measure(measure_raw, p.kind == "circle")
    ver = verify_result(p, mu)
    return {"name": p.name, "kind": p.kind, "status": "pass" if ver["passed"] else "fail", "residuals": ver}


# ---------------------------------------------------------------- presets


def _region_json(region) -> dict:
    def quad(q):
        return [exact(q.coeffs[i]) if i < len(q.coeffs) else "0" for i in range(3)]
    return {
        "odd_moment_interval": [num(v) for v in region.x_interval],
        "lower_bounds": [{"product": format_poly(p.f), "coefficients": quad(q)} for p, q in region.y_lower],
        "upper_bounds": [{"product": format_poly(p.f), "coefficients": quad(q)} for p, q in region.y_upper],
    }


def _binding_json(region) -> dict:
    out = {}
    for p, _ in region.y_lower:
        out[format_poly(p.f)] = [interval_json(iv) for iv in region.binding_set(p)]
    return out


def run_preset(name: str, cfg_overrides: dict) -> dict:
    p = _with_overrides(load_preset(name), cfg_overrides)
    out = solve_problem(p)
    out["preset"] = name
    gamma = rational_to_power(p.data, p.spec)
    out["power_moments"] = [exact(v) for v in gamma.values]
    if name == "example-3x":
        mu = solve_singular(gamma, p.K, PoleSet(), p.config)
        if isinstance(mu, AtomicMeasure):
            out["measure_ignoring_poles"] = measure_json(mu)
    elif name == "example-4x":
        first = extension_region(gamma, p.K)
        out["first_extension"] = {**_region_json(first), "binding_sets": _binding_json(first)}
        fixed = gamma.extend(370, 2000)
        second = extension_region(fixed, p.K)
        out["fixed_extension_370_2000"] = {**_region_json(second), "binding_sets": _binding_json(second)}
    return out


# ---------------------------------------------------------------- argument handling


def _with_overrides(p: Problem, overrides: dict) -> Problem:
    if not overrides:
        return p
    try:
        return replace(p, config=replace(p.config, **overrides))
    except ValueError as exc:
        raise ProblemError("/config", str(exc)) from None


def _overrides(args: argparse.Namespace) -> dict:
    out = {}
    if args.tol is not None:
        out["tol"] = args.tol
    if args.max_retries is not None:
        out["max_retries"] = args.max_retries
    seed = os.environ.get("RTMP_SEED")
    if seed is not None:
        try:
            out["rng_seed"] = int(seed)
        except ValueError:
            raise ProblemError("/", f"RTMP_SEED must be an integer, got {seed!r}") from None
    elif args.seed is not None:
        out["rng_seed"] = args.seed
    return out


def _solve_path(path: str, overrides: dict) -> dict:
    try:
        return solve_problem(_with_overrides(parse_problem(path), overrides))
    except ProblemError as exc:
        return {"status": "error", "error": str(exc), "pointer": exc.pointer, "file": path}


def _text(result: dict) -> str:
    lines = [f"status: {result.get('status')}"]
    if result.get("name"):
        lines.append(f"problem: {result['name']} ({result.get('kind')})")
    if "error" in result:
        lines.append(f"error: {result['error']}")
    if "reason" in result:
        lines.append(f"reason: {result['reason']['kind']}: {result['reason']['detail']}")
    for key in ("measure", "measure_ignoring_poles"):
        if key in result:
            lines.append(f"{key.replace('_', ' ')}:")
            for a, r in zip(result[key]["atoms"], result[key]["densities"]):
                lines.append(f"  atom {a if isinstance(a, str) else ', '.join(a)}  density {r}")
    if "power_moments" in result:
        lines.append("power moments: " + ", ".join(result["power_moments"]))
    if "certificate" in result:
        lines.append(f"certificate: {result['certificate']['verdict']}")
    return "\n".join(lines)


def _emit(results: list[dict], args: argparse.Namespace) -> None:
    payload: Any = results[0] if len(results) == 1 else results
    if args.format == "text":
        text = "\n\n".join(_text(r) for r in results) + "\n"
    else:
        text = json.dumps(payload, indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    if args.emit_csv:
        with open(args.emit_csv, "w", newline="") as fh:
            w = csv.writer(fh)
            for r in results:
                m = r.get("measure")
                if not m:
                    continue
                circle = bool(m["atoms"]) and isinstance(m["atoms"][0], list)
                w.writerow(["name", "x", "y", "density"] if circle else ["name", "atom", "density"])
                for a, d in zip(m["atoms"], m["densities"]):
                    w.writerow([r.get("name", ""), *a, d] if circle else [r.get("name", ""), a, d])


def _exit_code(results: list[dict]) -> int:
    codes = [_STATUS_EXIT.get(r.get("status"), EXIT_ERROR) for r in results]
    if EXIT_ERROR in codes:
        return EXIT_ERROR
    return EXIT_INFEASIBLE if EXIT_INFEASIBLE in codes else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    defaults = SolverConfig()
    common.add_argument("--tol", type=float, help=f"verification tolerance (default {defaults.tol})")
    common.add_argument("--seed", type=int, help="sampling seed; RTMP_SEED takes precedence")
    common.add_argument("--max-retries", type=int, help=f"samples per extension step (default {defaults.max_retries})")
    common.add_argument("--output", "-o", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--emit-csv", metavar="PATH", help="also write an atom/density table")

    parser = argparse.ArgumentParser(prog="rtmp", description="Truncated moment problems with rational data.")
    sub = parser.add_subparsers(dest="command", required=True)
    s = sub.add_parser("solve", parents=[common], help="solve one or more problem files")
    s.add_argument("files", nargs="+")
    s.add_argument("--jobs", type=int, default=1, help="solve files in parallel processes")
    c = sub.add_parser("check", parents=[common], help="positivity certificate only")
    c.add_argument("file")
    v = sub.add_parser("verify", parents=[common], help="verify a measure against a problem")
    v.add_argument("measure")
    v.add_argument("file")
    cv = sub.add_parser("convert", parents=[common], help="rational data to power moments")
    cv.add_argument("file")
    pr = sub.add_parser("preset", parents=[common], help="run a bundled example")
    pr.add_argument("name", nargs="?")
    pr.add_argument("--list", action="store_true", help="list preset names")
    pr.add_argument("--dump", action="store_true", help="print the preset problem file")
    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = _overrides(args)
        if args.command == "solve":
            if args.jobs > 1 and len(args.files) > 1:
                with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                    results = list(pool.map(_solve_path, args.files, [overrides] * len(args.files)))
            else:
                results = [_solve_path(f, overrides) for f in args.files]
        elif args.command == "preset":
            if args.list or not args.name:
                sys.stdout.write("\n".join(preset_names()) + "\n")
                return EXIT_OK
            if args.dump:
                sys.stdout.write(json.dumps(preset_data(args.name), indent=2) + "\n")
                return EXIT_OK
            results = [run_preset(args.name, overrides)]
        else:
            p = _with_overrides(parse_problem(args.file), overrides)
            if args.command == "check":
                results = [check_problem(p)]
            elif args.command == "convert":
                results = [convert_problem(p)]
            else:
                try:
                    raw = json.loads(Path(args.measure).read_text())
                except (OSError, json.JSONDecodeError) as exc:
                    raise ProblemError("/", f"cannot read measure {args.measure}: {exc}") from None
                results = [verify_problem(p, raw)]
    except (ProblemError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else str(exc)
        results = [{"status": "error", "error": msg}]
    _emit(results, args)
    return _exit_code(results)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
