"""Command line front end.

Exit codes: 0 on success, 1 on a negative finding (failed check,
non-affiliated prior for the closed form, unreachable target), 2 on any
error.  Reports repeat the command line, digest the input files, and are
rendered with 12 significant digits; identical invocations produce
byte-identical result sections.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys
import time
import warnings
from typing import Optional

import numpy as np

from .dist import DEFAULT_CAP, is_pairwise_positively_correlated, is_positively_affiliated
from .errors import (
    InferaError,
    NotAffiliated,
    ParseError,
    SpectralNormTooLarge,
    UnboundedInfluence,
)
from .files import load_distribution, save_mechanism
from .influence import dobrushin_bounds, influence_matrix, spectral_norm
from .ising import (
    IsingTreeModel,
    bethe_fixed_point,
    critical_coupling,
    enforceable_epsilon,
    nu_bethe_limit,
    nu_gibbs,
    sensitivity_profile,
)
from .lp_exact import DEFAULT_LP_CAP, nu_exact
from .mechanism import PrivacyBudget
from .affiliated import nu_closed_form

EXIT_OK = 0
EXIT_FINDING = 1
EXIT_ERROR = 2


def _sig(value):
    """Round floats to 12 significant digits, recursively."""
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return repr(value)
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _sig(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sig(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_sig(float(v)) for v in value.ravel()] if value.ndim == 1 else [
            _sig(list(map(float, row))) for row in value
        ]
    if isinstance(value, (np.floating,)):
        return _sig(float(value))
    if isinstance(value, (np.integer,)):
        return int(value)
    return value


def _digest(path: Optional[str]) -> Optional[str]:
    if path is None:
        return None
    try:
        with open(path, "rb") as fh:
            return hashlib.sha256(fh.read()).hexdigest()[:16]
    except OSError:
        return None


def _emit(report: dict, args) -> None:
    report = dict(report)
    report["results"] = _sig(report.get("results", {}))
    fmt = getattr(args, "format", "json") or "json"
    if fmt == "csv":
        lines = ["key,value"]
        for key, value in sorted(report["results"].items()):
            lines.append(f"{key},{json.dumps(value)}")
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    out = getattr(args, "out", None)
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _base_report(args, inputs: dict, t0: float) -> dict:
    echo = getattr(args, "_argv", None)
    if echo is None:
        echo = sys.argv[1:]
    return {
        "command": " ".join(echo),
        "inputs": _sig(inputs),
        "results": {},
        "warnings": [],
        "timing_ms": round((time.time() - t0) * 1000.0, 3),
    }


def _parse_eps(text: str, n: int) -> PrivacyBudget:
    try:
        parts = [float(p) for p in text.split(",") if p.strip() != ""]
    except ValueError as exc:
        raise ParseError(f"bad --eps value: {text}") from exc
    if len(parts) == 1:
        return PrivacyBudget.uniform(n, parts[0])
    if len(parts) != n:
        raise ParseError(f"--eps needs 1 or {n} values, got {len(parts)}")
    return PrivacyBudget(np.asarray(parts))


def _cap(args) -> int:
    if getattr(args, "cap", None):
        return int(args.cap)
    env = os.environ.get("INFERA_CAP")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise ParseError(f"bad INFERA_CAP value {env!r}") from exc
    return DEFAULT_CAP


def cmd_check(args) -> int:
    t0 = time.time()
    dist, _ = load_distribution(args.dist, cap=_cap(args))
    report = _base_report(args, {"dist": args.dist, "digest": _digest(args.dist)}, t0)
    results = report["results"]
    failed = False
    what = args.what
    if what in ("affiliation", "both"):
        ok, witness = is_positively_affiliated(dist)
        results["affiliated"] = ok
        if not ok:
            results["witness"] = [list(witness[0]), list(witness[1])]
            failed = True
    if what in ("pairwise", "both"):
        ok = is_pairwise_positively_correlated(dist)
        results["pairwise_positive"] = ok
        failed = failed or not ok
    report["timing_ms"] = round((time.time() - t0) * 1000.0, 3)
    _emit(report, args)
    return EXIT_FINDING if failed else EXIT_OK


def cmd_nu(args) -> int:
    t0 = time.time()
    cap = _cap(args)
    dist, model = load_distribution(args.dist, cap=cap)
    budget = _parse_eps(args.eps, dist.n)
    report = _base_report(args, {"dist": args.dist, "digest": _digest(args.dist)}, t0)
    results = report["results"]
    results["n"] = dist.n
    results["target"] = args.target
    results["method"] = args.method
    code = EXIT_OK
    if args.method == "exact":
        cert = nu_exact(dist, budget, args.target, cap=args.lp_cap)
        results["nu"] = cert.nu
        results["direction"] = list(cert.direction)
        results["lp_objective"] = cert.lp_objective
        results["per_direction"] = {
            f"{z0}->{z1}": v for (z0, z1), v in sorted(cert.per_direction.items())
        }
        if args.witness_out:
            save_mechanism(args.witness_out, cert.witness)
            results["witness_file"] = args.witness_out
    elif args.method == "closed-form":
        try:
            with warnings.catch_warnings():
                # The report's warnings list already records the force path.
                warnings.simplefilter("ignore")
                res = nu_closed_form(dist, budget, args.target, force=args.force)
        except NotAffiliated as exc:
            results["nu"] = None
            results["not_affiliated_witness"] = [list(w) for w in exc.witness]
            report["warnings"].append(str(exc))
            report["timing_ms"] = round((time.time() - t0) * 1000.0, 3)
            _emit(report, args)
            return EXIT_FINDING
        if args.force:
            report["warnings"].append(
                "closed form evaluated under --force; only exact for affiliated priors"
            )
        results["nu"] = res.nu
        results["winning_z"] = res.winning_z
        results["numerator"] = res.numerator
        results["denominator"] = res.denominator
    elif args.method == "gibbs":
        if model is None:
            raise ParseError("--method gibbs needs an ising_tree generator file")
        uniform = budget.eps
        if np.any(uniform != uniform[0]):
            raise ParseError("--method gibbs needs a uniform budget")
        results["nu"] = nu_gibbs(model, float(uniform[0]), args.target, cap=cap)
    elif args.method == "all":
        values = {}
        cert = nu_exact(dist, budget, args.target, cap=args.lp_cap)
        values["exact"] = cert.nu
        try:
            values["closed_form"] = nu_closed_form(dist, budget, args.target).nu
        except NotAffiliated as exc:
            report["warnings"].append(f"closed form skipped: {exc}")
        if model is not None and not np.any(budget.eps != budget.eps[0]):
            values["gibbs"] = nu_gibbs(model, float(budget.eps[0]), args.target, cap=cap)
        results.update(values)
        results["nu"] = cert.nu
        spread = max(values.values()) - min(values.values())
        results["max_discrepancy"] = spread
        if spread > 1e-6:
            report["warnings"].append(
                f"methods disagree by {spread:.3e}, beyond 1e-6"
            )
    else:
        raise ParseError(f"unknown method {args.method!r}")
    report["timing_ms"] = round((time.time() - t0) * 1000.0, 3)
    _emit(report, args)
    return code


def cmd_bound(args) -> int:
    t0 = time.time()
    dist, _ = load_distribution(args.dist, cap=_cap(args))
    budget = _parse_eps(args.eps, dist.n)
    report = _base_report(args, {"dist": args.dist, "digest": _digest(args.dist)}, t0)
    results = report["results"]
    matrix = influence_matrix(dist)
    results["gamma"] = [
        [(v if math.isfinite(v) else "inf") for v in row] for row in matrix.gamma
    ]
    if matrix.unbounded:
        report["warnings"].append(
            "influence matrix has unbounded entries; no bound applies"
        )
        report["timing_ms"] = round((time.time() - t0) * 1000.0, 3)
        _emit(report, args)
        return EXIT_OK
    results["spectral_norm"] = spectral_norm(matrix.gamma)
    try:
        bound = dobrushin_bounds(matrix, budget)
    except SpectralNormTooLarge as exc:
        report["warnings"].append(str(exc))
        report["timing_ms"] = round((time.time() - t0) * 1000.0, 3)
        _emit(report, args)
        return EXIT_OK
    results["nu_bound"] = list(bound.nu_bound)
    results["delta"] = bound.delta
    if bound.nu_delta_bound is not None:
        results["nu_delta_bound"] = list(bound.nu_delta_bound)
    report["timing_ms"] = round((time.time() - t0) * 1000.0, 3)
    _emit(report, args)
    return EXIT_OK


def cmd_ising(args) -> int:
    t0 = time.time()
    report = _base_report(args, {}, t0)
    results = report["results"]
    code = EXIT_OK
    if args.ising_cmd == "nu-limit":
        results["nu"] = nu_bethe_limit(args.J, args.eps, args.d)
        results["fixed_point"] = bethe_fixed_point(args.J, 0.5 * args.eps, args.d).x
    elif args.ising_cmd == "critical":
        results["critical_coupling"] = critical_coupling(args.d)
    elif args.ising_cmd == "enforce":
        eps = enforceable_epsilon(args.nu, args.J, args.d)
        results["enforceable_eps"] = eps
        if eps is None:
            report["warnings"].append(
                "target is below the supercritical inference floor"
            )
            code = EXIT_FINDING
    elif args.ising_cmd == "sensitivity":
        eps_list = [float(p) for p in args.eps_list.split(",") if p.strip()]
        rows = sensitivity_profile(args.J, args.h0, args.d, eps_list)
        results["profile"] = [{"eps": e, "nu": v} for e, v in rows]
    elif args.ising_cmd == "sweep":
        eps_grid = [float(p) for p in args.eps_grid.split(",") if p.strip()]
        j_grid = [float(p) for p in args.J_grid.split(",") if p.strip()]
        lines = ["eps,J,h0,d,nu,backend"]
        for J in j_grid:
            for eps in eps_grid:
                if args.h0 == 0.0:
                    nu = nu_bethe_limit(J, eps, args.d)
                    backend = "bethe-limit"
                else:
                    ((_, nu),) = sensitivity_profile(J, args.h0, args.d, [eps])
                    backend = "bethe-sensitivity"
                lines.append(
                    f"{eps:.12g},{J:.12g},{args.h0:.12g},{args.d},{nu:.12g},{backend}"
                )
        text = "\n".join(lines) + "\n"
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    else:
        raise ParseError(f"unknown ising subcommand {args.ising_cmd!r}")
    report["timing_ms"] = round((time.time() - t0) * 1000.0, 3)
    _emit(report, args)
    return code


def _add_common(parser) -> None:
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--out", default=None, help="write the report here")
    parser.add_argument("--seed", type=int, default=None, help="PRNG seed")
    parser.add_argument("--cap", type=int, default=None,
                        help="dense size cap (also INFERA_CAP)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infera",
        description="Inference leakage analysis for differentially private "
        "mechanisms under correlated priors",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("check", help="structure checks on a prior")
    p.add_argument("--dist", required=True)
    p.add_argument("--what", choices=("affiliation", "pairwise", "both"), default="both")
    _add_common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("nu", help="inference parameter of one coordinate")
    p.add_argument("--dist", required=True)
    p.add_argument("--eps", required=True, help="budget: one value or n comma-separated")
    p.add_argument("--target", type=int, default=0, help="coordinate index")
    p.add_argument("--method", choices=("exact", "closed-form", "gibbs", "all"),
                   default="exact")
    p.add_argument("--force", action="store_true",
                   help="evaluate the closed form on non-affiliated priors")
    p.add_argument("--witness-out", default=None, help="export the LP witness")
    p.add_argument("--lp-cap", type=int, default=DEFAULT_LP_CAP)
    _add_common(p)
    p.set_defaults(func=cmd_nu)

    p = sub.add_parser("bound", help="influence-matrix bounds")
    p.add_argument("--dist", required=True)
    p.add_argument("--eps", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("ising", help="deep-tree analysis")
    isub = p.add_subparsers(dest="ising_cmd", required=True)

    q = isub.add_parser("nu-limit")
    q.add_argument("--J", type=float, required=True)
    q.add_argument("--eps", type=float, required=True)
    q.add_argument("--d", type=int, required=True)
    _add_common(q)
    q.set_defaults(func=cmd_ising)

    q = isub.add_parser("critical")
    q.add_argument("--d", type=int, required=True)
    _add_common(q)
    q.set_defaults(func=cmd_ising)

    q = isub.add_parser("enforce")
    q.add_argument("--nu", type=float, required=True, help="target leakage")
    q.add_argument("--J", type=float, required=True)
    q.add_argument("--d", type=int, required=True)
    _add_common(q)
    q.set_defaults(func=cmd_ising)

    q = isub.add_parser("sensitivity")
    q.add_argument("--J", type=float, required=True)
    q.add_argument("--h0", type=float, required=True)
    q.add_argument("--d", type=int, required=True)
    q.add_argument("--eps-list", required=True, help="comma-separated budgets")
    _add_common(q)
    q.set_defaults(func=cmd_ising)

    q = isub.add_parser("sweep")
    q.add_argument("--J-grid", required=True, help="comma-separated couplings")
    q.add_argument("--eps-grid", required=True, help="comma-separated budgets")
    q.add_argument("--h0", type=float, default=0.0)
    q.add_argument("--d", type=int, required=True)
    _add_common(q)
    q.set_defaults(func=cmd_ising)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._argv = list(argv) if argv is not None else sys.argv[1:]
    try:
        return args.func(args)
    except InferaError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
