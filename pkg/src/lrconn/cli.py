"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 input error, 3 a bounded
check was inconclusive under ``--strict``, 4 matrix not idempotent,
5 derivation not tangent, 6 cofactor identity fails.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .connections import (
    ConnectionPresentation,
    CurvatureTypeBoundError,
    ExpansionError,
    check_flat,
    curvature_matrix,
    curvature_oracle,
    detect_curvature_type,
    generator_pairs,
)
from .derham import (
    OneForm,
    d0,
    d1,
    exactness_witness,
    h_bounded,
    is_closed,
    omega_n,
    oneform_equal,
)
from .exactring import PolynomialSyntaxError, parse_poly
from .presentation import BUNDLED, Presentation, PresentationError, canonical_digest, parse_presentation
from .suite import (
    DEFAULT_SAMPLES,
    FAIL,
    H1_CONFLICT,
    INCONCLUSIVE,
    PASS,
    Verdict,
    check_equivalence,
    check_gamma,
    check_jacobi,
    check_leibniz,
    check_torsor,
    run_suite,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_STRICT = 0, 1, 2, 3

GENERATOR_WARNING = "curvature and flatness verdicts are relative to the declared generating set"


def _digest(pres: Presentation | None, args: argparse.Namespace, extra: dict | None = None) -> str:
    inputs = {"presentation": pres.source if pres else None, "maxdeg": args.maxdeg, "seed": args.seed}
    inputs.update(extra or {})
    return canonical_digest(inputs)


def make_report(command: str, pres: Presentation | None, args: argparse.Namespace, verdicts: list[Verdict],
                results: dict | None = None, extra_inputs: dict | None = None, started: float | None = None) -> dict:
    verdicts = sorted(verdicts, key=lambda v: v.name)
    counts = {s: sum(v.status == s for v in verdicts) for s in (PASS, FAIL, INCONCLUSIVE)}
    witnesses = {}
    conflicts = []
    for v in verdicts:
        result = v.detail.get("result") if isinstance(v.detail, dict) else None
        if isinstance(result, dict) and "witness" in result:
            witnesses[v.name] = result["witness"]
        if isinstance(v.detail, dict) and v.detail.get("conflict"):
            conflicts.append({"check": v.name, "statement": v.detail["conflict"]})
    report = {
        "command": command,
        "presentation": pres.name if pres else None,
        "inputs_digest": _digest(pres, args, extra_inputs),
        "maxdeg": args.maxdeg,
        "seed": args.seed,
        "summary": counts,
        "verdicts": [v.to_json() for v in verdicts],
        "witnesses": witnesses,
        "counterexamples": [{"check": v.name, "data": v.counterexample} for v in verdicts if v.status == FAIL],
        "conflicts": conflicts,
        "warnings": [GENERATOR_WARNING] if pres is not None else [],
        "results": results or {},
        "timings": None,
    }
    if getattr(args, "timings", False) and started is not None:
        report["timings"] = {"total_seconds": round(time.perf_counter() - started, 3)}
    return report


def render(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def emit(report: dict, args: argparse.Namespace) -> int:
    text = render(report)
    if args.out:
        Path(args.out).write_text(text)
    if args.json:
        sys.stdout.write(text)
    else:
        for v in report["verdicts"]:
            line = f"{v['status'].upper():<13}{v['name']}"
            if v.get("bound") is not None:
                line += f"  (up to degree {v['bound']})"
            print(line)
        for key, value in report["results"].items():
            print(f"{key}: {value if isinstance(value, str) else json.dumps(value, sort_keys=True)}")
        for c in report["conflicts"]:
            print(f"CONFLICT     {c['check']}: {c['statement']}")
        s = report["summary"]
        print(f"{report['command']}: {s[PASS]} pass, {s[FAIL]} fail, {s[INCONCLUSIVE]} inconclusive "
              f"(seed {report['seed']}, maxdeg {report['maxdeg']})")
    return exit_code(report, args)


def exit_code(report: dict, args: argparse.Namespace) -> int:
    s = report["summary"]
    if s[FAIL]:
        return EXIT_FAIL
    if s[INCONCLUSIVE] and args.strict:
        return EXIT_STRICT
    return EXIT_OK


def _samples(args: argparse.Namespace) -> dict:
    if args.n is None:
        return dict(DEFAULT_SAMPLES)
    return {k: args.n for k in DEFAULT_SAMPLES}


# -- commands ------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    pres = parse_presentation(args.preset)
    samples = _samples(args)
    verdicts = run_suite(pres, args.maxdeg, args.seed, samples)
    report = make_report(f"verify {pres.name}", pres, args, verdicts,
                         extra_inputs={"samples": samples}, started=started)
    return emit(report, args)


def _pairs(pres: Presentation, args: argparse.Namespace) -> list[tuple[int, int]]:
    k = len(pres.generators)
    if args.pair is None:
        return generator_pairs(k)
    i, j = args.pair
    if not (1 <= i <= k and 1 <= j <= k):
        raise PresentationError(f"--pair indices must be between 1 and {k}", "--pair")
    return [(i - 1, j - 1)]


def cmd_curvature(args: argparse.Namespace) -> int:
    pres = parse_presentation(args.source)
    G, names = pres.generators, pres.generator_names
    ctx = ConnectionPresentation(pres.phi, pres.potential, args.maxdeg)
    pairs = _pairs(pres, args)
    results, verdicts = {}, []
    rvals = []
    for i, j in pairs:
        key = f"R({names[i]},{names[j]})"
        if pres.potential is None:
            r, oracle = curvature_matrix(pres.phi, G[i], G[j]), curvature_oracle(pres.phi, G[i], G[j])
        else:
            r, oracle = ctx.curvature(G[i], G[j]), ctx.curvature_oracle(G[i], G[j])
        rvals.append(r)
        entry = {"matrix": r.to_json()}
        results[key] = entry
        ok = r == oracle
        verdicts.append(Verdict(f"oracle.{names[i]},{names[j]}", PASS if ok else FAIL, {},
                                None if ok else {"formula": r.to_json(), "oracle": oracle.to_json()}))
    if pres.rho is not None:
        try:
            f = detect_curvature_type(rvals, pres.rho, args.maxdeg)
        except CurvatureTypeBoundError:
            verdicts.append(Verdict("curvature_type", INCONCLUSIVE, {}, None, args.maxdeg))
        else:
            if f is None:
                results["curvature_type"] = "not a multiple of rho"
            else:
                for (i, j), fv in zip(pairs, f):
                    results[f"R({names[i]},{names[j]})"]["factor_of_rho"] = str(fv)
    results["flat_on_pairs"] = all(r.is_zero() for r in rvals)
    report = make_report(f"curvature {pres.name}", pres, args, verdicts, results,
                         extra_inputs={"pairs": pairs})
    return emit(report, args)


def cmd_flat(args: argparse.Namespace) -> int:
    pres = parse_presentation(args.source)
    flat = check_flat(pres.phi, pres.generators, pres.potential)
    report = make_report(f"flat {pres.name}", pres, args, [],
                         {"flat": flat, "potential": "given" if pres.potential else "zero"})
    return emit(report, args)


LR_CHECKS = {
    "jacobi": [check_jacobi, check_leibniz],
    "gamma": [check_gamma],
    "transform": [check_equivalence],
    "torsor": [check_torsor],
}


def cmd_lr(args: argparse.Namespace) -> int:
    pres = parse_presentation(args.source)
    samples = _samples(args)
    verdicts = []
    for check in LR_CHECKS[args.lr_command]:
        verdicts.extend(check(pres, maxdeg=args.maxdeg, seed=args.seed, samples=samples))
    report = make_report(f"lr {args.lr_command} {pres.name}", pres, args, verdicts,
                         extra_inputs={"samples": samples})
    return emit(report, args)


def _form(pres: Presentation, args: argparse.Namespace) -> tuple[OneForm, str]:
    if args.form is not None:
        parts = [s.strip() for s in args.form.split(",")]
        if len(parts) != 3:
            raise PresentationError("--form needs three comma-separated coefficients", "--form")
        try:
            coeffs = [pres.ring.normalize(parse_poly(p, pres.ring.variable_names)) for p in parts]
        except PolynomialSyntaxError as exc:
            raise PresentationError(str(exc), "--form") from None
        return OneForm(pres.ring, coeffs), args.form
    n = 0 if args.n is None else args.n
    return omega_n(pres.ring, n), f"omega_{n}"


def cmd_derham(args: argparse.Namespace) -> int:
    pres = parse_presentation(args.source)
    if pres.ring.nvars != 3:
        raise PresentationError("differential forms need a three-variable ring", "ring")
    verdicts, results = [], {}
    sub = args.derham_command
    if sub == "omega":
        w, label = _form(pres, args)
        results[label] = w.to_json()
    elif sub == "closed":
        w, label = _form(pres, args)
        closed = is_closed(w)
        results["form"] = label
        results["closed"] = closed
        results["curl"] = d1(w).to_json()
    elif sub == "exact":
        w, label = _form(pres, args)
        res = exactness_witness(w, args.maxdeg)
        results["form"] = label
        results.update(res.to_json())
        status = PASS if res.exact else INCONCLUSIVE if res.status == "inconclusive" else FAIL
        detail = {"result": res.to_json()}
        if res.exact:
            detail["reverified"] = oneform_equal(d0(res.witness), w, args.maxdeg)
            if label == "omega_0":
                detail["conflict"] = H1_CONFLICT
        counterexample = {"form": w.to_json(), "curl": d1(w).to_json()} if status == FAIL else None
        verdicts.append(Verdict("exactness", status, detail, counterexample, args.maxdeg))
    elif sub == "hdim":
        h = h_bounded(pres.ring, args.i, args.maxdeg)
        results.update(h.to_json())
    report = make_report(f"derham {sub} {pres.name}", pres, args, verdicts, results,
                         extra_inputs={"form": args.form, "n": args.n, "i": getattr(args, "i", None)})
    return emit(report, args)


def cmd_presets(args: argparse.Namespace) -> int:
    listing = {}
    for name in BUNDLED:
        pres = parse_presentation(name)
        listing[name] = {
            "ring": {"variables": list(pres.ring.variable_names), "relation": pres.ring.format(pres.ring.relation)},
            "generators": dict(zip(pres.generator_names, (g.to_json() for g in pres.generators))),
            "size": pres.phi.rows,
        }
    if args.json:
        sys.stdout.write(json.dumps(listing, indent=2, sort_keys=True) + "\n")
    else:
        for name, info in listing.items():
            print(f"{name}: {info['ring']['relation']} = 0 in {', '.join(info['ring']['variables'])}; "
                  f"{len(info['generators'])} generators; idempotent {info['size']}x{info['size']}")
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--maxdeg", type=int, default=8, help="degree bound for linear solves (default 8)")
    common.add_argument("--seed", type=int, default=0, help="seed for random instances (default 0)")
    common.add_argument("--strict", action="store_true", help="treat inconclusive-at-bound as failure")
    common.add_argument("--out", help="write the JSON report to this path")
    common.add_argument("--json", action="store_true", help="print the JSON report instead of a summary")
    common.add_argument("--timings", action="store_true", help="record wall-clock time (report no longer reproducible)")

    parser = argparse.ArgumentParser(prog="lrconn", description="Exact connection and curvature checks on hypersurfaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run the full check suite on a preset or file")
    p.add_argument("preset", help="sphere, russel, or a presentation file")
    p.add_argument("--n", type=int, help="override every random sample count")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("curvature", parents=[common], help="curvature matrices on generator pairs")
    p.add_argument("source")
    p.add_argument("--pair", type=int, nargs=2, metavar=("I", "J"), help="1-based generator indices")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("flat", parents=[common], help="is the connection with the given potential flat")
    p.add_argument("source")
    p.set_defaults(func=cmd_flat)

    p = sub.add_parser("lr", parents=[common], help="Lie-Rinehart bracket and pair checks")
    p.add_argument("lr_command", choices=sorted(LR_CHECKS))
    p.add_argument("source", nargs="?", default="sphere")
    p.add_argument("--n", type=int, help="number of random instances")
    p.set_defaults(func=cmd_lr)

    p = sub.add_parser("derham", parents=[common], help="bounded de Rham computations on a surface")
    p.add_argument("derham_command", choices=["closed", "exact", "hdim", "omega"])
    p.add_argument("source", nargs="?", default="sphere")
    p.add_argument("--n", type=int, help="use the form omega_n (default 0)")
    p.add_argument("--form", help="one-form as 'P,Q,R' (coefficients of dx, dy, dz)")
    p.add_argument("--i", type=int, choices=[1, 2], default=1, help="cohomological degree for hdim")
    p.set_defaults(func=cmd_derham)

    p = sub.add_parser("presets", parents=[common], help="list bundled presentations")
    p.set_defaults(func=cmd_presets)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.maxdeg < 0:
        parser.error("--maxdeg must be non-negative")
    try:
        return args.func(args)
    except PresentationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ExpansionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
