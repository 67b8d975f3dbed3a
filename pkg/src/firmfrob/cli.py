"""Command line: check, convert, cosep, casimir, gen.

Exit codes: 0 all checks pass, 1 a mathematical check failed or an input was
refused, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import formats
from .algcore import check_associativity, check_firm_algebra, check_nondegenerate, verify_local_units
from .algcore import LocalUnitFamily, find_unit
from .coalgcore import check_coalgebra
from .errors import FirmFrobError, ParseError, Refused, UsageError
from .families import (FiniteGroup, gen_comatrix, gen_graded_smash, gen_grouplike, gen_nil, gen_trunc_poly,
                       group_algebra, cyclic_group, window_check)
from .fields import FieldSpec
from .frobcore import (LEFT, build_from_cosep, casimir_from_delta, casimir_roundtrip_report, cosep_solve,
                       multiplier_to_element)
from .modcomod import induced_action, induced_coaction, verify_roundtrips
from .report import WINDOW, CheckReport, aggregate
from .suite import run_suite

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _print_report(rep: CheckReport, out=None) -> None:
    out = out or sys.stdout
    for c in rep.children or [rep]:
        print(str(c), file=out)
    bad = rep.first_failure()
    if bad is not None and bad.witness is not None:
        print(f"witness: {json.dumps(bad.witness.to_dict(), ensure_ascii=False)}", file=out)
    tail = f" ({rep.detail})" if rep.verdict == WINDOW else ""
    print(f"overall: {rep.verdict}{tail}", file=out)


def _emit(args, rep: CheckReport, sha: str | None, extra: dict | None = None) -> int:
    _print_report(rep)
    if getattr(args, "report", None):
        formats.write_document(args.report, formats.report_to_doc(rep, sha, args.seed, args.window, extra))
    return EXIT_OK if rep.ok else EXIT_FAIL


def _refused(exc: Refused, what: str = "") -> int:
    print(f"refused: {what + ': ' if what else ''}{exc.reason}")
    if exc.report is not None:
        _print_report(exc.report)
    return EXIT_FAIL


# -- commands ------------------------------------------------------------------


ALGEBRA_SUITES = {
    "algebra": lambda R, E, a: aggregate("algebra", [check_associativity(R), check_nondegenerate(R)]),
    "firmness": lambda R, E, a: check_firm_algebra(R)[0],
    "local_units": lambda R, E, a: _algebra_local_units(R, E, a),
}


def _algebra_local_units(R, E, args) -> CheckReport:
    if E is None:
        u = find_unit(R)
        if u is None:
            return CheckReport.refused("local_units", "no local-unit family supplied and no unit found")
        E = LocalUnitFamily((u,), args.max_subset)
    return verify_local_units(R, LocalUnitFamily(E.elements, args.max_subset))


def cmd_check(args) -> int:
    kind, obj, sha = formats.load(args.path)
    suite = args.suite
    if kind == "bundle":
        B, mods, comods = obj
        rep = run_suite(B, suite or "full", seed=args.seed, max_subset=args.max_subset, parallel=args.parallel)
        if mods or comods:
            rep = aggregate("suite", rep.children + [verify_roundtrips(B, list(mods) + list(comods))], rep.detail)
    elif kind == "algebra":
        R, E = obj
        names = (suite or "algebra,firmness,local_units").split(",")
        unknown = [n for n in names if n not in ALGEBRA_SUITES]
        if unknown:
            raise UsageError(f"suite {unknown[0]!r} needs a bundle; algebra files support {', '.join(ALGEBRA_SUITES)}")
        rep = aggregate("suite", [ALGEBRA_SUITES[n](R, E, args) for n in names], ", ".join(names))
    elif kind == "coalgebra":
        if suite not in (None, "coalgebra"):
            raise UsageError("coalgebra files support only the coalgebra suite")
        rep = aggregate("suite", [check_coalgebra(obj)], "coalgebra")
    elif kind == "locally-finite":
        rep = window_check(obj, args.window, suite or "full", seed=args.seed, max_subset=args.max_subset,
                           parallel=args.parallel)
    else:
        raise UsageError(f"cannot check a {kind} document on its own")
    return _emit(args, rep, sha)


def _load_bundle(path: str):
    kind, obj, sha = formats.load(path)
    if kind != "bundle":
        raise UsageError(f"{path}: expected a bundle document, got {kind}")
    return obj[0], sha


def cmd_convert(args) -> int:
    B, _ = _load_bundle(args.bundle)
    kind, X, _ = formats.load(args.module)
    try:
        if args.direction == "mod2comod":
            if kind != "module":
                raise UsageError(f"{args.module}: expected a module document, got {kind}")
            Y = induced_coaction(B, X)
            doc = formats.comodule_to_doc(Y, B.dim)
            back = induced_action(B, Y).action == X.action if args.verify_roundtrip else True
        else:
            if kind != "comodule":
                raise UsageError(f"{args.module}: expected a comodule document, got {kind}")
            Y = induced_action(B, X)
            doc = formats.module_to_doc(Y, B.dim)
            back = induced_coaction(B, Y).coaction == X.coaction if args.verify_roundtrip else True
    except Refused as exc:
        return _refused(exc)
    formats.write_document(args.out, doc)
    if not back:
        print("round trip: changed")
        return EXIT_FAIL
    print("round trip: exact" if args.verify_roundtrip else f"wrote {args.out}")
    return EXIT_OK


def cmd_cosep(args) -> int:
    kind, obj, sha = formats.load(args.coalgebra)
    if kind == "bundle":
        C = obj[0].coalgebra
    elif kind == "coalgebra":
        C = obj
    else:
        raise UsageError(f"{args.coalgebra}: expected a coalgebra or bundle document, got {kind}")
    try:
        nu = cosep_solve(C, seed=args.seed)
    except Refused as exc:
        return _refused(exc)
    if nu is None:
        print("not coseparable")
        return EXIT_FAIL
    B = build_from_cosep(C, nu)
    formats.write_document(args.out, formats.bundle_to_doc(B))
    rep = run_suite(B, "all", seed=args.seed, max_subset=args.max_subset, parallel=args.parallel)
    return _emit(args, rep, sha)


def cmd_casimir(args) -> int:
    B, sha = _load_bundle(args.bundle)
    try:
        m = casimir_from_delta(B)
    except Refused as exc:
        return _refused(exc)
    elements = [multiplier_to_element(B, m, r, LEFT) for r in range(B.dim)]
    rep = casimir_roundtrip_report(B)
    formats.write_document(args.out, formats.casimir_to_doc(B, m, elements, rep))
    return _emit(args, rep, sha)


def _group_from_args(args) -> FiniteGroup:
    if args.group_table:
        try:
            with open(args.group_table, encoding="utf-8") as fh:
                table = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParseError(str(exc), args.group_table) from None
        if not isinstance(table, list):
            raise ParseError("group table must be a JSON array of arrays", args.group_table)
        return FiniteGroup(tuple(tuple(row) for row in table))
    if args.order is None:
        raise UsageError("give --order or --group-table")
    if not 1 <= args.order <= 64:
        raise UsageError("--order must be in 1..64")
    return cyclic_group(args.order)


def cmd_gen(args) -> int:
    F = FieldSpec.parse(args.field)
    fam = args.family
    if fam == "grouplike":
        if args.integers:
            doc = formats.locally_finite_to_doc("grouplike-integers", F)
        else:
            doc = formats.bundle_to_doc(gen_grouplike(_group_from_args(args), F, args.max_subset))
    elif fam == "comatrix":
        if args.n is None or args.n < 1:
            raise UsageError("comatrix needs --n >= 1")
        doc = formats.coalgebra_to_doc(gen_comatrix(args.n, F))
    elif fam == "smash":
        sm = gen_graded_smash(group_algebra(_group_from_args(args), F), args.max_subset)
        doc = formats.algebra_to_doc(sm.algebra, sm.local_units)
    elif fam == "truncpoly":
        doc = formats.bundle_to_doc(gen_trunc_poly(F, args.max_subset))
    elif fam == "nil":
        doc = formats.bundle_to_doc(gen_nil(F))
    else:
        raise UsageError(f"unknown family {fam!r}")
    formats.write_document(args.out, doc)
    print(f"wrote {args.out}")
    return EXIT_OK


# -- parser --------------------------------------------------------------------


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="random seed (default 0)")
    p.add_argument("--window", type=int, default=d(5), help="window size for locally-finite bundles (default 5)")
    p.add_argument("--max-subset", type=int, default=d(2), help="local-unit subset bound (default 2)")
    p.add_argument("--parallel", action=argparse.BooleanOptionalAction, default=d(True),
                   help="run independent checks concurrently (default on; never changes verdicts)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="firmfrob", description="Exact checks for firm Frobenius bundles.")
    _global_flags(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="run a check suite on a document")
    p.add_argument("path")
    p.add_argument("--suite", help="comma-separated suite names, or full / all")
    p.add_argument("--report", help="write a JSON report here")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("convert", parents=[common], help="transport a module or comodule")
    p.add_argument("direction", choices=("mod2comod", "comod2mod"))
    p.add_argument("module")
    p.add_argument("bundle")
    p.add_argument("out")
    p.add_argument("--verify-roundtrip", action="store_true")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("cosep", parents=[common], help="solve for a multiplication from a coalgebra")
    p.add_argument("coalgebra")
    p.add_argument("out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_cosep)

    p = sub.add_parser("casimir", parents=[common], help="compute the Casimir multiplier of a bundle")
    p.add_argument("bundle")
    p.add_argument("out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_casimir)

    p = sub.add_parser("gen", parents=[common], help="write a fixture")
    p.add_argument("family", choices=("grouplike", "comatrix", "smash", "truncpoly", "nil"))
    p.add_argument("out")
    p.add_argument("--field", default="q", help="q, or a prime p / GF(p) (default q)")
    p.add_argument("--order", type=int, help="cyclic group order")
    p.add_argument("--group-table", help="JSON file with a group multiplication table")
    p.add_argument("--integers", action="store_true", help="grouplike bundle over the integers")
    p.add_argument("--n", type=int, help="comatrix size")
    p.set_defaults(func=cmd_gen)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Refused as exc:
        return _refused(exc)
    except FirmFrobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
