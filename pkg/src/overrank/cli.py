"""Command-line front end: series expansion, deviation computation, and the
verification suites.

Exit status: 0 when every requested check passes (pole_skipped marks
parameter sets outside an identity's genericity hypotheses and does not fail
a run), 1 when any check fails or an expression cannot be evaluated, 2 for
usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from . import verify as ver
from .errors import QAlgebraError
from .expr import evaluate, parse
from .oracle import build_rank_table, deviation
from .report import VerificationReport
from .series import render_series

DEFAULT_ORDER = 60


def _expand(args) -> int:
    try:
        tree = parse(args.expr)
        series = evaluate(tree, args.order)
    except (QAlgebraError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.json:
        doc = {
            "expr": args.expr,
            "order": args.order,
            "series": render_series(series),
            "terms": [{"exp": e, "coeff": str(c)} for e, c in series.nonzero_items()],
        }
        print(json.dumps(doc, indent=2))
    else:
        print(render_series(series))
    return 0


def _dev(args) -> int:
    which = "m2" if args.m2 else "rank"
    try:
        series = deviation(args.a, args.M, which, args.order)
    except (QAlgebraError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(render_series(series))
    return 0


def _oracle(args) -> int:
    which = "m2" if args.m2 else "rank"
    table = build_rank_table(args.nmax, which)
    print("n\tm\tcount")
    for n in range(table.n_max + 1):
        for m in sorted(table.rows[n]):
            print(f"{n}\t{m}\t{table.rows[n][m]}")
    return 0


def _run_unit(unit) -> list[VerificationReport]:
    kind = unit[0]
    if kind == "lemmas":
        return ver.kernel_identity_reports(unit[1])
    if kind == "mod3":
        return ver.mod3_reports(unit[1], unit[2])
    if kind == "mod6":
        return ver.mod6_reports(unit[1])
    if kind == "derivation":
        return ver.proof_instantiation_reports(unit[1])
    if kind == "rank-pair":
        return [ver.verify_pair(unit[2], unit[1], "rank", unit[3])]
    if kind == "m2-pair":
        return [ver.verify_pair(unit[2], unit[1], "m2", unit[3])]
    if kind == "generic":
        return ver.generic_independence_reports(unit[1])
    raise ValueError(f"unknown work unit {kind!r}")


def _verify_units(group: str, order: int, M: int | None, a: int | None):
    units = []
    if group in ("thm1", "all"):
        if group == "thm1" and M is not None:
            cases = [(M, aa) for aa in ((a,) if a is not None else range(2, M + 1))]
        else:
            cases = [(mm, aa) for mm, aas in ver.RANK_PAIR_CASES for aa in aas]
        units += [("rank-pair", mm, aa, order) for mm, aa in cases]
    if group in ("thm2", "all"):
        if group == "thm2" and M is not None:
            cases = [(M, aa) for aa in ((a,) if a is not None else range(1, M))]
        else:
            cases = [(mm, aa) for mm, aas in ver.M2_PAIR_CASES for aa in aas]
        units += [("m2-pair", mm, aa, order) for mm, aa in cases]
    if group in ("section4", "all"):
        units += [("mod3", order, max(order // 3, 8)), ("mod6", order),
                  ("derivation", min(order, 50))]
    if group in ("lemmas", "all"):
        units += [("lemmas", order)]
    if group == "all":
        units += [("generic", min(order, 40))]
    return units


def _verify(args) -> int:
    units = _verify_units(args.group, args.order, args.M, args.a)
    reports: list[VerificationReport] = []
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for chunk in pool.map(_run_unit, units):
                reports.extend(chunk)
    else:
        for unit in units:
            reports.extend(_run_unit(unit))
    reports.sort(key=lambda r: r.identity_id)
    failed = [r for r in reports if r.status == "fail"]
    skipped = [r for r in reports if r.status == "pole_skipped"]
    if args.json:
        print(json.dumps([r.to_json_dict() for r in reports], indent=2))
    else:
        for r in reports:
            print(r)
        print(f"{len(reports)} checks: {len(reports) - len(failed) - len(skipped)} passed, "
              f"{len(failed)} failed, {len(skipped)} pole-skipped")
    if failed:
        for r in failed:
            print(str(r), file=sys.stderr)
        return 1
    return 0


def build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="overrank",
                                  description="exact q-series calculus for overpartition rank deviations")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", help="expand an expression as an exact q-series")
    p.add_argument("expr")
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_expand)

    p = sub.add_parser("dev", help="print a rank deviation series")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--m2", action="store_true", help="use the M2-rank")
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.set_defaults(func=_dev)

    p = sub.add_parser("verify", help="run an identity verification suite")
    p.add_argument("group", choices=["thm1", "thm2", "section4", "lemmas", "all"])
    p.add_argument("--M", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.add_argument("--json", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_verify)

    p = sub.add_parser("oracle", help="dump the enumeration-backed rank table")
    p.add_argument("--nmax", type=int, required=True)
    p.add_argument("--m2", action="store_true")
    p.set_defaults(func=_oracle)
    return top


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
