"""Command-line front end.

Exit codes: 0 success, 1 property failure (or a Fails verdict), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import checker, schemas
from .chunks import NOT_A_CHUNK, AdditiveZ, MultiplicativePAdic, classify_finite_chunk, is_chunk
from .formula import (FormulaSyntaxError, Language, UnknownPredicateError, parse_formulas,
                      print_formula, stats)
from .germs import check_separated, germs_open_affine, germs_valued_congruence
from .ring import load_model
from .scalars import PAdicQ, as_fraction, parse_host

OK, FAILURE, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--host", default=None, help="ordered-q or padic-q:<p>")
    p.add_argument("--depth", type=int, default=None, help="sampling / pool depth")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="write output here instead of stdout")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--timings", action="store_true", help="record per-case wall time")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="contdef", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="verb", required=True)

    e = sub.add_parser("emit", parents=[common], help="print a named schema")
    e.add_argument("name")
    e.add_argument("args", nargs="*", type=int)
    e.add_argument("--pretty", action="store_true")

    lf = sub.add_parser("lift", parents=[common], help="lift formulas over the field")
    lf.add_argument("file", help="one formula per line; '-' for stdin")
    lf.add_argument("--var", default="s", help="name of the zero-set variable")

    ev = sub.add_parser("eval", parents=[common], help="evaluate formulas against a model")
    ev.add_argument("file")
    ev.add_argument("--model", required=True, help="JSON model file")
    ev.add_argument("--no-lemmas", action="store_true", help="expand schema instances")
    ev.add_argument("--budget", type=int, default=200_000)

    su = sub.add_parser("suite", parents=[common], help="run a check suite")
    su.add_argument("name", help=", ".join(checker.SUITE_NAMES))

    cc = sub.add_parser("classify-chunk", parents=[common], help="classify a finite chunk")
    cc.add_argument("elements", nargs="+")
    cc.add_argument("--tau", required=True)
    cc.add_argument("--group", default="additive", help="additive or multiplicative")

    g = sub.add_parser("germs", parents=[common], help="build and check separated germs")
    g.add_argument("--kind", choices=("open-affine", "valued-congruence"), default="open-affine")
    g.add_argument("--k", type=int, default=2)
    g.add_argument("--p0", default=None, help="comma-separated base point")
    return ap


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(str(e))


def _emit(args, out) -> int:
    try:
        sch = schemas.build(args.name, args.args)
    except (KeyError, TypeError, ValueError) as e:
        raise UsageError(e.args[0] if e.args else str(e))
    st = stats(sch.body)
    if args.format == "json":
        out(json.dumps({"name": sch.name, "params": list(sch.params),
                        "formula": print_formula(sch.body), "stats": st}, sort_keys=True))
    else:
        from .formula import pretty
        out(pretty(sch.body) if args.pretty else print_formula(sch.body))
        out(f"; {sch.name}({', '.join(sch.params)}) nodes={st['nodes']} "
            f"quantifiers={st['quantifiers']} depth={st['quantifier_depth']} "
            f"language={st['language']}")
    return OK


def _lift(args, out) -> int:
    try:
        phis = parse_formulas(_read(args.file), Language.RING_O)
        lifted = [schemas.lift(phi, args.var) for phi in phis]
    except (FormulaSyntaxError, UnknownPredicateError, schemas.LiftError) as e:
        raise UsageError(str(e))
    if args.format == "json":
        out(json.dumps([{"input": print_formula(a), "lifted": print_formula(b),
                         "stats": stats(b)} for a, b in zip(phis, lifted)], sort_keys=True))
    else:
        for b in lifted:
            out(print_formula(b))
    return OK


def _eval(args, out) -> int:
    try:
        spec = load_model(_read(args.model))
        phis = parse_formulas(_read(args.file), language=None)
    except (ValueError, FormulaSyntaxError) as e:
        raise UsageError(str(e))
    host = parse_host(args.host) if args.host else spec.host
    model = checker.FiniteRing(host, spec.points.labels, spec.elements)
    rows, code = [], OK
    for phi in phis:
        try:
            v = checker.eval_bounded(phi, model, depth=args.depth or 2,
                                     lemmas=not args.no_lemmas, budget=args.budget)
        except ValueError as e:
            raise UsageError(str(e))
        if v.fails:
            code = FAILURE
        rows.append({"formula": print_formula(phi), **v.to_dict()})
    if args.format == "json":
        out(json.dumps({"model": model.describe(), "results": rows}, sort_keys=True, indent=1))
    else:
        for r in rows:
            extra = r.get("witness") or r.get("counterexample") or r.get("reason") or ""
            out(f"{r['verdict'].upper():8} {r['formula']}" + (f"  [{extra}]" if extra else ""))
    return code


def _suite(args, out) -> int:
    if args.name not in checker.SUITE_NAMES:
        raise UsageError(f"unknown suite {args.name!r}; expected one of "
                         f"{', '.join(checker.SUITE_NAMES)}")
    rep = checker.run_suite(args.name, depth=args.depth or 12, seed=args.seed,
                            timings=args.timings)
    if args.format == "json":
        out(checker.report_json(rep))
    else:
        for c in rep["cases"]:
            flag = "  VIOLATION" if c.get("violation") else ""
            out(f"{c['verdict'].upper():8} {c['id']}{flag}")
        s = rep["summary"]
        out(f"suite={rep['suite']} seed={rep['seed']} depth={rep['depth']} cases={s['cases']} "
            f"holds={s['holds']} fails={s['fails']} unknown={s['unknown']} "
            f"violations={s['violations']} property_failures={s['property_failures']}")
    return OK if rep["summary"]["ok"] else FAILURE


def _classify(args, out) -> int:
    try:
        if args.group == "additive":
            group = AdditiveZ()
            conv = int
        elif args.group.startswith("mult"):
            host = parse_host(args.host or "padic-q:3")
            if not isinstance(host, PAdicQ):
                raise UsageError("the multiplicative group needs a p-adic host")
            group = MultiplicativePAdic(host)
            conv = as_fraction
        else:
            raise UsageError(f"unknown group {args.group!r}")
        T = [conv(x) for x in args.elements]
        tau = conv(args.tau)
        res = is_chunk(T, tau, group)
    except ValueError as e:
        raise UsageError(str(e))
    n = classify_finite_chunk(T, tau, group)
    if args.format == "json":
        out(json.dumps({"n": n, "clause": res.clause, "detail": res.detail}, sort_keys=True))
    else:
        out(str(n) if n != NOT_A_CHUNK else f"{NOT_A_CHUNK} (clause {res.clause}: {res.detail})")
    return OK


def _germs(args, out) -> int:
    depth = args.depth or 12
    try:
        if args.kind == "open-affine":
            p0 = tuple(as_fraction(c) for c in (args.p0 or "0,0").split(","))
            w = germs_open_affine(args.k, p0, parse_host(args.host or "ordered-q"))
        else:
            host = parse_host(args.host or "padic-q:3")
            w = germs_valued_congruence(args.k, as_fraction(args.p0 or "0"), host)
        rep = check_separated(w, depth)
    except (ValueError, TypeError) as e:
        raise UsageError(str(e))
    if args.format == "json":
        out(json.dumps({"witness": w.to_dict(), "depth": depth, "report": rep.to_dict()},
                       sort_keys=True, indent=1))
    else:
        for ax in ("S1", "S2", "S3", "S4"):
            out(f"{ax}: {'pass' if getattr(rep, ax) else 'FAIL'}")
        out(f"sup |delta| = {rep.bound}")
        for d in rep.details[:10]:
            out(f"  {d}")
    return OK if rep.ok else FAILURE


VERBS = {"emit": _emit, "lift": _lift, "eval": _eval, "suite": _suite,
         "classify-chunk": _classify, "germs": _germs}


def main(argv=None) -> int:
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    args = build_parser().parse_args(argv)
    lines: list[str] = []
    try:
        if args.host:
            parse_host(args.host)
        code = VERBS[args.verb](args, lines.append)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE
    text = "\n".join(lines) + ("\n" if lines else "")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
