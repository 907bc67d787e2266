"""Command-line entry point: ``distlab <verb> ...``.

Exit codes: 0 success, 1 usage or parse error, 2 a check or table row failed.
"""

from __future__ import annotations

import argparse
import itertools
import json
import sys
from pathlib import Path

from distlab import relcore as rc
from distlab.autgroup import CapacityError, automorphisms, format_perm, orbits
from distlab.catalog import FamilySpec, make
from distlab.disting import distinguishing_number, rigidity_census
from distlab.fixtype import Budgets, TypePair, check_fixing_type, construct_partition, verify_trace
from distlab.suite import default_seed, acceptance_table

OK, USAGE, FAILED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _ints(text: str) -> list[int]:
    text = text.replace(",", " ").strip()
    try:
        return [int(x) for x in text.split()]
    except ValueError:
        raise UsageError(f"expected a list of integers, got {text!r}") from None


def _load(path: str) -> rc.Structure:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return rc.parse(text)


def _emit(args, record: dict, lines: list[str]):
    if getattr(args, "json", False):
        print(json.dumps(record, indent=2, sort_keys=True))
    else:
        print("\n".join(lines))


def cmd_dist(args) -> int:
    s = _load(args.file)
    res = distinguishing_number(s, args.max_colors)
    record = res.as_dict(s.name)
    if res.exceeded:
        lines = [f"D > {res.max_k}"]
    else:
        lines = [f"D = {res.k}", str(res.witness)]
    _emit(args, record, lines)
    return OK


def cmd_aut(args) -> int:
    s = _load(args.file)
    g = automorphisms(s)
    gens = [list(p) for p in g.generators]
    orbs = orbits(g)
    record = {"structure": s.name, "order": g.order, "generators": gens, "orbits": orbs}
    if args.order:
        lines = [str(g.order)]
    elif args.gens:
        lines = [format_perm(p) for p in g.generators]
    elif args.orbits:
        lines = [" ".join(map(str, o)) for o in orbs]
    else:
        lines = [g.report()]
    _emit(args, record, lines)
    return OK


def _param(token: str):
    return int(token) if token.lstrip("-").isdigit() else token


def cmd_catalog(args) -> int:
    spec = FamilySpec(args.family, tuple(_param(p) for p in args.params),
                      seed=default_seed() if args.seed is None else args.seed,
                      level=args.level, cap=args.cap)
    s, cert = make(spec)
    text = rc.serialize(s)
    if args.output:
        Path(args.output).write_text(text)
    elif not args.json:
        sys.stdout.write(text)
    record = {"family": spec.family, "n": s.n, "certificate": None}
    lines = []
    if cert is not None:
        record["certificate"] = {"requested": cert.requested, "level": cert.level_achieved,
                                 "missing": len(cert.missing)}
        lines.append(cert.summary())
        if args.verbose:
            lines.extend(f"  base {list(base)}: {desc}" for base, desc in cert.missing)
    if args.json:
        record["structure"] = text
    if lines or args.json:
        _emit(args, record, lines)
    return OK if cert is None or cert.ok else FAILED


def auto_t(s: rc.Structure, f: set[int]) -> set[int]:
    """Points ``b`` that close every ordered choice of ``r - 1`` points of ``F`` into a tuple of the first relation."""
    arity = s.sig.arities[0]
    rel = s.rels[0]
    if arity - 1 > len(f):
        return set()
    heads = list(itertools.permutations(sorted(f), arity - 1))
    return {b for b in range(s.n) if b not in f and all(h + (b,) in rel for h in heads)}


def cmd_fixing(args) -> int:
    s = _load(args.file)
    f = set(_ints(args.f))
    t = auto_t(s, f) if args.t == "auto" else set(_ints(args.t))
    if not t:
        raise UsageError("T is empty")
    a0 = _ints(args.a0) if args.a0 else None
    tp = TypePair.of(s, f, t, a0)
    if args.mode == "check":
        report = check_fixing_type(s, tp, Budgets(h_size=args.hsize, tau=args.tau))
        record = {"f": sorted(tp.f), "t": sorted(tp.t), "kind": tp.kind, **report.as_dict()}
        _emit(args, record, [f"F = {sorted(tp.f)} T = {sorted(tp.t)} kind = {tp.kind}"] + report.lines())
        return OK if report.passed() else FAILED
    part, trace = construct_partition(s, tp, args.imax)
    bad = verify_trace(s, tp, trace)
    record = {"partition": list(part.blocks), "sizes": trace.sizes(), "outcome": trace.outcome,
              "stabilizer_order": trace.stabilizer_order, "violations": bad}
    lines = [str(part), f"|S_i| = {trace.sizes()}", trace.outcome,
             f"stabilizer order {trace.stabilizer_order}"] + [f"violation: {b}" for b in bad]
    _emit(args, record, lines)
    return FAILED if bad else OK


def cmd_table(args) -> int:
    rows = acceptance_table(args.seed)
    if args.json:
        print(json.dumps([r.as_dict() for r in rows], indent=2, sort_keys=True))
    else:
        for r in rows:
            print(r.line())
            if args.verbose:
                for c in r.checks:
                    print(f"     {c}")
    return OK if all(r.ok for r in rows) else FAILED


def cmd_census(args) -> int:
    counts = rigidity_census(args.max_n)
    _emit(args, {str(n): c for n, c in counts.items()}, [f"n={n}: {c} rigid" for n, c in counts.items()])
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="distlab", description="Distinguishing numbers of finite relational structures.")
    sub = p.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    d = sub.add_parser("dist", help="exact distinguishing number")
    d.add_argument("file")
    d.add_argument("--max-colors", type=int, default=None)
    d.add_argument("--json", action="store_true")
    d.set_defaults(run=cmd_dist)

    a = sub.add_parser("aut", help="automorphism group")
    a.add_argument("file")
    which = a.add_mutually_exclusive_group()
    which.add_argument("--order", action="store_true")
    which.add_argument("--gens", action="store_true")
    which.add_argument("--orbits", action="store_true")
    a.add_argument("--json", action="store_true")
    a.set_defaults(run=cmd_aut)

    c = sub.add_parser("catalog", help="generate a family member or finite stage")
    c.add_argument("family")
    c.add_argument("params", nargs="*")
    c.add_argument("--seed", type=int, default=None)
    c.add_argument("--level", type=int, default=2)
    c.add_argument("--cap", type=int, default=40)
    c.add_argument("-o", "--output")
    c.add_argument("--verbose", action="store_true")
    c.add_argument("--json", action="store_true")
    c.set_defaults(run=cmd_catalog)

    f = sub.add_parser("fixing", help="check a fixing type or run the partition construction")
    f.add_argument("file")
    f.add_argument("--f", required=True)
    f.add_argument("--t", default="auto")
    f.add_argument("--a0")
    f.add_argument("--mode", choices=("check", "construct"), default="check")
    f.add_argument("--imax", type=int, default=3)
    f.add_argument("--hsize", type=int, default=1)
    f.add_argument("--tau", type=int, default=1)
    f.add_argument("--json", action="store_true")
    f.set_defaults(run=cmd_fixing)

    t = sub.add_parser("table", help="run the acceptance table")
    t.add_argument("--seed", type=int, default=None)
    t.add_argument("--verbose", action="store_true")
    t.add_argument("--json", action="store_true")
    t.set_defaults(run=cmd_table)

    n = sub.add_parser("census", help="count rigid labelled graphs")
    n.add_argument("--max-n", type=int, required=True)
    n.add_argument("--json", action="store_true")
    n.set_defaults(run=cmd_census)
    return p


def run(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.run(args)
    except UsageError as exc:
        print(f"distlab: {exc}", file=sys.stderr)
        return USAGE
    except (rc.StructureError, ValueError) as exc:
        print(f"distlab: {exc}", file=sys.stderr)
        return USAGE
    except CapacityError as exc:
        print(f"distlab: {exc}", file=sys.stderr)
        return FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
