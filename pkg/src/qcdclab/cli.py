"""Command-line entry point: ``qcdclab <subcommand> ...``.

Exit codes: 0 ok / Valid, 1 Invalid or verdict mismatch, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .core import parse_qdimacs, write_qdimacs
from .deps import SCHEMES, compute
from .families import FAMILIES, FamilySpec, generate

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load(args):
    if getattr(args, "gen", None):
        try:
            return generate(FamilySpec.parse(args.gen))
        except ValueError as e:
            raise UsageError(str(e)) from None
    if not getattr(args, "input", None):
        raise UsageError("give a QDIMACS file or --gen <family>:<n>")
    with open(args.input) as fh:
        return parse_qdimacs(fh.read())


def _add_input(p):
    p.add_argument("input", nargs="?", help="QDIMACS file")
    p.add_argument("--gen", metavar="FAMILY:N", help=f"generated formula, one of {', '.join(FAMILIES)}")


def _add_config(p):
    from .solver import ORDS
    p.add_argument("--ord", default="lev", choices=ORDS)
    p.add_argument("--clause-dep", default="trv", choices=SCHEMES)
    p.add_argument("--cube", default="none", choices=("none", "ld", "dep"))
    p.add_argument("--pre", default="none", choices=("none",) + SCHEMES)
    p.add_argument("--pick", default="first-new", choices=("last", "first-new", "shortest"))
    p.add_argument("--value", default="false", choices=("false", "true"))
    p.add_argument("--var-order", default="outer", choices=("outer", "inner"))
    p.add_argument("--limit", type=int, default=10 ** 6, help="maximum number of trails")


def _config(args, **over):
    from .solver import SolverConfig
    kw = dict(ord=args.ord, clause_dep=args.clause_dep, cube=args.cube, pre=args.pre,
              pick=args.pick, value=args.value, var_order=args.var_order, step_limit=args.limit)
    kw.update(over)
    return SolverConfig(**kw)


def _read_script(path):
    """(config line or None, steps) from a JSON list or {config, script} object."""
    from .solver import ScriptStep
    with open(path) as fh:
        data = json.load(fh)
    line = None
    if isinstance(data, dict):
        line = data.get("config")
        data = data.get("script", [])
    return line, [ScriptStep.from_obj(x) for x in data]


def cmd_solve(args):
    from .solver import (SatisfactionUnusable, ScriptError, SolverConfig,
                         replay_script, solve, write_trace)
    from .trail import PolicyViolation
    from .validate import validate_trace
    f = _load(args)
    try:
        if args.script:
            line, steps = _read_script(args.script)
            if line:
                cfg = SolverConfig.from_line(line)
            else:
                cfg = _config(args, pick="scripted")
            tr = replay_script(f, cfg, steps)
        else:
            cfg = _config(args)
            tr = solve(f, cfg)
    except SatisfactionUnusable as e:
        print(f"s UNKNOWN ({e})")
        return FAIL if args.expect else OK
    except (ScriptError, PolicyViolation) as e:
        print(f"script error: {e}", file=sys.stderr)
        return FAIL
    print(f"s {tr.verdict} triples={len(tr)} literals={tr.literal_count()}")
    if args.trace_out:
        with open(args.trace_out, "w") as fh:
            fh.write(write_trace(tr))
    if args.validate:
        res = validate_trace(f, cfg, tr)
        print("Valid" if res else f"Invalid {res}")
        if not res:
            return FAIL
    if args.expect and tr.verdict != args.expect:
        return FAIL
    return OK


def cmd_check(args):
    from .solver import SolverConfig, read_trace
    from .validate import validate_trace
    f = _load(args)
    with open(args.trace) as fh:
        tr = read_trace(fh.read())
    cfg = tr.config
    if args.config:
        cfg = SolverConfig.from_line(args.config)
    res = validate_trace(f, cfg, tr)
    if res:
        print(f"Valid {tr.verdict} triples={len(tr)}")
        return OK
    step = f" entry/step {res.step}" if res.step is not None else ""
    print(f"Invalid triple {res.where}{step}: {res.code}: {res.reason}")
    return FAIL


def cmd_deps(args):
    f = _load(args)
    if args.pre:
        from .deps import preprocess
        f = preprocess(f, compute(args.pre, f))
    d = compute(args.scheme, f)
    if args.universal:
        for x, y in sorted(d.universal_pairs()):
            print(f"d {x} {y}")
    else:
        sys.stdout.write(d.dump())
    return OK


def cmd_gen(args):
    spec = args.spec or args.gen
    if not spec:
        raise UsageError("give <family>:<n>")
    try:
        f = generate(FamilySpec.parse(spec))
    except ValueError as e:
        raise UsageError(str(e)) from None
    text = write_qdimacs(f)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_gauge(args):
    from .oracle import GaugeError, compute_gauge
    f = _load(args)
    try:
        g = compute_gauge(f, args.budget)
    except GaugeError as e:
        print(f"gauge error: {e}", file=sys.stderr)
        return FAIL
    print(g)
    if args.expect is not None and g != args.expect:
        return FAIL
    return OK


def cmd_oracle(args):
    from .oracle import OracleLimit, brute_force_eval, random_pcnf
    if args.random is not None:
        f = random_pcnf(args.random)
    else:
        f = _load(args)
    try:
        v = brute_force_eval(f, args.max_vars)
    except OracleLimit as e:
        print(f"oracle error: {e}", file=sys.stderr)
        return FAIL
    print(v)
    if args.compare:
        from .solver import UNKNOWN, solve_or_unknown
        tr = solve_or_unknown(f, _config(args))
        print(f"solver {tr.verdict}")
        if tr.verdict not in (UNKNOWN, v):
            return FAIL
    if args.expect and v != args.expect:
        return FAIL
    return OK


def cmd_suite(args):
    from . import experiments as ex
    grid = []
    ns = [int(x) for x in args.ns.split(",")] if args.ns else None
    for name in args.grid:
        if name == "std_dep_trap":
            grid += ex.std_dep_trap_grid(ns or (2, 3, 4))
        elif name == "two_php":
            grid += ex.two_php_grid(ns or (2, 3, 4))
        elif name == "soundness":
            cells = ex.soundness_cells(step_limit=args.limit)
            grid += [(ex.RandomSpec(s), c) for s in range(args.seeds) for c in cells]
        else:
            raise UsageError(f"unknown grid {name!r}")
    out = args.out if args.out else sys.stdout
    rows = ex.run_separation_suite(grid, out, workers=args.workers)
    if args.out:
        print(f"{len(rows)} rows written to {args.out}")
    return OK


def cmd_corpus(args):
    from .corpus import refutation_corpus
    from .solver import write_trace
    sizes = [int(x) for x in args.dle.split(",")] if args.dle else (2, 3, 4)
    entries = refutation_corpus(args.n, sizes)
    status = OK
    if args.write:
        os.makedirs(args.write, exist_ok=True)
    for e in entries:
        try:
            ok, msg = e.check()
        except Exception as err:
            ok, msg = False, f"{e.name}: {err}"
        print(("ok   " if ok else "FAIL ") + msg)
        if not ok:
            status = FAIL
        if args.write:
            stem = os.path.join(args.write, e.name.replace(":", "_").replace("/", "_"))
            with open(stem + ".qdimacs", "w") as fh:
                fh.write(write_qdimacs(e.formula()))
            with open(stem + ".script.json", "w") as fh:
                json.dump({"config": e.config.to_line(),
                           "script": [{"trail": s.trail, "learn": s.learn} for s in e.script]},
                          fh, indent=1)
            if ok:
                with open(stem + ".trace", "w") as fh:
                    fh.write(write_trace(e.replay()))
    return status


def build_parser():
    ap = argparse.ArgumentParser(prog="qcdclab", description="QCDCL with dependency schemes")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("solve", help="run the solver or replay a script")
    _add_input(p)
    _add_config(p)
    p.add_argument("--script", help="JSON script; a stored config line overrides the flags")
    p.add_argument("--trace-out", help="write the derivation trace here")
    p.add_argument("--validate", action="store_true", help="re-check the trace independently")
    p.add_argument("--expect", choices=("TRUE", "FALSE", "UNKNOWN"))
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="validate a trace file")
    _add_input(p)
    p.add_argument("--trace", required=True)
    p.add_argument("--config", help="override the trace's config line")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("deps", help="print a dependency relation")
    _add_input(p)
    p.add_argument("--scheme", default="std", choices=SCHEMES)
    p.add_argument("--pre", choices=SCHEMES, help="preprocess with this scheme first")
    p.add_argument("--universal", action="store_true", help="only pairs with a universal left side")
    p.set_defaults(func=cmd_deps)

    p = sub.add_parser("gen", help="write a generated formula as QDIMACS")
    p.add_argument("spec", nargs="?", metavar="FAMILY:N")
    p.add_argument("--gen", metavar="FAMILY:N")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("gauge", help="gauge of an exists-forall-exists formula")
    _add_input(p)
    p.add_argument("--budget", type=int, default=200000)
    p.add_argument("--expect", type=int)
    p.set_defaults(func=cmd_gauge)

    p = sub.add_parser("oracle", help="brute-force evaluation")
    _add_input(p)
    _add_config(p)
    p.add_argument("--random", type=int, metavar="SEED", help="use a seeded random PCNF")
    p.add_argument("--max-vars", type=int, default=40)
    p.add_argument("--compare", action="store_true", help="also solve and compare verdicts")
    p.add_argument("--expect", choices=("TRUE", "FALSE"))
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("suite", help="run experiment grids to CSV")
    p.add_argument("--grid", nargs="+", default=["std_dep_trap", "two_php"],
                   help="std_dep_trap, two_php, soundness")
    p.add_argument("--ns", help="comma-separated sizes for the family grids")
    p.add_argument("--seeds", type=int, default=50, help="random formulas for the soundness grid")
    p.add_argument("--limit", type=int, default=200, help="trail limit for the soundness grid")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("corpus", help="replay and validate the scripted refutations")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--dle", help="comma-separated DoubleLongEq sizes")
    p.add_argument("--write", metavar="DIR", help="also write formulas, scripts and traces")
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"qcdclab: {e}", file=sys.stderr)
        return USAGE
    except (ValueError, OSError) as e:
        print(f"qcdclab: {e}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
