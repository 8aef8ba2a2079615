"""Separation experiments: run solver configurations over formula grids and
write one CSV row per cell.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .families import FamilySpec, generate
from .oracle import brute_force_eval, random_pcnf
from .solver import UNKNOWN, SolverConfig, SatisfactionUnusable, solve

COLUMNS = ("family", "n", "ord", "clause_dep", "cube", "pre", "pick",
           "verdict", "triples", "literals", "ms", "seed")


@dataclass(frozen=True)
class RandomSpec:
    """A seeded random PCNF as a grid item."""
    seed: int
    max_vars: int = 12
    max_clauses: int = 20

    def formula(self):
        return random_pcnf(self.seed, self.max_vars, self.max_clauses)


@dataclass
class ExperimentRow:
    family: str
    n: int
    ord: str
    clause_dep: str
    cube: str
    pre: str
    pick: str
    verdict: str
    triples: int
    literals: int
    ms: float
    seed: str = ""

    def __post_init__(self):
        if not self.verdict.startswith(UNKNOWN) and self.triples < 1:
            raise ValueError("a decided verdict needs at least one triple")

    @property
    def decided(self) -> bool:
        return not self.verdict.startswith(UNKNOWN)


def pick_label(cfg: SolverConfig) -> str:
    """The pick rule, with non-default chooser settings appended."""
    out = cfg.pick
    if cfg.var_order != "outer":
        out += "/" + cfg.var_order
    if cfg.value != "false":
        out += "/" + cfg.value
    return out


def _formula(item):
    if isinstance(item, RandomSpec):
        f = item.formula()
        return f, "random", f.prefix.nvars, str(item.seed)
    if not isinstance(item, FamilySpec):
        item = FamilySpec.parse(item)
    return generate(item), item.family, item.n, ""


def run_cell(item, cfg: SolverConfig) -> ExperimentRow:
    f, family, n, seed = _formula(item)
    t = time.perf_counter()
    try:
        tr = solve(f, cfg)
        verdict = tr.verdict
        if verdict == UNKNOWN:
            verdict = f"UNKNOWN(limit={cfg.step_limit})"
    except SatisfactionUnusable:
        tr = None
        verdict = "UNKNOWN(nocube-sat)"
    ms = (time.perf_counter() - t) * 1000.0
    return ExperimentRow(family, n, cfg.ord, cfg.clause_dep, cfg.cube, cfg.pre, pick_label(cfg),
                         verdict, len(tr) if tr else 0, tr.literal_count() if tr else 0,
                         round(ms, 3), seed)


def _run(args):
    return run_cell(*args)


def write_rows(rows, fh):
    w = csv.writer(fh)
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([getattr(r, c) for c in COLUMNS])


def read_rows(fh) -> list:
    out = []
    for rec in csv.DictReader(fh):
        kw = dict(rec)
        kw["n"] = int(kw["n"])
        kw["triples"] = int(kw["triples"])
        kw["literals"] = int(kw["literals"])
        kw["ms"] = float(kw["ms"])
        out.append(ExperimentRow(**kw))
    return out


def run_separation_suite(grid, out=None, workers: int = 1) -> list:
    """Run every (formula item, config) cell; write CSV to ``out`` in grid order.

    ``out`` may be a path, an open text file or None.  With workers > 1 the
    cells run in a process pool; rows are still written by this process only.
    """
    grid = list(grid)
    if workers > 1 and len(grid) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_run, grid))
    else:
        rows = [run_cell(item, cfg) for item, cfg in grid]
    if out is not None:
        if isinstance(out, (str, bytes)) or hasattr(out, "__fspath__"):
            with open(out, "w", newline="") as fh:
                write_rows(rows, fh)
        else:
            write_rows(rows, out)
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    write_rows(rows, buf)
    return buf.getvalue()


# standard grids

SOUNDNESS_ORDS = ("lev", "dep:std", "dep:rrs", "any")
SOUNDNESS_CUBES = ("none", "ld", "dep")
SCHEME_NAMES = ("trv", "std", "rrs")


def soundness_cells(step_limit: int = 200, pick: str = "first-new") -> list:
    """The 36 configurations: 4 decision orders x 3 clause schemes x 3 cube policies."""
    return [SolverConfig(ord=o, clause_dep=d, cube=c, pick=pick, step_limit=step_limit)
            for o in SOUNDNESS_ORDS for d in SCHEME_NAMES for c in SOUNDNESS_CUBES]


def std_dep_trap_grid(ns=(2, 3, 4), pick: str = "shortest") -> list:
    """StdDepTrap under LEV-ORD with the standard and the trivial scheme."""
    return [(FamilySpec("std_dep_trap", n), SolverConfig(ord="lev", clause_dep=d, pick=pick))
            for d in ("std", "trv") for n in ns]


def two_php_grid(ns=(2, 3, 4), pick: str = "shortest") -> list:
    """TwoPHPandCT under LEV-ORD versus D-ORD with the reflexive resolution-path scheme."""
    lev = SolverConfig(ord="lev", clause_dep="rrs", pick=pick)
    dord = SolverConfig(ord="dep:rrs", clause_dep="rrs", pick=pick, var_order="inner")
    return [(FamilySpec("two_php_and_ct", n), cfg) for cfg in (lev, dord) for n in ns]


@dataclass
class SweepResult:
    formulas: int
    cells: int
    decided: int
    mismatches: list
    truths: dict

    @property
    def ok(self) -> bool:
        return not self.mismatches


def soundness_sweep(seeds, cells=None, max_vars: int = 12, max_clauses: int = 20) -> SweepResult:
    """Compare every decided verdict with brute_force_eval on random PCNFs."""
    cells = soundness_cells() if cells is None else cells
    mismatches = []
    decided = 0
    truths = {"TRUE": 0, "FALSE": 0}
    seeds = list(seeds)
    for seed in seeds:
        spec = RandomSpec(seed, max_vars, max_clauses)
        truth = brute_force_eval(spec.formula())
        truths[truth] += 1
        for cfg in cells:
            row = run_cell(spec, cfg)
            if row.decided:
                decided += 1
                if row.verdict != truth:
                    mismatches.append((seed, cfg, row.verdict, truth))
    return SweepResult(len(seeds), len(seeds) * len(cells), decided, mismatches, truths)

