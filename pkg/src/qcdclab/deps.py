"""Dependency schemes D^trv, D^std, D^rrs and dependency-aware reduction.

A pair ``(x, y)`` in a relation means that ``y`` may depend on ``x``; every
pair has ``y`` quantified after ``x`` and with the other quantifier.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property

from .core import PCNF, Constraint, Prefix

SCHEMES = ("trv", "std", "rrs")


@dataclass(frozen=True)
class DepRelation:
    scheme: str
    pairs: frozenset
    prefix: Prefix = field(compare=False, repr=False)

    @cached_property
    def dependents(self) -> dict:
        """x -> set of y with (x, y) in the relation."""
        out = defaultdict(set)
        for x, y in self.pairs:
            out[x].add(y)
        return dict(out)

    @cached_property
    def supporters(self) -> dict:
        """y -> set of x with (x, y) in the relation."""
        out = defaultdict(set)
        for x, y in self.pairs:
            out[y].add(x)
        return dict(out)

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __len__(self):
        return len(self.pairs)

    def universal_pairs(self) -> frozenset:
        """Pairs whose left end is universal (the usual printed form)."""
        return frozenset(p for p in self.pairs if self.prefix.is_forall(p[0]))

    def dump(self) -> str:
        return "".join(f"d {x} {y}\n" for x, y in sorted(self.pairs))

    def check(self) -> None:
        """Assert that all pairs lie inside D^trv of the carried prefix."""
        pos, quant = self.prefix.position, self.prefix.quant
        for x, y in self.pairs:
            if not (pos[x] < pos[y] and quant[x] != quant[y]):
                raise ValueError(f"pair {(x, y)} outside the trivial scheme")


def trv_pairs(p: Prefix) -> frozenset:
    order = p.order
    out = set()
    for i, (x, qx) in enumerate(order):
        for y, qy in order[i + 1:]:
            if qx != qy:
                out.add((x, y))
    return frozenset(out)


def compute_dtrv(f: PCNF) -> DepRelation:
    return DepRelation("trv", trv_pairs(f.prefix), f.prefix)


def _occurrences(f: PCNF):
    by_var = defaultdict(list)
    by_lit = defaultdict(list)
    for i, c in enumerate(f.matrix):
        for l in c.lits:
            by_var[abs(l)].append(i)
            by_lit[l].append(i)
    return by_var, by_lit


def compute_dstd(f: PCNF) -> DepRelation:
    """Standard scheme: clause paths through existentials right of x."""
    p = f.prefix
    pos, quant = p.position, p.quant
    by_var, _ = _occurrences(f)
    clauses = [c.vars for c in f.matrix]
    out = set()
    for x in by_var:
        px = pos[x]
        seen = set(by_var[x])
        queue = list(seen)
        used = set()
        reached = set()
        while queue:
            ci = queue.pop()
            for v in clauses[ci]:
                reached.add(v)
                if quant[v] == "e" and pos[v] > px and v not in used:
                    used.add(v)
                    for cj in by_var[v]:
                        if cj not in seen:
                            seen.add(cj)
                            queue.append(cj)
        for y in reached:
            if pos[y] > px and quant[y] != quant[x]:
                out.add((x, y))
    return DepRelation("std", frozenset(out), p)


def _rrs_reach(f: PCNF, by_lit, start: int) -> set:
    """Literals at the end of a resolution path that begins with ``start``."""
    p = f.prefix
    pos, quant = p.position, p.quant
    px = pos[abs(start)]
    seen = {start}
    entries = [start]
    reach = set()
    while entries:
        e = entries.pop()
        for ci in by_lit.get(e, ()):
            for g in f.matrix[ci].lits:
                if abs(g) == abs(e):
                    continue
                reach.add(g)
                v = abs(g)
                if quant[v] == "e" and pos[v] > px and -g not in seen:
                    seen.add(-g)
                    entries.append(-g)
    return reach


def compute_drrs(f: PCNF) -> DepRelation:
    """Reflexive resolution-path scheme."""
    p = f.prefix
    pos, quant = p.position, p.quant
    by_var, by_lit = _occurrences(f)
    out = set()
    for x in by_var:
        pos_reach = _rrs_reach(f, by_lit, x)
        neg_reach = _rrs_reach(f, by_lit, -x)
        for g in pos_reach:
            y = abs(g)
            if pos[y] <= pos[x] or quant[y] == quant[x]:
                continue
            # (x, g) and (-x, -g) both connected
            if -g in neg_reach:
                out.add((x, y))
    return DepRelation("rrs", frozenset(out), p)


def compute(scheme: str, f: PCNF) -> DepRelation:
    try:
        fn = {"trv": compute_dtrv, "std": compute_dstd, "rrs": compute_drrs}[scheme]
    except KeyError:
        raise ValueError(f"unknown dependency scheme {scheme!r}") from None
    return fn(f)


def unblocked_universals(c: Constraint, d: DepRelation, prefix: Prefix | None = None) -> list:
    """Universal variables of clause c that red-D may delete."""
    p = prefix or d.prefix
    ex = [v for v in c.vars if p.is_exists(v)]
    dep = d.dependents
    out = []
    for u in c.vars:
        if p.is_forall(u):
            du = dep.get(u, ())
            if not any(e in du for e in ex):
                out.append(u)
    return out


def unblocked_existentials(c: Constraint, d: DepRelation, prefix: Prefix | None = None) -> list:
    """Existential variables of cube c that red-D-exists may delete."""
    p = prefix or d.prefix
    un = [v for v in c.vars if p.is_forall(v)]
    dep = d.dependents
    out = []
    for e in c.vars:
        if p.is_exists(e):
            de = dep.get(e, ())
            if not any(u in de for u in un):
                out.append(e)
    return out


def reduce_clause(c: Constraint, d: DepRelation, prefix: Prefix | None = None) -> Constraint:
    drop = set(unblocked_universals(c, d, prefix))
    if not drop:
        return c
    return c.with_lits(l for l in c.lits if abs(l) not in drop)


def reduce_cube(c: Constraint, d: DepRelation, prefix: Prefix | None = None) -> Constraint:
    drop = set(unblocked_existentials(c, d, prefix))
    if not drop:
        return c
    return c.with_lits(l for l in c.lits if abs(l) not in drop)


def reduce(c: Constraint, d: DepRelation, prefix: Prefix | None = None) -> Constraint:
    if c.is_clause:
        return reduce_clause(c, d, prefix)
    return reduce_cube(c, d, prefix)


def preprocess(f: PCNF, d: DepRelation) -> PCNF:
    return PCNF(f.prefix, tuple(reduce_clause(c, d, f.prefix) for c in f.matrix))
