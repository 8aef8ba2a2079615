"""Learnable constraints of a finished trail.

Conflict analysis walks the trail right to left: starting from the reduced
antecedent of the conflict, each propagated literal whose complement occurs in
the current constraint is resolved away with its (reduced) antecedent.  Every
intermediate constraint is learnable.  Satisfying trails yield reduced cubes
of trail subsets that satisfy all clauses.
"""

from __future__ import annotations

from dataclasses import dataclass

from .calculus import (CLAUSE_SIDE, LD, PLAIN, TERM_SIDE, Axiom, Derivation,
                       Reduce, Resolve, RuleError, RuleMode, reduce_step,
                       resolve)
from .core import Constraint
from .deps import unblocked_existentials, unblocked_universals
from .trail import CUBE_DEP, CUBE_LD, NOCUBE, FormulaState, Outcome, Trail


class LearningError(RuntimeError):
    pass


@dataclass(frozen=True)
class Learnable:
    constraint: Constraint
    derivation: Derivation


def clause_mode(s: FormulaState) -> RuleMode:
    return RuleMode(LD, CLAUSE_SIDE, s.clause_dep)


def cube_mode(s: FormulaState) -> RuleMode:
    if s.cube_policy == CUBE_LD:
        return RuleMode(LD, TERM_SIDE, s.cube_dep)
    if s.cube_policy == CUBE_DEP:
        return RuleMode(PLAIN, TERM_SIDE, s.cube_dep)
    raise LearningError("no cube policy")


class _Builder:
    def __init__(self, mode: RuleMode):
        self.mode = mode
        self.steps = []
        self.values = []

    def _push(self, step, value):
        self.steps.append(step)
        self.values.append(value)
        return len(self.steps)

    def axiom(self, c):
        return self._push(Axiom(c), c)

    def reduced(self, i):
        """Apply all reductions to step i, innermost variable first."""
        c = self.values[i - 1]
        p = self.mode.prefix
        if self.mode.side == CLAUSE_SIDE:
            drop = unblocked_universals(c, self.mode.dep)
        else:
            drop = unblocked_existentials(c, self.mode.dep)
        for v in sorted(drop, key=p.position.get, reverse=True):
            c = reduce_step(c, v, self.mode)
            i = self._push(Reduce(i, v), c)
        return i

    def resolve(self, i, j, pivot):
        c = resolve(self.values[i - 1], self.values[j - 1], pivot, self.mode)
        return self._push(Resolve(i, j, pivot), c)

    def value(self, i):
        return self.values[i - 1]

    def derivation(self, upto):
        return Derivation(tuple(self.steps[:upto]))

    def mark(self):
        return len(self.steps)

    def rollback(self, k):
        del self.steps[k:]
        del self.values[k:]


def _dedup(items):
    seen = set()
    out = []
    for it in items:
        if it.constraint not in seen:
            seen.add(it.constraint)
            out.append(it)
    return out


def learn_from_clause_conflict(s: FormulaState, t: Trail) -> list:
    if t.outcome != Outcome.CLAUSE_CONFLICT:
        raise LearningError("trail does not end in a clause conflict")
    b = _Builder(clause_mode(s))
    prefix = s.prefix
    cur = b.reduced(b.axiom(s.get(t.conflict_ante)))
    items = [Learnable(b.value(cur), b.derivation(cur))]
    for e in reversed(t.entries[:-1]):
        if e.decision or not prefix.is_exists(abs(e.lit)):
            continue
        if -e.lit not in b.value(cur).lits:
            continue
        ante = b.reduced(b.axiom(s.get(e.ante)))
        try:
            cur = b.reduced(b.resolve(cur, ante, abs(e.lit)))
        except RuleError as err:
            raise LearningError(f"resolution on {abs(e.lit)} failed: {err}") from None
        c = b.value(cur)
        if any(prefix.is_exists(v) for v in c.merged):
            raise LearningError(f"existential merge in learnt clause {c}")
        items.append(Learnable(c, b.derivation(cur)))
    return _dedup(items)


def learn_from_cube_conflict(s: FormulaState, t: Trail) -> list:
    if t.outcome != Outcome.CUBE_CONFLICT:
        raise LearningError("trail does not end in a cube conflict")
    if s.cube_policy == NOCUBE:
        raise LearningError("cube conflict under NoCube")
    b = _Builder(cube_mode(s))
    prefix = s.prefix
    strict = s.cube_policy == CUBE_LD
    cur = b.reduced(b.axiom(s.get(t.conflict_ante)))
    items = [Learnable(b.value(cur), b.derivation(cur))]
    for e in reversed(t.entries[:-1]):
        if e.decision or not prefix.is_forall(abs(e.lit)):
            continue
        if e.lit not in b.value(cur).lits:
            continue
        mark = b.mark()
        ante = b.reduced(b.axiom(s.get(e.ante)))
        try:
            nxt = b.reduced(b.resolve(cur, ante, abs(e.lit)))
        except RuleError as err:
            if strict:
                raise LearningError(f"resolution on {abs(e.lit)} failed: {err}") from None
            b.rollback(mark)
            continue
        cur = nxt
        items.append(Learnable(b.value(cur), b.derivation(cur)))
    return _dedup(items)


def _cover(lits, clauses, order):
    """Greedy clause cover using literals in preference order, then minimise."""
    rank = {l: k for k, l in enumerate(order)}
    chosen = set()
    for c in clauses:
        if satisfies_set(chosen, c):
            continue
        best = None
        for l in c.lits:
            if l in lits and abs(l) not in c.merged and (best is None or rank[l] < rank[best]):
                best = l
        if best is None:
            return None
        chosen.add(best)
    for l in sorted(chosen, key=rank.get, reverse=True):
        rest = chosen - {l}
        if all(satisfies_set(rest, c) for c in clauses):
            chosen = rest
    return chosen


def satisfies_set(lits, c: Constraint) -> bool:
    merged = c.merged
    return any(l in lits and abs(l) not in merged for l in c.lits)


def default_subsets(s: FormulaState, t: Trail) -> list:
    """Candidate T' sets: greedy minimal covers for three literal orders, then T."""
    lits = t.literals()
    p = s.prefix
    clauses = list(s.base.matrix) + s.learnt_clauses
    orders = [
        sorted(lits, key=lambda l: (p.is_forall(abs(l)), -p.position[abs(l)])),
        list(reversed(lits)),
        list(lits),
    ]
    out = []
    litset = set(lits)
    for order in orders:
        cov = _cover(litset, clauses, order)
        if cov is not None:
            out.append(sorted(cov, key=lambda l: p.position[abs(l)]))
    out.append(lits)
    return out


def learn_from_satisfaction(s: FormulaState, t: Trail, subsets=None) -> list:
    if t.outcome != Outcome.SATISFIED:
        raise LearningError("trail is not totally satisfying")
    if s.cube_policy == NOCUBE:
        raise LearningError("satisfaction learning needs a cube policy")
    if subsets is None:
        subsets = default_subsets(s, t)
    clauses = list(s.base.matrix) + s.learnt_clauses
    trail_lits = set(t.literals())
    items = []
    for sub in subsets:
        sub = set(sub)
        if not sub <= trail_lits:
            raise LearningError(f"{sorted(sub - trail_lits)} not on the trail")
        if not all(satisfies_set(sub, c) for c in clauses):
            raise LearningError("subset does not satisfy every clause")
        b = _Builder(cube_mode(s))
        i = b.reduced(b.axiom(Constraint.cube(sub)))
        items.append(Learnable(b.value(i), b.derivation(i)))
    return _dedup(items)


def satisfaction_witness(s: FormulaState, t: Trail, cube: Constraint):
    """A subset T' of the trail whose reduction is ``cube``, or None.

    The largest candidate adds every existential trail literal that the
    universals of ``cube`` do not block; satisfaction is monotone, so it is
    enough to test that one.
    """
    p = s.prefix
    dep = s.cube_dep.dependents
    lits = set(t.literals())
    if not cube.lits <= lits:
        return None
    univ = {abs(l) for l in cube.lits if p.is_forall(abs(l))}
    for l in cube.lits:
        v = abs(l)
        if p.is_exists(v) and not (dep.get(v, set()) & univ):
            return None
    sub = set(cube.lits)
    for l in lits:
        v = abs(l)
        if p.is_exists(v) and not (dep.get(v, set()) & univ):
            sub.add(l)
    clauses = list(s.base.matrix) + s.learnt_clauses
    if all(satisfies_set(sub, c) for c in clauses):
        return sorted(sub, key=lambda l: p.position[abs(l)])
    return None


def learnable(s: FormulaState, t: Trail) -> list:
    if t.outcome == Outcome.CLAUSE_CONFLICT:
        return learn_from_clause_conflict(s, t)
    if t.outcome == Outcome.CUBE_CONFLICT:
        return learn_from_cube_conflict(s, t)
    if t.outcome == Outcome.SATISFIED:
        return learn_from_satisfaction(s, t)
    raise LearningError("trail has no outcome")
