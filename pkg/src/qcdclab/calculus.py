"""Resolution and reduction rules, derivations and a derivation checker.

The same functions serve Q(D)-Res / LDQ(D)-Res on clauses and Q(D)-TermRes /
LDQ-TermRes on cubes; a RuleMode picks the flavour, side and scheme.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Union

from .core import PCNF, Constraint, Prefix, QBFError, parse_constraint
from .deps import DepRelation

PLAIN = "plain"
LD = "ld"
CLAUSE_SIDE = "clause"
TERM_SIDE = "term"


class RuleError(ValueError):
    """A rule application that the calculus does not allow."""

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


@dataclass(frozen=True)
class RuleMode:
    flavor: str
    side: str
    dep: DepRelation

    def __post_init__(self):
        if self.flavor not in (PLAIN, LD) or self.side not in (CLAUSE_SIDE, TERM_SIDE):
            raise ValueError(f"bad rule mode {self.flavor}/{self.side}")
        if self.side == TERM_SIDE and self.flavor == LD and self.dep.scheme != "trv":
            raise ValueError("long-distance term resolution needs the trivial scheme")

    @property
    def prefix(self) -> Prefix:
        return self.dep.prefix


def _orient(a, b, pivot):
    if pivot in a.lits and -pivot not in a.lits and -pivot in b.lits and pivot not in b.lits:
        return a, b
    if -pivot in a.lits and pivot not in a.lits and pivot in b.lits and -pivot not in b.lits:
        return b, a
    for c in (a, b):
        if pivot in c.lits and -pivot in c.lits:
            raise RuleError("pivot-merged", f"pivot {pivot} is merged in {c}")
    raise RuleError("pivot-not-present", f"pivot {pivot} not in opposite polarities of {a} and {b}")


def _resolve(a, b, pivot, mode, own, other):
    """Shared body; ``own`` is the pivot quantifier, ``other`` the opposite one."""
    p = mode.prefix
    if pivot not in p.quant:
        raise RuleError("pivot-not-present", f"unknown variable {pivot}")
    if p.quant[pivot] != own:
        raise RuleError("pivot-quantifier", f"pivot {pivot} has the wrong quantifier")
    kind = "clause" if mode.side == CLAUSE_SIDE else "cube"
    for c in (a, b):
        if c.kind != kind:
            raise RuleError("wrong-kind", f"{c} is not a {kind}")
    a, b = _orient(a, b, pivot)
    lits = (a.lits | b.lits) - {pivot, -pivot}
    res = Constraint(kind, lits)
    merged = res.merged
    if not merged:
        return res
    if mode.flavor == PLAIN:
        v = min(merged)
        raise RuleError("tautology" if kind == "clause" else "contradiction",
                        f"plain resolvent merges {v}")
    for v in sorted(merged):
        if p.quant[v] == own:
            code = "existential-tautology" if own == "e" else "universal-contradiction"
            raise RuleError(code, f"resolvent merges {v}")
    dep = mode.dep
    for v in sorted(merged):
        if v in a.vars and v in b.vars and (v, pivot) in dep:
            code = "blocked-universal-merge" if own == "e" else "blocked-existential-merge"
            raise RuleError(code, f"merge of {v} blocked by dependency pair ({v}, {pivot})")
    return res


def resolve_clauses(a: Constraint, b: Constraint, pivot: int, mode: RuleMode) -> Constraint:
    return _resolve(a, b, pivot, mode, "e", "a")


def resolve_cubes(a: Constraint, b: Constraint, pivot: int, mode: RuleMode) -> Constraint:
    return _resolve(a, b, pivot, mode, "a", "e")


def resolve(a, b, pivot, mode):
    if mode.side == CLAUSE_SIDE:
        return resolve_clauses(a, b, pivot, mode)
    return resolve_cubes(a, b, pivot, mode)


def reduce_step(c: Constraint, var: int, mode: RuleMode) -> Constraint:
    """Delete one variable (all its occurrences) by red-D or red-D-exists."""
    p = mode.prefix
    if var not in c.vars:
        raise RuleError("not-reducible", f"{var} does not occur in {c}")
    dep = mode.dep.dependents.get(var, ())
    if mode.side == CLAUSE_SIDE:
        if not p.is_forall(var):
            raise RuleError("not-reducible", f"{var} is not universal")
        blockers = [v for v in c.vars if p.is_exists(v) and v in dep]
    else:
        if not p.is_exists(var):
            raise RuleError("not-reducible", f"{var} is not existential")
        blockers = [v for v in c.vars if p.is_forall(v) and v in dep]
    if blockers:
        b = min(blockers)
        raise RuleError("not-reducible", f"{var} is blocked by {b} via pair ({var}, {b})")
    return c.with_lits(l for l in c.lits if abs(l) != var)


def satisfies(t: Constraint, c: Constraint) -> bool:
    """Does the cube t contain a literal of clause c?  Merged literals never count."""
    merged = c.merged
    return any(l in t.lits and abs(l) not in merged for l in c.lits)


def term_axiom_check(t: Constraint, f: PCNF, learnt_clauses: Iterable[Constraint] = ()) -> bool:
    for c in f.matrix:
        if not satisfies(t, c):
            return False
    for c in learnt_clauses:
        if not satisfies(t, c):
            return False
    return True


@dataclass(frozen=True)
class Axiom:
    constraint: Constraint


@dataclass(frozen=True)
class Resolve:
    left: int
    right: int
    pivot: int


@dataclass(frozen=True)
class Reduce:
    source: int
    var: int


Step = Union[Axiom, Resolve, Reduce]


@dataclass(frozen=True)
class Derivation:
    steps: tuple = ()

    def __len__(self):
        return len(self.steps)

    def to_text(self) -> str:
        lines = []
        for s in self.steps:
            if isinstance(s, Axiom):
                lines.append(f"a {s.constraint}")
            elif isinstance(s, Resolve):
                lines.append(f"r {s.left} {s.right} {s.pivot}")
            else:
                lines.append(f"u {s.source} {s.var}")
        return "".join(l + "\n" for l in lines)

    @classmethod
    def from_text(cls, text: str) -> "Derivation":
        steps = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            tag, _, rest = line.partition(" ")
            try:
                if tag == "a":
                    steps.append(Axiom(parse_constraint(rest)))
                elif tag == "r":
                    i, j, v = map(int, rest.split())
                    steps.append(Resolve(i, j, v))
                elif tag == "u":
                    i, v = map(int, rest.split())
                    steps.append(Reduce(i, v))
                else:
                    raise ValueError
            except (ValueError, QBFError):
                raise QBFError(f"bad derivation line {line!r}") from None
        return cls(tuple(steps))


@dataclass(frozen=True)
class Valid:
    constraint: Constraint | None = None

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Invalid:
    where: int
    code: str
    reason: str
    step: int | None = None

    def __bool__(self):
        return False

    def __str__(self):
        return f"{self.where}: {self.code}: {self.reason}"


def check_derivation(f: PCNF, d: Derivation, mode: RuleMode,
                     known: Iterable[Constraint] = (),
                     learnt_clauses: Iterable[Constraint] = ()) -> Union[Valid, Invalid]:
    """Replay a derivation step by step.

    ``known`` whitelists extra axioms (constraints learnt earlier in a trace).
    Term-side axioms must otherwise pass ``term_axiom_check`` against the
    matrix and ``learnt_clauses``.  Step numbers in Invalid are 1-based.
    """
    known = set(known)
    learnt_clauses = list(learnt_clauses)
    matrix = set(f.matrix)
    kind = "clause" if mode.side == CLAUSE_SIDE else "cube"
    got = []
    if not d.steps:
        return Invalid(0, "empty", "derivation has no steps")
    for k, s in enumerate(d.steps, 1):
        try:
            if isinstance(s, Axiom):
                c = s.constraint
                if c.kind != kind:
                    raise RuleError("axiom-mismatch", f"{c} is not a {kind}")
                if c not in known:
                    if kind == "clause":
                        if c not in matrix:
                            raise RuleError("axiom-mismatch", f"{c} is not a matrix clause")
                    else:
                        if c.merged:
                            raise RuleError("axiom-mismatch", f"{c} is contradictory")
                        if not term_axiom_check(c, f, learnt_clauses):
                            raise RuleError("axiom-mismatch", f"{c} does not satisfy the matrix")
                got.append(c)
            elif isinstance(s, Resolve):
                a, b = _ref(got, s.left, k), _ref(got, s.right, k)
                got.append(resolve(a, b, s.pivot, mode))
            elif isinstance(s, Reduce):
                got.append(reduce_step(_ref(got, s.source, k), s.var, mode))
            else:
                raise RuleError("bad-step", f"unknown step {s!r}")
        except RuleError as e:
            return Invalid(k, e.code, e.message)
    return Valid(got[-1])


def _ref(got, i, k):
    if not 1 <= i < k:
        raise RuleError("bad-reference", f"step {k} refers to {i}")
    return got[i - 1]
