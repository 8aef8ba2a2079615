"""Scripted refutations of the formula families, replayable step by step.

Each entry pairs a formula with a solver configuration and a per-trail script
(trail text, constraint to learn).  Scripts are written with variable names
and translated through ``families.layout``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Constraint, parse_constraint
from .families import FamilySpec, generate, layout
from .solver import (FALSE, DerivationTrace, ScriptStep, SolverConfig,
                     replay_script)
from .validate import validate_trace


@dataclass
class CorpusEntry:
    name: str
    spec: FamilySpec
    config: SolverConfig
    script: list
    verdict: str = FALSE

    def formula(self):
        return generate(self.spec)

    def expected_learnt(self) -> list:
        return [parse_constraint(s.learn) for s in self.script]

    def expected_trails(self) -> list:
        return [s.trail for s in self.script]

    def replay(self) -> DerivationTrace:
        return replay_script(self.formula(), self.config, self.script)

    def check(self):
        """Replay, validate and compare with the script; returns (ok, message)."""
        tr = self.replay()
        res = validate_trace(self.formula(), self.config, tr)
        if not res:
            return False, f"{self.name}: trace invalid at triple {res.where}: {res.code}: {res.reason}"
        if tr.learnt() != self.expected_learnt():
            return False, f"{self.name}: learnt constraints differ from the script"
        if tr.verdict != self.verdict:
            return False, f"{self.name}: verdict {tr.verdict}, expected {self.verdict}"
        return True, f"{self.name}: {len(tr)} triples, {tr.verdict}"


class _Names:
    def __init__(self, spec):
        self.g = layout(spec)

    def lit(self, name, positive=True):
        v = self.g[name]
        return v if positive else -v

    def clause(self, *lits):
        return str(Constraint.clause(lits))

    def cube(self, *lits):
        return str(Constraint.cube(lits))


def _trail(groups):
    """groups: list of lists of tokens; each group after the first starts with a decision."""
    return " ; ".join(" : ".join(g) for g in groups if g)


def _d(l):
    return f"d {l}"


def two_php_and_ct(n: int = 2, learning: str = "rrs") -> CorpusEntry:
    spec = FamilySpec("two_php_and_ct", n)
    g = _Names(spec)
    v, z1, z2 = g.lit("v"), g.lit("z1"), g.lit("z2")
    cfg = SolverConfig(ord="dep:rrs", clause_dep=learning, pick="scripted")
    t1 = _trail([[_d(-v)], [_d(z1), str(z2), "0"]])
    if learning == "rrs":
        script = [ScriptStep(t1, g.clause(-z1)),
                  ScriptStep(_trail([[str(-z1), str(z2), "0"]]), g.clause())]
    else:
        script = [ScriptStep(t1, g.clause(v, -z1)),
                  ScriptStep(_trail([[_d(-v), str(-z1), str(z2), "0"]]), g.clause())]
    return CorpusEntry(f"two_php_and_ct:{n}/{learning}", spec, cfg, script)


def std_dep_trap(n: int = 2) -> CorpusEntry:
    spec = FamilySpec("std_dep_trap", n)
    g = _Names(spec)
    b, y, a, x, c, d, p = (g.lit(k) for k in "byaxcdp")
    cfg = SolverConfig(ord="lev", clause_dep="std", pick="scripted")
    script = [
        ScriptStep(_trail([[_d(-b), str(y), str(a), str(x), str(-c), str(d), "0"]]), g.clause(-y)),
        ScriptStep(_trail([[str(-y), str(p), "0"]]), g.clause()),
    ]
    return CorpusEntry(f"std_dep_trap:{n}/std", spec, cfg, script)


def pre_rrs_trapdoor(n: int = 2) -> CorpusEntry:
    spec = FamilySpec("pre_rrs_trapdoor", n)
    g = _Names(spec)
    a, b, s, p, q, t = (g.lit(k) for k in ("a", "b", "s", "p", "q", "t"))
    y1 = g.lit(("y", 1))
    cfg = SolverConfig(ord="lev", clause_dep="rrs", pre="rrs", pick="scripted")
    script = [
        ScriptStep(_trail([[_d(a), str(-b), str(s)], [_d(p), str(-q)], [_d(y1), str(t), "0"]]),
                   g.clause(-a, -y1)),
        ScriptStep(_trail([[_d(-a), str(-b), str(s)], [_d(p), str(-q)], [_d(-y1), str(t), "0"]]),
                   g.clause(a, y1)),
        ScriptStep(_trail([[_d(a), str(-b), str(-y1), str(t), "0"]]), g.clause(-a)),
        ScriptStep(_trail([[str(-a), str(-b), str(y1), str(t), "0"]]), g.clause()),
    ]
    return CorpusEntry(f"pre_rrs_trapdoor:{n}/rrs", spec, cfg, script)


def double_long_eq_clauses(n: int, i: int, names: dict):
    """The learnt clauses L_i and R_i as literal sets."""
    x = lambda j: names[("x", j)]
    u = lambda j: names[("u", j)]
    t = lambda j: names[("t", j)]
    tail = []
    for j in range(i + 1, n + 1):
        tail += [u(j), -u(j)]
    tail += [-t(j) for j in range(1, i)]
    L = Constraint.clause([-x(i), -u(i)] + tail)
    R = Constraint.clause([x(i), u(i)] + tail)
    if i == 1:
        # nothing blocks the universals any more
        L, R = Constraint.clause([-x(1)]), Constraint.clause([x(1)])
    return L, R


def double_long_eq(n: int = 3) -> CorpusEntry:
    if n < 2:
        raise ValueError("the scripted refutation needs n >= 2")
    spec = FamilySpec("double_long_eq", n)
    names = layout(spec)
    x = lambda j: names[("x", j)]
    u = lambda j: names[("u", j)]
    t = lambda j: names[("t", j)]
    cfg = SolverConfig(ord="lev", clause_dep="trv", cube="ld", pick="scripted")
    script = []

    def prefix_groups(k):
        # decide x_j, the learnt cube propagates u_j, B_j propagates t_j
        return [[_d(x(j)), str(u(j)), str(t(j))] for j in range(1, k + 1)]

    for i in range(n - 1):
        k = i + 1
        for sign in (1, -1):
            groups = prefix_groups(i)
            groups += [[_d(sign * x(j))] for j in range(k, n + 1)]
            groups += [[_d(-sign * u(j))] for j in range(k, n + 1)]
            last = [_d(-t(k))]
            rest = list(range(k + 1, n + 1))
            if sign == -1 and i == 0 and n == 2:
                # UT'_2 becomes unit once t1 is false
                last.append(str(t(2)))
                rest = []
            groups.append(last)
            groups += [[_d(t(j))] for j in rest]
            cube = Constraint.cube([sign * x(k), -sign * u(k)])
            script.append(ScriptStep(_trail(groups), str(cube)))

    for i in range(n - 1, 0, -1):
        L, R = double_long_eq_clauses(n, i, names)
        if i == n - 1:
            tail = [str(-t(n)), str(x(n)), "0"]
        else:
            tail = [str(-x(i + 1)), "0"]
        groups = prefix_groups(i)
        groups[-1] = groups[-1] + tail
        script.append(ScriptStep(_trail(groups), str(L)))
        groups = prefix_groups(i - 1)
        own = [str(-x(i)), str(-u(i)), str(t(i))] + tail
        if groups:
            groups[-1] = groups[-1] + own
        else:
            groups = [own]
        learn = str(Constraint.clause()) if i == 1 else str(R)
        script.append(ScriptStep(_trail(groups), learn))
    return CorpusEntry(f"double_long_eq:{n}/cube-ld", spec, cfg, script)


def refutation_corpus(n: int = 2, double_long_eq_sizes=(2, 3, 4)) -> list:
    out = [two_php_and_ct(n, "rrs"), two_php_and_ct(n, "std"), std_dep_trap(n),
           pre_rrs_trapdoor(n)]
    out += [double_long_eq(k) for k in double_long_eq_sizes]
    return out
