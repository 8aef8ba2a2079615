"""The QCDCL loop: build a trail, learn one constraint, restart.

A run produces a DerivationTrace of (trail, learnt constraint, derivation)
triples; it ends with the empty clause (FALSE), the empty cube (TRUE) or an
exhausted budget (UNKNOWN).
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace

from .calculus import Derivation
from .core import PCNF, Constraint, QBFError, parse_constraint
from .deps import SCHEMES, compute, preprocess
from .learning import (learn_from_satisfaction, learnable,
                       satisfaction_witness)
from .trail import (ANY, CUBE_POLICIES, DORD, LEV, NOCUBE, DecisionPolicy,
                    FormulaState, HeuristicChooser, Outcome, ScriptDivergence,
                    Trail, follow_trail, parse_trail, run_trail)

TRUE = "TRUE"
FALSE = "FALSE"
UNKNOWN = "UNKNOWN"

ORDS = ("lev", "dep:trv", "dep:std", "dep:rrs", "any")
PICKS = ("last", "first-new", "shortest", "scripted")


class SatisfactionUnusable(RuntimeError):
    """A totally satisfying trail was reached while cube learning is off."""


class ScriptError(RuntimeError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    ord: str = "lev"
    clause_dep: str = "trv"
    cube: str = NOCUBE
    pre: str = "none"
    pick: str = "first-new"
    value: str = "false"
    var_order: str = "outer"
    step_limit: int = 10 ** 6

    def __post_init__(self):
        if self.ord not in ORDS:
            raise ValueError(f"unknown decision order {self.ord!r}")
        if self.clause_dep not in SCHEMES:
            raise ValueError(f"unknown clause scheme {self.clause_dep!r}")
        if self.cube not in CUBE_POLICIES:
            raise ValueError(f"unknown cube policy {self.cube!r}")
        if self.pre not in ("none",) + SCHEMES:
            raise ValueError(f"unknown preprocessing {self.pre!r}")
        if self.pick not in PICKS:
            raise ValueError(f"unknown pick rule {self.pick!r}")
        if self.value not in ("false", "true"):
            raise ValueError(f"unknown value heuristic {self.value!r}")
        if self.var_order not in ("outer", "inner"):
            raise ValueError(f"unknown variable order {self.var_order!r}")
        if self.step_limit < 1:
            raise ValueError("step_limit must be positive")

    def to_line(self) -> str:
        return " ".join(f"{f.name}={getattr(self, f.name)}" for f in fields(self))

    @classmethod
    def from_line(cls, line: str) -> "SolverConfig":
        kw = {}
        for tok in line.split():
            k, _, v = tok.partition("=")
            if k not in {f.name for f in fields(cls)}:
                raise QBFError(f"unknown config key {k!r}")
            kw[k] = int(v) if k == "step_limit" else v
        return cls(**kw)

    def with_(self, **kw) -> "SolverConfig":
        return replace(self, **kw)


@dataclass
class Triple:
    trail: Trail
    learnt: Constraint
    derivation: Derivation


@dataclass
class DerivationTrace:
    triples: list
    verdict: str
    config: SolverConfig = field(default_factory=SolverConfig)

    def __len__(self):
        return len(self.triples)

    def learnt(self) -> list:
        return [t.learnt for t in self.triples]

    def literal_count(self) -> int:
        return sum(len(t.trail.literals()) for t in self.triples)

    def cube_triples(self) -> int:
        return sum(1 for t in self.triples if t.learnt.is_cube)


def make_policy(ord_: str, f: PCNF) -> DecisionPolicy:
    if ord_ == "lev":
        return DecisionPolicy(LEV)
    if ord_ == "any":
        return DecisionPolicy(ANY)
    return DecisionPolicy(DORD, compute(ord_.split(":", 1)[1], f))


def working_formula(f: PCNF, cfg: SolverConfig) -> PCNF:
    if cfg.pre == "none":
        return f
    return preprocess(f, compute(cfg.pre, f))


def prepare(f: PCNF, cfg: SolverConfig):
    """Working formula, fresh FormulaState and decision policy for a config."""
    work = working_formula(f, cfg)
    state = FormulaState(work, compute(cfg.clause_dep, work), cfg.cube)
    return work, state, make_policy(cfg.ord, work)


def _pick(items, s: FormulaState, rule: str, satisfied: bool):
    if rule == "last":
        return items[0] if satisfied else items[-1]
    fresh = [it for it in items if it.constraint not in s]
    if not fresh:
        return None
    if rule == "shortest":
        return min(fresh, key=lambda it: len(it.constraint.lits))
    return fresh[0]


def _finish(c: Constraint):
    if c.is_empty:
        return FALSE if c.is_clause else TRUE
    return None


def solve(f: PCNF, cfg: SolverConfig = SolverConfig()) -> DerivationTrace:
    if cfg.pick == "scripted":
        raise ValueError("scripted pick needs replay_script")
    _, s, pol = prepare(f, cfg)
    chooser = HeuristicChooser(cfg.value, cfg.var_order)
    triples = []
    for _ in range(cfg.step_limit):
        t = run_trail(s, pol, chooser)
        if t.outcome == Outcome.SATISFIED and s.cube_policy == NOCUBE:
            raise SatisfactionUnusable("satisfaction unusable under NoCube")
        items = learnable(s, t)
        item = _pick(items, s, cfg.pick, t.outcome == Outcome.SATISFIED)
        if item is None:
            return DerivationTrace(triples, UNKNOWN, cfg)
        triples.append(Triple(t, item.constraint, item.derivation))
        verdict = _finish(item.constraint)
        if verdict:
            return DerivationTrace(triples, verdict, cfg)
        s.add(item.constraint)
    return DerivationTrace(triples, UNKNOWN, cfg)


def solve_or_unknown(f: PCNF, cfg: SolverConfig) -> DerivationTrace:
    """solve, mapping an unusable satisfying trail to an UNKNOWN verdict."""
    try:
        return solve(f, cfg)
    except SatisfactionUnusable:
        return DerivationTrace([], UNKNOWN, cfg)


@dataclass
class ScriptStep:
    """One scripted trail.

    ``trail`` uses the trail text form; antecedents may be left out.
    ``learn`` is the constraint to learn (text form), an index into the
    learnable list, or None for the last item.
    """

    trail: str
    learn: object = None

    @classmethod
    def from_obj(cls, obj) -> "ScriptStep":
        if isinstance(obj, str):
            return cls(obj)
        return cls(obj["trail"], obj.get("learn"))


def replay_script(f: PCNF, cfg: SolverConfig, script) -> DerivationTrace:
    _, s, pol = prepare(f, cfg)
    triples = []
    for k, step in enumerate(script, 1):
        if not isinstance(step, ScriptStep):
            step = ScriptStep.from_obj(step)
        want = parse_trail(step.trail, strict=False)
        try:
            t = follow_trail(s, pol, want)
        except ScriptDivergence as e:
            raise ScriptError(f"trail {k}: {e}") from None
        if t.outcome == Outcome.INCOMPLETE:
            raise ScriptError(f"trail {k}: script exhausted before the trail ended")
        if t.outcome == Outcome.SATISFIED and s.cube_policy == NOCUBE:
            raise SatisfactionUnusable(f"trail {k}: satisfaction unusable under NoCube")
        learn = step.learn
        if isinstance(learn, str):
            learn = parse_constraint(learn)
        if t.outcome == Outcome.SATISFIED and isinstance(learn, Constraint):
            sub = satisfaction_witness(s, t, learn)
            if sub is None:
                raise ScriptError(f"trail {k}: {learn} is not learnable from the satisfying trail")
            items = learn_from_satisfaction(s, t, [sub])
        else:
            items = learnable(s, t)
        if learn is None:
            item = items[0] if t.outcome == Outcome.SATISFIED else items[-1]
        elif isinstance(learn, int):
            item = items[learn]
        else:
            match = [it for it in items if it.constraint == learn]
            if not match:
                got = ", ".join(str(it.constraint) for it in items)
                raise ScriptError(f"trail {k}: expected to learn {learn}, learnable: {got}")
            item = match[0]
        triples.append(Triple(t, item.constraint, item.derivation))
        verdict = _finish(item.constraint)
        if verdict:
            if k != len(script):
                raise ScriptError(f"trail {k}: refutation finished before the script")
            return DerivationTrace(triples, verdict, cfg)
        s.add(item.constraint)
    return DerivationTrace(triples, UNKNOWN, cfg)


HEADER = "qcdcl-trace v1"


def write_trace(tr: DerivationTrace) -> str:
    out = [HEADER, "config " + tr.config.to_line(), f"verdict {tr.verdict}"]
    for i, t in enumerate(tr.triples, 1):
        out.append(f"triple {i}")
        out.append("trail " + t.trail.to_text())
        out.append(f"learnt {t.learnt}")
        out.append("derivation")
        out.extend(t.derivation.to_text().splitlines())
        out.append("end")
    return "\n".join(out) + "\n"


def read_trace(text: str) -> DerivationTrace:
    lines = [l.rstrip() for l in text.splitlines()]
    if not lines or lines[0] != HEADER:
        raise QBFError("not a qcdcl-trace v1 file")
    if len(lines) < 3 or not lines[1].startswith("config ") or not lines[2].startswith("verdict "):
        raise QBFError("missing config or verdict line")
    cfg = SolverConfig.from_line(lines[1][len("config "):])
    verdict = lines[2].split()[1]
    triples = []
    k = 3
    while k < len(lines):
        if not lines[k]:
            k += 1
            continue
        if not lines[k].startswith("triple "):
            raise QBFError(f"line {k + 1}: expected a triple block")
        try:
            trail = parse_trail(lines[k + 1].split(" ", 1)[1] if " " in lines[k + 1] else "")
            learnt = parse_constraint(lines[k + 2].split(" ", 1)[1])
        except IndexError:
            raise QBFError(f"line {k + 1}: truncated triple") from None
        if lines[k + 3] != "derivation":
            raise QBFError(f"line {k + 4}: expected 'derivation'")
        j = k + 4
        while j < len(lines) and lines[j] != "end":
            j += 1
        if j == len(lines):
            raise QBFError("unterminated derivation block")
        deriv = Derivation.from_text("\n".join(lines[k + 4:j]))
        triples.append(Triple(trail, learnt, deriv))
        k = j + 1
    return DerivationTrace(triples, verdict, cfg)
