"""Independent checker for derivation traces.

The trail replay here works on plain dicts and frozensets and calls only the
reduction primitives of ``deps``; it shares no propagation code with the
bitmask engine in ``trail``.
"""

from __future__ import annotations

from .calculus import Invalid, Valid, check_derivation
from .core import PCNF, Constraint
from .deps import compute, compute_dtrv, reduce_clause, reduce_cube
from .learning import (LearningError, clause_mode, cube_mode,
                       learn_from_clause_conflict, learn_from_cube_conflict,
                       satisfaction_witness)
from .solver import (FALSE, TRUE, UNKNOWN, DerivationTrace, SolverConfig,
                     working_formula)
from .trail import NOCUBE, FormulaState, Outcome


class _Fail(Exception):
    def __init__(self, code, reason, step=None):
        super().__init__(reason)
        self.code = code
        self.reason = reason
        self.step = step


def _status(c: Constraint, a: dict, dep, prefix):
    """('sat'|'done'|'conflict'|'unit'|'open', lit) for one constraint."""
    merged = c.merged
    rest = []
    for l in c.lits:
        v = abs(l)
        if v in merged or v not in a:
            rest.append(l)
            continue
        true = a[v] == (l > 0)
        if c.is_clause and true:
            return "sat", None
        if c.is_cube and not true:
            return "done", None
    r = c.with_lits(rest)
    if c.is_clause:
        r = reduce_clause(r, dep, prefix)
        if r.is_empty:
            return "conflict", None
        if len(r.lits) == 1:
            (l,) = r.lits
            if prefix.is_exists(abs(l)):
                return "unit", l
        return "open", None
    r = reduce_cube(r, dep, prefix)
    if r.is_empty:
        return "conflict", None
    if len(r.lits) == 1:
        (l,) = r.lits
        if prefix.is_forall(abs(l)):
            return "unit", -l
    return "open", None


def _decidable(v, a, cfg_ord, prefix, ord_dep):
    if cfg_ord == "any":
        return True, ""
    if cfg_ord == "lev":
        for w, _ in prefix.order:
            if w not in a and prefix.block[w] < prefix.block[v]:
                return False, f"variable {w} of an earlier block is unassigned"
        return True, ""
    for x, y in ord_dep.pairs:
        if y == v and x not in a:
            return False, f"supporter {x} with pair ({x}, {v}) is unassigned"
    return True, ""


class _Context:
    def __init__(self, f: PCNF, cfg: SolverConfig):
        self.cfg = cfg
        self.work = working_formula(f, cfg)
        self.prefix = self.work.prefix
        self.clause_dep = compute(cfg.clause_dep, self.work)
        if cfg.cube == "ld":
            self.cube_dep = compute_dtrv(self.work)
        else:
            self.cube_dep = self.clause_dep
        self.ord_dep = None
        if cfg.ord.startswith("dep:"):
            self.ord_dep = compute(cfg.ord.split(":")[1], self.work)
        self.db = list(self.work.matrix)
        self.nmatrix = len(self.db)

    def status(self, cid, a):
        c = self.db[cid - 1]
        dep = self.clause_dep if c.is_clause else self.cube_dep
        return _status(c, a, dep, self.prefix)

    def pending(self, a):
        for cid in range(1, len(self.db) + 1):
            st, lit = self.status(cid, a)
            if st in ("conflict", "unit"):
                return cid, st, lit
        return None

    def check_trail(self, trail):
        a = {}
        n = self.prefix.nvars
        entries = trail.entries
        for k, e in enumerate(entries, 1):
            if e.conflict:
                if k != len(entries):
                    raise _Fail("bad-trail", f"entry {k}: conflict marker before the end", k)
                self._check_conflict(k, e, trail.outcome, a)
                return
            v = abs(e.lit)
            if not 1 <= v <= n:
                raise _Fail("bad-trail", f"entry {k}: unknown variable {v}", k)
            if v in a:
                raise _Fail("double-assignment", f"entry {k}: variable {v} assigned twice", k)
            if e.decision:
                p = self.pending(a)
                if p is not None:
                    cid, st, lit = p
                    what = "a conflict" if st == "conflict" else f"propagation of {lit}"
                    raise _Fail("not-natural",
                                f"entry {k}: decision {e.lit} while constraint {cid} allows {what}", k)
                ok, why = _decidable(v, a, self.cfg.ord, self.prefix, self.ord_dep)
                if not ok:
                    raise _Fail("policy", f"entry {k}: decision {e.lit} violates {self.cfg.ord}: {why}", k)
            else:
                self._check_propagation(k, e, a)
            a[v] = e.lit > 0
        if trail.outcome in (Outcome.CLAUSE_CONFLICT, Outcome.CUBE_CONFLICT):
            raise _Fail("bad-trail", "conflict outcome without a conflict entry", len(entries))
        if trail.outcome != Outcome.SATISFIED:
            raise _Fail("bad-trail", f"trail outcome {trail.outcome.value}", len(entries))
        if len(a) != n:
            raise _Fail("incomplete", "satisfying trail leaves variables unassigned", len(entries))
        p = self.pending(a)
        if p is not None:
            raise _Fail("not-natural", f"constraint {p[0]} is {p[1]} at the end of the trail",
                        len(entries))

    def _ante(self, k, cid):
        if cid is None or not 1 <= cid <= len(self.db):
            raise _Fail("bad-antecedent", f"entry {k}: antecedent {cid} does not exist", k)
        return self.db[cid - 1]

    def _check_propagation(self, k, e, a):
        c = self._ante(k, e.ante)
        v = abs(e.lit)
        if c.is_cube:
            if self.cfg.cube == NOCUBE or e.ante <= self.nmatrix:
                raise _Fail("bad-antecedent", f"entry {k}: cube antecedent {e.ante} not allowed", k)
            if not self.prefix.is_forall(v):
                raise _Fail("bad-antecedent", f"entry {k}: cube propagates existential {v}", k)
        elif not self.prefix.is_exists(v):
            raise _Fail("bad-antecedent", f"entry {k}: clause propagates universal {v}", k)
        st, lit = self.status(e.ante, a)
        if st != "unit" or lit != e.lit:
            got = f"propagates {lit}" if st == "unit" else f"is {st}"
            raise _Fail("bad-propagation",
                        f"entry {k}: antecedent {e.ante} {got}, trail has {e.lit}", k)

    def _check_conflict(self, k, e, outcome, a):
        c = self._ante(k, e.ante)
        if outcome == Outcome.CLAUSE_CONFLICT and not c.is_clause:
            raise _Fail("bad-antecedent", f"entry {k}: clause conflict on cube {e.ante}", k)
        if outcome == Outcome.CUBE_CONFLICT:
            if not c.is_cube or self.cfg.cube == NOCUBE:
                raise _Fail("bad-antecedent", f"entry {k}: cube conflict on {e.ante}", k)
        st, _ = self.status(e.ante, a)
        if st != "conflict":
            raise _Fail("bad-propagation", f"entry {k}: antecedent {e.ante} is {st}, not a conflict", k)


def validate_trace(f: PCNF, cfg: SolverConfig, tr: DerivationTrace):
    """Valid() or Invalid(triple index, code, reason) for the first failure."""
    ctx = _Context(f, cfg)
    state = FormulaState(ctx.work, ctx.clause_dep, cfg.cube,
                         ctx.cube_dep if cfg.cube != NOCUBE else None)
    for i, tri in enumerate(tr.triples, 1):
        try:
            ctx.check_trail(tri.trail)
            _check_learnt(ctx, state, tri)
        except _Fail as e:
            return Invalid(i, e.code, e.reason, e.step)
        if tri.learnt.is_empty and i != len(tr.triples):
            return Invalid(i, "trailing-triples", "empty constraint before the last triple")
        ctx.db.append(tri.learnt)
        state.add(tri.learnt)
    want = UNKNOWN
    if tr.triples:
        want = _verdict(tr.triples[-1].learnt) or UNKNOWN
    if tr.verdict != want:
        return Invalid(len(tr.triples), "verdict", f"trace claims {tr.verdict}, derivation gives {want}")
    return Valid(tr.triples[-1].learnt if tr.triples else None)


def _verdict(c):
    if c.is_empty:
        return FALSE if c.is_clause else TRUE
    return None


def _check_learnt(ctx, state, tri):
    t, c = tri.trail, tri.learnt
    if c.is_cube and ctx.cfg.cube == NOCUBE:
        raise _Fail("not-learnable", f"cube {c} learnt under NoCube")
    try:
        if t.outcome == Outcome.CLAUSE_CONFLICT:
            items = [it.constraint for it in learn_from_clause_conflict(state, t)]
            if c not in items:
                raise _Fail("not-learnable", f"{c} is not learnable from the trail")
        elif t.outcome == Outcome.CUBE_CONFLICT:
            items = [it.constraint for it in learn_from_cube_conflict(state, t)]
            if c not in items:
                raise _Fail("not-learnable", f"{c} is not learnable from the trail")
        else:
            if not c.is_cube or satisfaction_witness(state, t, c) is None:
                raise _Fail("not-learnable", f"{c} is not learnable from the satisfying trail")
    except LearningError as e:
        raise _Fail("not-learnable", str(e)) from None
    mode = clause_mode(state) if c.is_clause else cube_mode(state)
    res = check_derivation(ctx.work, tri.derivation, mode, known=state.learnt,
                           learnt_clauses=state.learnt_clauses)
    if not res:
        raise _Fail("bad-derivation", f"derivation step {res.where}: {res.code}: {res.reason}",
                    res.where)
    if res.constraint != c:
        raise _Fail("bad-derivation", f"derivation ends in {res.constraint}, triple learns {c}",
                    len(tri.derivation))
