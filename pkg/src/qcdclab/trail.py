"""Natural QCDCL trails: decisions, dependency-aware propagation, conflicts.

Constraint ids are 1-based over the database: matrix clauses first, then
learnt constraints in the order they were learnt.

Internally variables are bits of Python ints.  A constraint is stored as
``(pos, neg, merged)`` masks; a merged variable never becomes true or false
and can only disappear through reduction.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .core import PCNF, Constraint, QBFError
from .deps import DepRelation, compute_dtrv

NOCUBE = "none"
CUBE_LD = "ld"
CUBE_DEP = "dep"
CUBE_POLICIES = (NOCUBE, CUBE_LD, CUBE_DEP)


class Outcome(enum.Enum):
    CLAUSE_CONFLICT = "clause-conflict"
    CUBE_CONFLICT = "cube-conflict"
    SATISFIED = "satisfied"
    INCOMPLETE = "incomplete"


class PolicyViolation(RuntimeError):
    pass


class ScriptDivergence(RuntimeError):
    """A scripted trail cannot be followed by the engine."""


@dataclass(frozen=True)
class Entry:
    """One trail entry; ``lit == 0`` marks the final conflict (see Trail.outcome)."""

    lit: int
    ante: int | None = None

    @property
    def decision(self) -> bool:
        return self.ante is None and self.lit != 0

    @property
    def conflict(self) -> bool:
        return self.lit == 0


@dataclass
class Trail:
    entries: list
    outcome: Outcome

    def literals(self) -> list:
        return [e.lit for e in self.entries if e.lit]

    def decisions(self) -> list:
        return [e.lit for e in self.entries if e.decision]

    @property
    def conflict_ante(self) -> int | None:
        if self.entries and self.entries[-1].conflict:
            return self.entries[-1].ante
        return None

    def to_text(self) -> str:
        marker = "T" if self.outcome == Outcome.CUBE_CONFLICT else "0"
        out = []
        for i, e in enumerate(self.entries):
            if e.decision:
                tok = f"d {e.lit}"
            elif e.conflict:
                tok = marker if e.ante is None else f"{marker}@{e.ante}"
            else:
                tok = f"{e.lit}@{e.ante}"
            if i:
                out.append(" ; " if e.decision else " : ")
            out.append(tok)
        return "".join(out)

    def __str__(self):
        return self.to_text()


def parse_trail(text: str, strict: bool = True) -> Trail:
    """Parse the trail text form.

    With ``strict=False`` antecedents may be omitted (used by scripts).
    """
    entries = []
    outcome = Outcome.SATISFIED
    toks = [t.strip() for g in text.split(";") for t in g.split(":")]
    toks = [t for t in toks if t]
    for k, tok in enumerate(toks):
        try:
            if tok.startswith("d"):
                entries.append(Entry(int(tok[1:])))
                continue
            body, _, ante = tok.partition("@")
            ante = int(ante) if ante else None
            if ante is None and strict:
                raise ValueError
            if body in ("0", "T"):
                if k != len(toks) - 1:
                    raise QBFError(f"conflict marker before the end of {text!r}")
                outcome = Outcome.CUBE_CONFLICT if body == "T" else Outcome.CLAUSE_CONFLICT
                entries.append(Entry(0, ante))
            else:
                lit = int(body)
                if lit == 0:
                    raise ValueError
                entries.append(Entry(lit, ante if ante is not None else -1))
        except ValueError:
            raise QBFError(f"bad trail token {tok!r}") from None
    return Trail(entries, outcome)


LEV = "lev"
DORD = "dep"
ANY = "any"


@dataclass(frozen=True)
class DecisionPolicy:
    kind: str
    dep: DepRelation | None = None

    def __post_init__(self):
        if self.kind not in (LEV, DORD, ANY):
            raise ValueError(f"unknown decision policy {self.kind!r}")
        if self.kind == DORD and self.dep is None:
            raise ValueError("D-ORD needs a dependency relation")

    def __str__(self):
        if self.kind == DORD:
            return f"dep:{self.dep.scheme}"
        return self.kind


class FormulaState:
    """The clause/cube database a trail is built from."""

    def __init__(self, base: PCNF, clause_dep: DepRelation, cube_policy: str = NOCUBE,
                 cube_dep: DepRelation | None = None):
        if cube_policy not in CUBE_POLICIES:
            raise ValueError(f"unknown cube policy {cube_policy!r}")
        self.base = base
        self.prefix = base.prefix
        self.clause_dep = clause_dep
        self.cube_policy = cube_policy
        if cube_policy == CUBE_LD:
            cube_dep = compute_dtrv(base)
        elif cube_policy == CUBE_DEP:
            cube_dep = cube_dep or clause_dep
        self.cube_dep = cube_dep
        self.learnt = []
        self._index = set(base.matrix)
        self._compile()

    # database -------------------------------------------------------------

    def __len__(self):
        return len(self.base.matrix) + len(self.learnt)

    def get(self, cid: int) -> Constraint:
        m = len(self.base.matrix)
        if 1 <= cid <= m:
            return self.base.matrix[cid - 1]
        if m < cid <= m + len(self.learnt):
            return self.learnt[cid - m - 1]
        raise KeyError(cid)

    def constraints(self) -> list:
        return list(self.base.matrix) + self.learnt

    @property
    def learnt_clauses(self) -> list:
        return [c for c in self.learnt if c.is_clause]

    @property
    def learnt_cubes(self) -> list:
        return [c for c in self.learnt if c.is_cube]

    def __contains__(self, c: Constraint) -> bool:
        return c in self._index

    def add(self, c: Constraint) -> int:
        if c.is_cube and self.cube_policy == NOCUBE:
            raise ValueError("cubes cannot be learnt without a cube policy")
        self.learnt.append(c)
        self._index.add(c)
        self._compile_one(c, len(self) - 1)
        return len(self)

    def copy(self) -> "FormulaState":
        s = FormulaState(self.base, self.clause_dep, self.cube_policy, self.cube_dep)
        for c in self.learnt:
            s.add(c)
        return s

    # compiled form ----------------------------------------------------------

    def _compile(self):
        p = self.prefix
        self.nvars = p.nvars
        self.all_mask = sum(1 << v for v in range(1, p.nvars + 1))
        self.ex_mask = sum(1 << v for v, q in p.order if q == "e")
        self.pos = p.position
        self.cl_block = {}
        for u in self.base.universals:
            self.cl_block[u] = _mask(self.clause_dep.dependents.get(u, ()))
        self.cu_block = {}
        if self.cube_dep is not None:
            for e in self.base.existentials:
                self.cu_block[e] = _mask(self.cube_dep.dependents.get(e, ()))
        self.masks = []
        self.is_cube = []
        self.occ = [[] for _ in range(p.nvars + 1)]
        for i, c in enumerate(self.base.matrix):
            self._compile_one(c, i)

    def _compile_one(self, c, i):
        pos = neg = mg = 0
        for l in c.lits:
            if l > 0:
                pos |= 1 << l
            else:
                neg |= 1 << -l
        mg = pos & neg
        self.masks.append((pos & ~mg, neg & ~mg, mg))
        self.is_cube.append(c.is_cube)
        for v in c.vars:
            if not (mg >> v) & 1:
                self.occ[v].append(i)


def _mask(vs) -> int:
    m = 0
    for v in vs:
        m |= 1 << v
    return m


def _bits(m):
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


OTHER, UNIT, CONFLICT, DONE = 0, 1, 2, 3


class _Run:
    """Mutable trail construction over a FormulaState."""

    def __init__(self, s: FormulaState):
        self.s = s
        self.T = 0
        self.F = 0
        self.entries = []
        self.status = [OTHER] * len(s.masks)
        self.unit_lit = [0] * len(s.masks)
        self.clause_conf = set()
        self.cube_conf = set()
        self.clause_unit = set()
        self.cube_unit = set()
        for i in range(len(s.masks)):
            self._eval(i)

    def _eval(self, i):
        s = self.s
        pos, neg, mg = s.masks[i]
        T, F = self.T, self.F
        cube = s.is_cube[i]
        old = self.status[i]
        if cube:
            if (pos & F) or (neg & T):
                st = DONE
            else:
                res = ((pos | neg) & ~(T | F)) | mg
                U = res & ~s.ex_mask
                if not U:
                    st = CONFLICT
                elif U & (U - 1):
                    st = OTHER
                else:
                    E = res & s.ex_mask
                    blocked = False
                    for e in _bits(E):
                        if s.cu_block[e] & U:
                            blocked = True
                            break
                    if blocked:
                        st = OTHER
                    else:
                        st = UNIT
                        u = U.bit_length() - 1
                        # the cube holds literal l; propagate -l
                        self.unit_lit[i] = -u if (pos >> u) & 1 else u
        else:
            if (pos & T) or (neg & F):
                st = DONE
            else:
                res = ((pos | neg) & ~(T | F)) | mg
                E = res & s.ex_mask
                if E and E & (E - 1):
                    st = OTHER
                else:
                    U = res & ~s.ex_mask
                    kept = False
                    if E:
                        for u in _bits(U):
                            if s.cl_block[u] & E:
                                kept = True
                                break
                    if not E:
                        st = CONFLICT
                    elif kept:
                        st = OTHER
                    else:
                        st = UNIT
                        e = E.bit_length() - 1
                        self.unit_lit[i] = e if (pos >> e) & 1 else -e
        if st == old and st != UNIT:
            return
        self.status[i] = st
        conf = self.cube_conf if cube else self.clause_conf
        unit = self.cube_unit if cube else self.clause_unit
        conf.discard(i)
        unit.discard(i)
        if st == CONFLICT:
            conf.add(i)
        elif st == UNIT:
            unit.add(i)

    def assigned(self) -> int:
        return self.T | self.F

    def value(self, v):
        if (self.T >> v) & 1:
            return True
        if (self.F >> v) & 1:
            return False
        return None

    def assign(self, lit, ante):
        v = abs(lit)
        if (self.assigned() >> v) & 1:
            raise QBFError(f"variable {v} assigned twice")
        if lit > 0:
            self.T |= 1 << v
        else:
            self.F |= 1 << v
        self.entries.append(Entry(lit, ante))
        for i in self.s.occ[v]:
            self._eval(i)

    def units(self):
        """Available propagations as (lit, id) pairs, clause units first."""
        out = [(self.unit_lit[i], i + 1) for i in sorted(self.clause_unit)]
        out += [(self.unit_lit[i], i + 1) for i in sorted(self.cube_unit)]
        return out

    def quiet(self) -> bool:
        return not (self.clause_conf or self.cube_conf or self.clause_unit or self.cube_unit)

    def decidable(self, pol: DecisionPolicy) -> list:
        """Decidable variables sorted by prefix position."""
        s = self.s
        free = s.all_mask & ~self.assigned()
        if not free:
            return []
        if pol.kind == ANY:
            vs = list(_bits(free))
        elif pol.kind == LEV:
            block = s.prefix.block
            first = min((block[v] for v in _bits(free)))
            vs = [v for v in _bits(free) if block[v] == first]
        else:
            sup = pol.dep.supporters
            assigned = self.assigned()
            vs = [v for v in _bits(free) if not (_mask(sup.get(v, ())) & ~assigned)]
        vs.sort(key=s.pos.get)
        return vs

    def select(self):
        """Default propagation choice: (lit, id, outcome) or None."""
        if self.clause_conf:
            return (0, min(self.clause_conf) + 1, Outcome.CLAUSE_CONFLICT)
        if self.cube_conf:
            return (0, min(self.cube_conf) + 1, Outcome.CUBE_CONFLICT)
        if self.clause_unit:
            i = min(self.clause_unit)
            return (self.unit_lit[i], i + 1, None)
        if self.cube_unit:
            i = min(self.cube_unit)
            return (self.unit_lit[i], i + 1, None)
        return None

    def check_decision(self, lit, pol):
        v = abs(lit)
        if v < 1 or v > self.s.nvars:
            raise PolicyViolation(f"unknown variable {v}")
        if (self.assigned() >> v) & 1:
            raise PolicyViolation(f"variable {v} is already assigned")
        if v not in self.decidable(pol):
            raise PolicyViolation(f"decision on {v} violates {pol}: " + _why_blocked(self, v, pol))


def _why_blocked(run, v, pol):
    s = run.s
    assigned = run.assigned()
    if pol.kind == LEV:
        block = s.prefix.block
        for w in s.prefix.position:
            if not (assigned >> w) & 1 and block[w] < block[v]:
                return f"variable {w} of an earlier block is unassigned"
        return "outside the current block"
    for w in sorted(pol.dep.supporters.get(v, ())):
        if not (assigned >> w) & 1:
            return f"supporter {w} with pair ({w}, {v}) is unassigned"
    return "not decidable"


def decidable_vars(s: FormulaState, a: dict, pol: DecisionPolicy) -> set:
    """Decidable variables under a partial assignment ``{var: bool}``."""
    free = [v for v, _ in s.prefix.order if v not in a]
    if not free or pol.kind == ANY:
        return set(free)
    if pol.kind == LEV:
        first = min(s.prefix.block[v] for v in free)
        return {v for v in free if s.prefix.block[v] == first}
    sup = pol.dep.supporters
    return {v for v in free if all(w in a for w in sup.get(v, ()))}


class HeuristicChooser:
    """Decide an outermost (or innermost) decidable variable with a fixed value."""

    def __init__(self, value: str = "false", order: str = "outer"):
        if value not in ("false", "true") or order not in ("outer", "inner"):
            raise ValueError("bad chooser settings")
        self.value = value
        self.order = order

    def __call__(self, decidable: list):
        if not decidable:
            return None
        v = decidable[0] if self.order == "outer" else decidable[-1]
        return v if self.value == "true" else -v


class ListChooser:
    """Hand out a fixed list of decision literals."""

    def __init__(self, lits):
        self.lits = list(lits)
        self.k = 0

    def __call__(self, decidable):
        if self.k >= len(self.lits):
            return None
        lit = self.lits[self.k]
        self.k += 1
        return lit


def run_trail(s: FormulaState, pol: DecisionPolicy, chooser) -> Trail:
    """Build one natural trail; propagation order is fixed (clause conflicts,
    cube conflicts, clause units, cube units; lowest id first)."""
    run = _Run(s)
    while True:
        nxt = run.select()
        if nxt is not None:
            lit, cid, outcome = nxt
            if outcome is not None:
                run.entries.append(Entry(0, cid))
                return Trail(run.entries, outcome)
            run.assign(lit, cid)
            continue
        if run.assigned() == s.all_mask:
            return Trail(run.entries, Outcome.SATISFIED)
        lit = chooser(run.decidable(pol))
        if lit is None:
            return Trail(run.entries, Outcome.INCOMPLETE)
        run.check_decision(lit, pol)
        run.assign(lit, None)


def follow_trail(s: FormulaState, pol: DecisionPolicy, script: Trail) -> Trail:
    """Build the natural trail described by ``script``.

    Propagations are taken in the order the script lists them, provided the
    engine has them available at that point; antecedent ids in the script are
    optional (``-1`` means any).  Raises ScriptDivergence on the first
    mismatch.
    """
    run = _Run(s)
    for k, want in enumerate(script.entries, 1):
        if want.decision:
            if not run.quiet():
                avail = run.select()
                raise ScriptDivergence(
                    f"entry {k}: script decides {want.lit} but the engine still "
                    f"propagates {_desc(avail)}")
            run.check_decision(want.lit, pol)
            run.assign(want.lit, None)
            continue
        if want.conflict:
            pool = run.cube_conf if script.outcome == Outcome.CUBE_CONFLICT else run.clause_conf
            ids = sorted(i + 1 for i in pool)
            if not ids:
                raise ScriptDivergence(
                    f"entry {k}: script expects a conflict but the engine offers "
                    f"{_desc(run.select())}")
            cid = ids[0]
            if want.ante is not None and want.ante != -1:
                if want.ante not in ids:
                    raise ScriptDivergence(
                        f"entry {k}: conflict antecedent {want.ante} expected, "
                        f"engine has {ids}")
                cid = want.ante
            run.entries.append(Entry(0, cid))
            return Trail(run.entries, script.outcome)
        cands = [(l, i) for l, i in run.units() if l == want.lit]
        if want.ante not in (None, -1):
            cands = [(l, i) for l, i in cands if i == want.ante]
        if not cands:
            raise ScriptDivergence(
                f"entry {k}: script propagates {want.lit}"
                + (f"@{want.ante}" if want.ante not in (None, -1) else "")
                + f" but the engine offers {run.units() or _desc(run.select())}")
        run.assign(want.lit, cands[0][1])
    if not run.quiet():
        raise ScriptDivergence(
            f"script ended but the engine still propagates {_desc(run.select())}")
    if run.assigned() != s.all_mask:
        return Trail(run.entries, Outcome.INCOMPLETE)
    return Trail(run.entries, Outcome.SATISFIED)


def _desc(nxt):
    if nxt is None:
        return "nothing"
    lit, cid, outcome = nxt
    if outcome == Outcome.CLAUSE_CONFLICT:
        return f"a clause conflict @{cid}"
    if outcome == Outcome.CUBE_CONFLICT:
        return f"a cube conflict @{cid}"
    return f"{lit}@{cid}"
