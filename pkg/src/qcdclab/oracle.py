"""Reference oracles: game-tree evaluation, the gauge of XUT formulas and a
random small-PCNF generator.

Nothing here uses the solver, so the solver can be checked against it.
"""

from __future__ import annotations

import random

from .core import EXISTS, FORALL, PCNF, Prefix, QBFError

TRUE = "TRUE"
FALSE = "FALSE"


class OracleLimit(QBFError):
    """The instance is larger than the oracle is willing to handle."""


def _masks(f: PCNF):
    """Renumber variables by prefix position; clause -> (pos, neg) bitmasks."""
    p = f.prefix
    bit = {v: 1 << k for k, (v, _) in enumerate(p.order)}
    ex = 0
    for v, q in p.order:
        if q == EXISTS:
            ex |= bit[v]
    out = []
    for c in f.matrix:
        pos = neg = 0
        for l in c.lits:
            if l > 0:
                pos |= bit[abs(l)]
            else:
                neg |= bit[abs(l)]
        out.append((pos, neg))
    block_of_bit = [p.block[v] for v, _ in p.order]
    return out, ex, block_of_bit


def _popcount(x):
    return bin(x).count("1")


class _Evaluator:
    def __init__(self, f: PCNF):
        self.clauses, self.ex, self.block = _masks(f)
        self.memo = {}

    def _simplify(self, clauses):
        """Universal reduction and existential unit propagation to a fixpoint.

        Returns None if some clause is falsified, else the simplified tuple.
        """
        ex = self.ex
        clauses = list(clauses)
        while True:
            unit = None
            out = []
            for pos, neg in clauses:
                e = (pos | neg) & ex
                if not e:
                    return None
                keep = (1 << e.bit_length()) - 1
                pos &= keep
                neg &= keep
                if unit is None and _popcount(pos | neg) == 1:
                    unit = (pos, neg)
                out.append((pos, neg))
            if unit is None:
                return tuple(sorted(set(out)))
            clauses = _assign(out, unit[0] | unit[1], bool(unit[0]))

    def value(self, clauses) -> bool:
        clauses = self._simplify(clauses)
        if clauses is None:
            return False
        if not clauses:
            return True
        key = clauses
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        occ = 0
        for pos, neg in clauses:
            occ |= pos | neg
        low = occ & -occ
        blk = self.block[low.bit_length() - 1]
        # any variable of the outermost occurring block may go first
        best, best_n = low, -1
        rest = occ
        while rest:
            b = rest & -rest
            rest ^= b
            if self.block[b.bit_length() - 1] != blk:
                break
            n = sum(1 for pos, neg in clauses if (pos | neg) & b)
            if n > best_n:
                best, best_n = b, n
        exists = bool(best & self.ex)
        res = exists is False
        for val in (False, True):
            r = self.value(_assign(clauses, best, val))
            if exists and r:
                res = True
                break
            if not exists and not r:
                res = False
                break
        self.memo[key] = res
        return res


def _assign(clauses, b, val):
    out = []
    for pos, neg in clauses:
        if (pos if val else neg) & b:
            continue
        out.append((pos & ~b, neg & ~b))
    return out


def brute_force_eval(f: PCNF, max_vars: int = 40) -> str:
    """Minimax over the prefix: TRUE or FALSE.

    Pruned with universal reduction, existential unit propagation and
    memoisation on the residual clause set.  Raises OracleLimit if more than
    ``max_vars`` variables occur in the matrix.
    """
    used = set()
    for c in f.matrix:
        used |= c.vars
    if len(used) > max_vars:
        raise OracleLimit(f"{len(used)} variables exceed the oracle guard of {max_vars}")
    ev = _Evaluator(f)
    return TRUE if ev.value(ev.clauses) else FALSE


def matrix_satisfiable(f: PCNF, max_vars: int = 40) -> bool:
    """Propositional satisfiability of the matrix (all variables existential)."""
    n = f.prefix.nvars
    g = PCNF(Prefix(tuple((v, EXISTS) for v in range(1, n + 1))), f.matrix)
    return brute_force_eval(g, max_vars) == TRUE


class GaugeError(QBFError):
    pass


def xut_split(f: PCNF):
    """(X, U, T) variable sets, or GaugeError if the prefix is not exists-forall-exists."""
    blocks = f.prefix.blocks
    if len(blocks) != 3 or [q for q, _ in blocks] != [EXISTS, FORALL, EXISTS]:
        raise GaugeError("not an XUT formula: prefix must be one exists, forall, exists block each")
    return tuple(frozenset(vs) for _, vs in blocks)


def compute_gauge(f: PCNF, budget: int = 200000) -> int:
    """Width of the narrowest X-clause derivable by T-pivot Q-resolution and reduction.

    Saturates the matrix exactly.  Subsumption is not used: X-clauses must be
    non-empty, and a subsuming clause may resolve down to the empty clause
    where the subsumed one yields a narrow X-clause.  Raises GaugeError if no
    X-clause is derivable or the closure grows past ``budget`` clauses.
    """
    X, U, T = xut_split(f)

    def red(lits):
        # trivial scheme: universals go once no T variable is left
        if any(abs(l) in T for l in lits):
            return lits
        return frozenset(l for l in lits if abs(l) not in U)

    pool = {red(c.lits) for c in f.matrix}
    queue = list(pool)
    while queue:
        c = queue.pop()
        for l in c:
            if abs(l) not in T:
                continue
            for d in [d for d in pool if -l in d]:
                r = (c | d) - {l, -l}
                if any(-m in r for m in r):
                    continue
                r = red(r)
                if r in pool:
                    continue
                pool.add(r)
                queue.append(r)
                if len(pool) > budget:
                    raise GaugeError(f"resolution closure exceeded the budget of {budget} clauses")
    widths = [len(c) for c in pool if c and all(abs(l) in X for l in c)]
    if not widths:
        raise GaugeError("no X-clause is derivable")
    return min(widths)


def random_pcnf(seed: int, max_vars: int = 12, max_clauses: int = 20,
                min_width: int = 2, max_width: int = 4) -> PCNF:
    """Seeded random PCNF: 2-4 alternating blocks, clause width 2-4, no tautologies."""
    rng = random.Random(seed)
    nblocks = rng.randint(2, 4)
    n = rng.randint(max(nblocks, min_width), max(max_vars, nblocks))
    cuts = sorted(rng.sample(range(2, n + 1), nblocks - 1))
    q = rng.choice((EXISTS, FORALL))
    blocks = []
    lo = 1
    for hi in cuts + [n + 1]:
        blocks.append((q, list(range(lo, hi))))
        q = FORALL if q == EXISTS else EXISTS
        lo = hi
    m = rng.randint(1, max_clauses)
    clauses = []
    while len(clauses) < m:
        w = rng.randint(min_width, min(max_width, n))
        lits = [v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), w)]
        if any(-l in lits for l in lits):
            continue
        clauses.append(lits)
    return PCNF.build(blocks, clauses)
