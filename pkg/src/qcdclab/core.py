"""Core QBF objects: prefixes, clauses and cubes, PCNF formulas, QDIMACS I/O.

Literals are DIMACS integers: ``v`` is the positive literal of variable ``v``
and ``-v`` its negation.  A constraint holding both ``v`` and ``-v`` carries a
merged occurrence of ``v`` (written ``v*`` in the literature).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Union

EXISTS = "e"
FORALL = "a"

CLAUSE = "clause"
CUBE = "cube"


class QBFError(ValueError):
    """Raised on malformed formulas or QDIMACS input."""


@dataclass(frozen=True)
class Prefix:
    """Quantifier prefix as an ordered tuple of ``(var, quantifier)`` pairs."""

    order: tuple

    def __post_init__(self):
        seen = set()
        for v, q in self.order:
            if not isinstance(v, int) or v < 1:
                raise QBFError(f"bad variable {v!r} in prefix")
            if q not in (EXISTS, FORALL):
                raise QBFError(f"bad quantifier {q!r}")
            if v in seen:
                raise QBFError(f"variable {v} quantified twice")
            seen.add(v)
        if seen and seen != set(range(1, len(seen) + 1)):
            raise QBFError("prefix variables must be exactly 1..n")

    @classmethod
    def from_blocks(cls, blocks: Iterable[tuple[str, Iterable[int]]]) -> "Prefix":
        """Build a prefix from ``(quantifier, vars)`` blocks."""
        order = []
        for q, vs in blocks:
            order.extend((v, q) for v in vs)
        return cls(tuple(order))

    @property
    def nvars(self) -> int:
        return len(self.order)

    @cached_property
    def position(self) -> dict:
        return {v: i + 1 for i, (v, _) in enumerate(self.order)}

    @cached_property
    def quant(self) -> dict:
        return dict(self.order)

    @cached_property
    def block(self) -> dict:
        out = {}
        level = 0
        prev = None
        for v, q in self.order:
            if prev is not None and q != prev:
                level += 1
            out[v] = level
            prev = q
        return out

    @cached_property
    def blocks(self) -> list:
        """Maximal same-quantifier runs as ``(quantifier, [vars])``."""
        out = []
        for v, q in self.order:
            if out and out[-1][0] == q:
                out[-1][1].append(v)
            else:
                out.append((q, [v]))
        return out

    def is_exists(self, v: int) -> bool:
        return self.quant[v] == EXISTS

    def is_forall(self, v: int) -> bool:
        return self.quant[v] == FORALL

    def left_of(self, x: int, y: int) -> bool:
        return self.position[x] < self.position[y]


@dataclass(frozen=True)
class Constraint:
    """A clause or a cube.  ``lits`` is a frozenset of DIMACS literals."""

    kind: str
    lits: frozenset

    def __post_init__(self):
        if self.kind not in (CLAUSE, CUBE):
            raise QBFError(f"bad constraint kind {self.kind!r}")
        if 0 in self.lits:
            raise QBFError("literal 0 is not a literal")

    @classmethod
    def clause(cls, lits: Iterable[int] = ()) -> "Constraint":
        return cls(CLAUSE, frozenset(lits))

    @classmethod
    def cube(cls, lits: Iterable[int] = ()) -> "Constraint":
        return cls(CUBE, frozenset(lits))

    @property
    def is_clause(self) -> bool:
        return self.kind == CLAUSE

    @property
    def is_cube(self) -> bool:
        return self.kind == CUBE

    @property
    def is_empty(self) -> bool:
        return not self.lits

    @cached_property
    def vars(self) -> frozenset:
        return frozenset(abs(l) for l in self.lits)

    @cached_property
    def merged(self) -> frozenset:
        """Variables occurring in both polarities."""
        return frozenset(l for l in self.lits if l > 0 and -l in self.lits)

    def polarity(self, v: int) -> frozenset:
        return frozenset(s for s, l in ((1, v), (-1, -v)) if l in self.lits)

    def width(self) -> int:
        return len(self.vars)

    def sorted_lits(self) -> list:
        return sorted(self.lits, key=lambda l: (abs(l), l < 0))

    def with_lits(self, lits: Iterable[int]) -> "Constraint":
        return Constraint(self.kind, frozenset(lits))

    def __str__(self):
        tag = "l*" if self.is_clause else "c*"
        return " ".join([tag, *map(str, self.sorted_lits()), "0"])

    def __repr__(self):
        return f"Constraint({self})"


def parse_constraint(text: str) -> Constraint:
    """Parse the ``l* ... 0`` / ``c* ... 0`` text form."""
    parts = text.split()
    if not parts or parts[0] not in ("l*", "c*"):
        raise QBFError(f"constraint must start with l* or c*: {text!r}")
    if parts[-1] != "0":
        raise QBFError(f"constraint must end with 0: {text!r}")
    try:
        lits = [int(p) for p in parts[1:-1]]
    except ValueError:
        raise QBFError(f"bad literal in {text!r}") from None
    if 0 in lits:
        raise QBFError(f"stray 0 inside {text!r}")
    kind = CLAUSE if parts[0] == "l*" else CUBE
    return Constraint(kind, frozenset(lits))


@dataclass(frozen=True)
class PCNF:
    """A prenex CNF formula; clause order is kept."""

    prefix: Prefix
    matrix: tuple

    def __post_init__(self):
        known = self.prefix.quant
        for c in self.matrix:
            if not isinstance(c, Constraint) or not c.is_clause:
                raise QBFError("matrix entries must be clauses")
            if c.merged:
                raise QBFError(f"tautological input clause {c}")
            missing = c.vars - known.keys()
            if missing:
                raise QBFError(f"unquantified variables {sorted(missing)}")

    @classmethod
    def build(cls, blocks, clauses) -> "PCNF":
        """Convenience constructor from blocks and lists of ints."""
        return cls(Prefix.from_blocks(blocks),
                   tuple(Constraint.clause(c) for c in clauses))

    @property
    def nvars(self) -> int:
        return self.prefix.nvars

    @property
    def existentials(self) -> list:
        return [v for v, q in self.prefix.order if q == EXISTS]

    @property
    def universals(self) -> list:
        return [v for v, q in self.prefix.order if q == FORALL]


class Status(enum.Enum):
    SATISFIED = "satisfied"
    FALSIFIED = "falsified"


Restriction = Union[Status, Constraint]


def restrict(c: Constraint, a: dict) -> Restriction:
    """Restrict a merge-free constraint by a partial assignment ``{var: bool}``."""
    if c.merged:
        raise QBFError("merged restriction unsupported")
    rest = []
    for l in c.lits:
        val = a.get(abs(l))
        if val is None:
            rest.append(l)
            continue
        true = val == (l > 0)
        if c.is_clause and true:
            return Status.SATISFIED
        if c.is_cube and not true:
            return Status.FALSIFIED
    if not rest:
        return Status.FALSIFIED if c.is_clause else Status.SATISFIED
    return c.with_lits(rest)


def parse_qdimacs(text) -> PCNF:
    """Parse QDIMACS text (str or bytes).

    Variables declared by the header but missing from the prefix are put into
    a leading existential block.
    """
    if isinstance(text, bytes):
        text = text.decode()
    nvars = nclauses = None
    blocks = []
    clauses = []
    pending = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if nvars is not None or len(parts) != 4 or parts[1] != "cnf":
                raise QBFError(f"line {lineno}: malformed header {line!r}")
            try:
                nvars, nclauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise QBFError(f"line {lineno}: malformed header {line!r}") from None
            if nvars < 0 or nclauses < 0:
                raise QBFError(f"line {lineno}: malformed header {line!r}")
            continue
        if nvars is None:
            raise QBFError(f"line {lineno}: data before header")
        if line[0] in "ae":
            if clauses or pending:
                raise QBFError(f"line {lineno}: quantifier line after clauses")
            toks = line.split()
            vs = _ints(toks[1:], lineno)
            if not vs or vs[-1] != 0:
                raise QBFError(f"line {lineno}: quantifier line must end with 0")
            vs = vs[:-1]
            if not vs:
                raise QBFError(f"line {lineno}: empty quantifier block")
            for v in vs:
                if not 1 <= v <= nvars:
                    raise QBFError(f"line {lineno}: variable {v} out of range")
            blocks.append((toks[0], vs))
            continue
        for l in _ints(line.split(), lineno):
            if l == 0:
                clauses.append((lineno, pending))
                pending = []
            elif abs(l) > nvars:
                raise QBFError(f"line {lineno}: variable {abs(l)} out of range")
            else:
                pending.append(l)
    if nvars is None:
        raise QBFError("missing header")
    if pending:
        raise QBFError("last clause not terminated by 0")
    if len(clauses) != nclauses:
        raise QBFError(f"header declares {nclauses} clauses, found {len(clauses)}")

    quantified = {v for _, vs in blocks for v in vs}
    free = [v for v in range(1, nvars + 1) if v not in quantified]
    if free:
        if blocks and blocks[0][0] == EXISTS:
            blocks[0] = (EXISTS, free + blocks[0][1])
        else:
            blocks.insert(0, (EXISTS, free))
    matrix = []
    for lineno, lits in clauses:
        s = set(lits)
        if any(-l in s for l in s):
            raise QBFError(f"line {lineno}: tautological input clause")
        matrix.append(Constraint.clause(s))
    return PCNF(Prefix.from_blocks(blocks), tuple(matrix))


def _ints(toks, lineno):
    try:
        return [int(t) for t in toks]
    except ValueError:
        raise QBFError(f"line {lineno}: non-integer token") from None


def write_qdimacs(f: PCNF) -> str:
    lines = [f"p cnf {f.nvars} {len(f.matrix)}"]
    for q, vs in f.prefix.blocks:
        lines.append(" ".join([q, *map(str, vs), "0"]))
    for c in f.matrix:
        lines.append(" ".join([*map(str, c.sorted_lits()), "0"]))
    return "\n".join(lines) + "\n"
