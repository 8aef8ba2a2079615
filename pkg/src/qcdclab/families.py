"""Generators for the formula families used in the separation experiments.

Variables are numbered in prefix order starting at 1.  ``layout(family, n)``
returns the name -> variable map used by each generator, so tests and scripts
can refer to ``"u"`` or ``("x", 3)`` instead of raw integers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import EXISTS, FORALL, PCNF

FAMILIES = ("php", "equality", "double_long_eq", "two_php_and_ct",
            "pre_rrs_trapdoor", "std_dep_trap")


@dataclass(frozen=True)
class FamilySpec:
    family: str
    n: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 1:
            raise ValueError("n must be at least 1")

    def __str__(self):
        return f"{self.family}:{self.n}"

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        name, _, n = text.partition(":")
        try:
            return cls(name, int(n))
        except ValueError as e:
            raise ValueError(f"bad family spec {text!r}: {e}") from None


class _Numbering:
    """Hands out variable ids in prefix order and records names."""

    def __init__(self):
        self.names = {}
        self.blocks = []

    def add(self, q, *names):
        ids = []
        for name in names:
            v = len(self.names) + 1
            self.names[name] = v
            ids.append(v)
        if self.blocks and self.blocks[-1][0] == q:
            self.blocks[-1][1].extend(ids)
        else:
            self.blocks.append((q, ids))
        return ids


def php_clauses(n, var):
    """PHP with n holes and n+1 pigeons; ``var(i, j)`` gives the id of x_ij."""
    out = [[var(i, j) for j in range(1, n + 1)] for i in range(1, n + 2)]
    for i in range(1, n + 2):
        for k in range(i + 1, n + 2):
            for j in range(1, n + 1):
                out.append([-var(i, j), -var(k, j)])
    return out


def _php_var(tag, names):
    return lambda i, j: names[(tag, i, j)]


def _php_names(tag, n):
    return [(tag, i, j) for i in range(1, n + 2) for j in range(1, n + 1)]


def _layout_php(n):
    nb = _Numbering()
    nb.add(EXISTS, *_php_names("x", n))
    clauses = php_clauses(n, _php_var("x", nb.names))
    return nb, clauses


def _layout_equality(n, double):
    nb = _Numbering()
    nb.add(EXISTS, *[("x", i) for i in range(1, n + 1)])
    nb.add(FORALL, *[("u", i) for i in range(1, n + 1)])
    nb.add(EXISTS, *[("t", i) for i in range(1, n + 1)])
    x = lambda i: nb.names[("x", i)]
    u = lambda i: nb.names[("u", i)]
    t = lambda i: nb.names[("t", i)]
    rng = range(1, n + 1)
    clauses = [[-t(i) for i in rng]]
    for i in rng:
        clauses.append([x(i), u(i), t(i)])
        clauses.append([-x(i), -u(i), t(i)])
    if double:
        clauses.append([-u(i) for i in rng] + [-t(i) for i in rng])
        clauses.append([-u(i) for i in rng] + [t(i) for i in rng])
    return nb, clauses


def _layout_two_php_and_ct(n):
    nb = _Numbering()
    nb.add(FORALL, "u")
    nb.add(EXISTS, *_php_names("x", n))
    nb.add(EXISTS, *_php_names("y", n))
    nb.add(FORALL, "v")
    nb.add(EXISTS, "z1", "z2")
    u, v, z1, z2 = (nb.names[k] for k in ("u", "v", "z1", "z2"))
    clauses = [[u] + c for c in php_clauses(n, _php_var("x", nb.names))]
    clauses += [[-u] + c for c in php_clauses(n, _php_var("y", nb.names))]
    clauses += [[v, z1, z2], [v, -z1, z2], [v, z1, -z2], [v, -z1, -z2]]
    return nb, clauses


def _layout_pre_rrs_trapdoor(n):
    s = n * (n + 1)
    nb = _Numbering()
    nb.add(EXISTS, "a")
    nb.add(FORALL, "p")
    nb.add(EXISTS, *[("y", i) for i in range(1, s + 1)])
    nb.add(FORALL, "w", "v")
    nb.add(EXISTS, "t")
    nb.add(EXISTS, *_php_names("x", n))
    nb.add(FORALL, "u")
    nb.add(EXISTS, "b", "q", "r", "s")
    g = nb.names
    a, p, w, v, t, u, b, q, r, s_ = (g[k] for k in "apwvtubqrs")
    xs = [g[k] for k in _php_names("x", n)]
    ys = [g[("y", i)] for i in range(1, s + 1)]
    clauses = php_clauses(n, _php_var("x", g))
    for y_i, x_i in zip(ys, xs):
        clauses.append([-y_i, x_i, u, b])
        clauses.append([y_i, -x_i, u, b])
    for y_i in ys:
        clauses.append([y_i, w, v, t, b])
        clauses.append([y_i, w, v, -t, b])
        clauses.append([-y_i, w, v, t, b])
        clauses.append([-y_i, w, v, -t, b])
    clauses += [[-u, -b], [v, -b, -r], [-v, b, s_], [a, -b], [-a, -b], [p, q], [-p, -q]]
    return nb, clauses


def _layout_std_dep_trap(n):
    nb = _Numbering()
    nb.add(EXISTS, "b")
    nb.add(FORALL, "w1")
    nb.add(EXISTS, *_php_names("z", n))
    nb.add(FORALL, "w2")
    nb.add(EXISTS, "a", "d", "c")
    nb.add(FORALL, "u")
    nb.add(EXISTS, "x", "y", "p", "e1", "e2")
    g = nb.names
    b, w1, w2, a, d, c, u, x, y, p, e1, e2 = (
        g[k] for k in ("b", "w1", "w2", "a", "d", "c", "u", "x", "y", "p", "e1", "e2"))
    clauses = [[-b] + cl for cl in php_clauses(n, _php_var("z", g))]
    clauses += [[y, p], [y, -p], [w1, e1], [w2, e2], [b, y], [a, -y], [-a, x],
                [-c, u, -x], [d, c, -y], [-d, c, -y]]
    return nb, clauses


def _build(family, n):
    if family == "php":
        return _layout_php(n)
    if family == "equality":
        return _layout_equality(n, double=False)
    if family == "double_long_eq":
        return _layout_equality(n, double=True)
    if family == "two_php_and_ct":
        return _layout_two_php_and_ct(n)
    if family == "pre_rrs_trapdoor":
        return _layout_pre_rrs_trapdoor(n)
    if family == "std_dep_trap":
        return _layout_std_dep_trap(n)
    raise ValueError(f"unknown family {family!r}")


def generate(spec, n: int | None = None) -> PCNF:
    """generate(FamilySpec) or generate(family_name, n)."""
    if not isinstance(spec, FamilySpec):
        spec = FamilySpec(spec, n)
    nb, clauses = _build(spec.family, spec.n)
    return PCNF.build(nb.blocks, clauses)


def layout(spec, n: int | None = None) -> dict:
    """Name -> variable id for a family instance.

    Simple names are strings (``"u"``, ``"z1"``); indexed ones are tuples such
    as ``("x", 2)`` or, for pigeonhole variables, ``("x", i, j)``.
    """
    if not isinstance(spec, FamilySpec):
        spec = FamilySpec(spec, n)
    nb, _ = _build(spec.family, spec.n)
    return dict(nb.names)
