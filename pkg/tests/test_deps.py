import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import rrs_by_paths, std_by_paths, trv
from qcdclab.core import EXISTS, FORALL, PCNF, Constraint
from qcdclab.deps import (compute, compute_drrs, compute_dstd, compute_dtrv,
                          preprocess, reduce_clause, reduce_cube)
from qcdclab.families import FAMILIES, generate, layout
from qcdclab.oracle import random_pcnf


def names_of(fam, n, pairs):
    inv = {v: k for k, v in layout(fam, n).items()}
    return {(inv[x], inv[y]) for x, y in pairs}


def test_trv_small():
    f = PCNF.build([(EXISTS, [1]), (FORALL, [2]), (EXISTS, [3])], [])
    assert compute_dtrv(f).pairs == {(1, 2), (2, 3)}
    g = PCNF.build([(EXISTS, [1, 2])], [])
    assert compute_dtrv(g).pairs == frozenset()


def test_trv_double_long_eq():
    n = 3
    g = layout("double_long_eq", n)
    d = compute_dtrv(generate("double_long_eq", n))
    want = {(g[("x", i)], g[("u", j)]) for i in range(1, n + 1) for j in range(1, n + 1)}
    want |= {(g[("u", i)], g[("t", j)]) for i in range(1, n + 1) for j in range(1, n + 1)}
    assert d.pairs == want


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_two_php_and_ct_fingerprints(n):
    f = generate("two_php_and_ct", n)
    assert compute_drrs(f).universal_pairs() == frozenset()
    got = names_of("two_php_and_ct", n, compute_dstd(f).universal_pairs())
    want = {("v", "z1"), ("v", "z2")}
    for k, _ in layout("two_php_and_ct", n).items():
        if isinstance(k, tuple) and k[0] in ("x", "y"):
            want.add(("u", k))
    assert got == want


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_pre_rrs_trapdoor_fingerprint(n):
    f = generate("pre_rrs_trapdoor", n)
    got = names_of("pre_rrs_trapdoor", n, compute_drrs(f).universal_pairs())
    assert got == {("u", "b"), ("v", "b"), ("p", "q")}


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_std_dep_trap_fingerprint(n):
    f = generate("std_dep_trap", n)
    got = names_of("std_dep_trap", n, compute_dstd(f).universal_pairs())
    assert got == {("w1", "e1"), ("w2", "e2"), ("u", "x")}


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_double_long_eq_schemes_coincide(n):
    f = generate("double_long_eq", n)
    t = compute_dtrv(f).pairs
    assert compute_drrs(f).pairs == t
    assert compute_dstd(f).pairs == t


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_nesting_on_families(family, n):
    f = generate(family, n)
    r, s, t = (compute(k, f).pairs for k in ("rrs", "std", "trv"))
    assert r <= s <= t
    for k in ("rrs", "std", "trv"):
        compute(k, f).check()


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_against_path_enumeration(seed):
    f = random_pcnf(seed, max_vars=10, max_clauses=12)
    assert compute_dtrv(f).pairs == trv(f)
    assert compute_dstd(f).pairs == std_by_paths(f)
    assert compute_drrs(f).pairs == rrs_by_paths(f)


@pytest.mark.parametrize("family", FAMILIES)
def test_families_against_path_enumeration(family):
    f = generate(family, 2)
    assert compute_dstd(f).pairs == std_by_paths(f)
    assert compute_drrs(f).pairs == rrs_by_paths(f)


def test_reduce_clause_examples():
    n = 2
    f = generate("std_dep_trap", n)
    g = layout("std_dep_trap", n)
    a, c, u, y = g["a"], g["c"], g["u"], g["y"]
    assert reduce_clause(Constraint.clause([-c, u]), compute_dtrv(f)) == Constraint.clause([-c])
    d = compute_dstd(f)
    assert reduce_clause(Constraint.clause([-a, u, -y]), d) == Constraint.clause([-a, -y])
    assert reduce_clause(Constraint.clause([u, -u]), d) == Constraint.clause()


def test_reduce_cube_examples():
    n = 3
    f = generate("double_long_eq", n)
    g = layout("double_long_eq", n)
    x1, u1 = g[("x", 1)], g[("u", 1)]
    ts = [g[("t", j)] for j in range(1, n + 1)]
    d = compute_dtrv(f)
    assert reduce_cube(Constraint.cube([x1, -u1, -ts[0]] + ts[1:]), d) == Constraint.cube([x1, -u1])
    assert reduce_cube(Constraint.cube([x1, -u1]), d) == Constraint.cube([x1, -u1])
    assert reduce_cube(Constraint.cube([x1, ts[0]]), d) == Constraint.cube()


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from(["trv", "std", "rrs"]), st.randoms())
def test_reduction_idempotent_and_through_trv(seed, scheme, rnd):
    f = random_pcnf(seed)
    d, dt = compute(scheme, f), compute_dtrv(f)
    n = f.prefix.nvars
    for _ in range(10):
        lits = {v if rnd.random() < 0.5 else -v for v in rnd.sample(range(1, n + 1), min(n, 4))}
        if rnd.random() < 0.3:
            v = rnd.randint(1, n)
            lits |= {v, -v}
        for red in (reduce_clause, reduce_cube):
            kind = "clause" if red is reduce_clause else "cube"
            c = Constraint(kind, frozenset(lits))
            r = red(c, d)
            assert red(r, d) == r
            assert red(red(c, dt), d) == r


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_preprocess_pre_rrs_trapdoor_drops_w(n):
    f = generate("pre_rrs_trapdoor", n)
    w = layout("pre_rrs_trapdoor", n)["w"]
    g = preprocess(f, compute_drrs(f))
    assert g.prefix == f.prefix
    assert list(g.matrix) == [c.with_lits(l for l in c.lits if abs(l) != w) for c in f.matrix]
    assert any(w in c.vars for c in f.matrix)


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_preprocess_double_long_eq_identity(n):
    f = generate("double_long_eq", n)
    assert preprocess(f, compute_dtrv(f)) == f


@pytest.mark.parametrize("family", FAMILIES)
def test_preprocess_std_equals_trv_families(family):
    for n in (1, 2, 3):
        f = generate(family, n)
        assert preprocess(f, compute_dstd(f)) == preprocess(f, compute_dtrv(f))


def test_preprocess_std_equals_trv_random():
    for seed in range(200):
        f = random_pcnf(seed)
        assert preprocess(f, compute_dstd(f)) == preprocess(f, compute_dtrv(f))


def test_dump_format():
    f = PCNF.build([(EXISTS, [1]), (FORALL, [2]), (EXISTS, [3])], [[1, 2, 3]])
    assert compute_dtrv(f).dump() == "d 1 2\nd 2 3\n"


def test_unknown_scheme():
    with pytest.raises(ValueError):
        compute("nope", generate("php", 1))
