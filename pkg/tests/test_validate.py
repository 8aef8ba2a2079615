from dataclasses import replace

import pytest

from mutations import KINDS, mutations, trace_pool
from qcdclab.core import Constraint
from qcdclab.corpus import pre_rrs_trapdoor, std_dep_trap, two_php_and_ct
from qcdclab.families import layout
from qcdclab.solver import FALSE, TRUE, DerivationTrace
from qcdclab.trail import Entry, Trail
from qcdclab.validate import validate_trace


def corpus_trace(entry):
    return entry.formula(), entry.config, entry.replay()


def with_triple(tr, i, tri):
    triples = list(tr.triples)
    triples[i - 1] = tri
    return DerivationTrace(triples, tr.verdict, tr.config)


def test_corpus_trace_is_valid():
    f, cfg, tr = corpus_trace(pre_rrs_trapdoor(2))
    res = validate_trace(f, cfg, tr)
    assert res and res.constraint == Constraint.clause()


def test_hand_deleted_universal_is_not_learnable():
    e = two_php_and_ct(2, "std")
    f, cfg, tr = corpus_trace(e)
    g = layout("two_php_and_ct", 2)
    tri = tr.triples[0]
    assert tri.learnt == Constraint.clause([g["v"], -g["z1"]])
    bad = with_triple(tr, 1, replace(tri, learnt=Constraint.clause([-g["z1"]])))
    res = validate_trace(f, cfg, bad)
    assert not res and res.where == 1 and res.code == "not-learnable"


def test_reordered_decisions_violate_lev():
    e = pre_rrs_trapdoor(2)
    f, cfg, tr = corpus_trace(e)
    tri = tr.triples[0]
    es = list(tri.trail.entries)
    dec = [k for k, x in enumerate(es) if x.decision]
    a, b = dec[0], dec[-1]
    es[a], es[b] = es[b], es[a]
    bad = with_triple(tr, 1, replace(tri, trail=Trail(es, tri.trail.outcome)))
    res = validate_trace(f, cfg, bad)
    assert not res and res.code == "policy" and res.step == a + 1


def test_skipped_propagation_is_not_natural():
    e = std_dep_trap(2)
    f, cfg, tr = corpus_trace(e)
    g = layout("std_dep_trap", 2)
    tri = tr.triples[1]
    # second trail starts with the propagation of y-bar; decide p instead
    t = Trail([Entry(g["p"], None), Entry(0, tri.trail.entries[-1].ante)], tri.trail.outcome)
    res = validate_trace(f, cfg, with_triple(tr, 2, replace(tri, trail=t)))
    assert not res and res.where == 2 and res.code == "not-natural" and res.step == 1


def test_wrong_antecedent_index():
    f, cfg, tr = corpus_trace(std_dep_trap(2))
    tri = tr.triples[0]
    es = list(tri.trail.entries)
    es[1] = Entry(es[1].lit, 999)
    res = validate_trace(f, cfg, with_triple(tr, 1, replace(tri, trail=Trail(es, tri.trail.outcome))))
    assert not res and res.code == "bad-antecedent" and res.step == 2


def test_verdict_claim_checked():
    f, cfg, tr = corpus_trace(std_dep_trap(2))
    res = validate_trace(f, cfg, DerivationTrace(tr.triples, TRUE, cfg))
    assert not res and res.code == "verdict"
    assert validate_trace(f, cfg, DerivationTrace(tr.triples, FALSE, cfg))


def test_empty_clause_before_the_end():
    f, cfg, tr = corpus_trace(std_dep_trap(2))
    res = validate_trace(f, cfg, DerivationTrace(tr.triples + tr.triples[1:], FALSE, cfg))
    assert not res and res.where == 2 and res.code == "trailing-triples"


def test_cube_learnt_under_nocube():
    f, cfg, tr = corpus_trace(std_dep_trap(2))
    tri = tr.triples[0]
    bad = with_triple(tr, 1, replace(tri, learnt=Constraint.cube([1])))
    res = validate_trace(f, cfg, bad)
    assert not res and res.code == "not-learnable"


@pytest.fixture(scope="module")
def pool():
    return trace_pool()


def test_pool_is_valid(pool):
    for f, cfg, tr in pool:
        assert validate_trace(f, cfg, tr)


@pytest.mark.parametrize("kind", KINDS)
def test_mutations_are_caught(pool, kind):
    ms = [m for m in mutations(40, seed=7, pool=pool) if m.kind == kind]
    assert len(ms) == 10
    for m in ms:
        res = validate_trace(m.formula, m.config, m.trace)
        assert not res
        assert res.where == m.triple and res.code in m.codes
        if m.step is not None:
            assert res.step == m.step
