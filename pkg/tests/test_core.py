import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcdclab.core import (EXISTS, FORALL, PCNF, Constraint, Prefix, QBFError,
                          Status, parse_constraint, parse_qdimacs, restrict,
                          write_qdimacs)
from qcdclab.families import FAMILIES, generate
from qcdclab.oracle import random_pcnf


def test_parse_small():
    f = parse_qdimacs("p cnf 2 1\na 1 0\ne 2 0\n1 2 0\n")
    assert f.prefix.order == ((1, FORALL), (2, EXISTS))
    assert f.matrix == (Constraint.clause([1, 2]),)


def test_parse_bytes_and_comments():
    f = parse_qdimacs(b"c hello\np cnf 2 1\ne 1 2 0\n-1 2 0\n")
    assert f.matrix == (Constraint.clause([-1, 2]),)


def test_free_variables_join_leading_exists_block():
    f = parse_qdimacs("p cnf 3 1\na 2 0\ne 3 0\n1 2 3 0\n")
    assert f.prefix.blocks[0] == (EXISTS, [1])
    g = parse_qdimacs("p cnf 3 1\ne 2 0\na 3 0\n1 2 3 0\n")
    assert g.prefix.blocks[0] == (EXISTS, [1, 2])


@pytest.mark.parametrize("text, msg", [
    ("p cnf 2\n1 2 0\n", "malformed header"),
    ("p cnf 1 1\ne 1 0\n1 2 0\n", "out of range"),
    ("p cnf 1 1\ne 1 0\n1 -1 0\n", "tautological"),
    ("p cnf 1 1\ne 0\n1 0\n", "empty quantifier block"),
    ("p cnf 1 2\ne 1 0\n1 0\n", "declares 2 clauses"),
    ("p cnf 1 1\ne 1 0\n1\n", "not terminated"),
    ("1 0\n", "before header"),
])
def test_parse_errors(text, msg):
    with pytest.raises(QBFError, match=msg):
        parse_qdimacs(text)


@pytest.mark.parametrize("family", FAMILIES)
def test_round_trip_families(family):
    f = generate(family, 2)
    assert parse_qdimacs(write_qdimacs(f)) == f


def test_round_trip_double_long_eq_clause_list():
    f = generate("double_long_eq", 2)
    assert list(parse_qdimacs(write_qdimacs(f)).matrix) == list(f.matrix)


def test_write_empty_matrix_and_empty_clause():
    f = PCNF.build([(EXISTS, [1, 2])], [])
    assert write_qdimacs(f).splitlines() == ["p cnf 2 0", "e 1 2 0"]
    g = PCNF.build([(EXISTS, [1])], [[]])
    assert write_qdimacs(g).splitlines()[-1] == "0"
    assert parse_qdimacs(write_qdimacs(g)) == g


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_round_trip_random(seed):
    f = random_pcnf(seed)
    assert parse_qdimacs(write_qdimacs(f)) == f


def test_prefix_blocks_and_positions():
    p = Prefix.from_blocks([(EXISTS, [2, 1]), (FORALL, [3]), (EXISTS, [4])])
    assert [p.position[v] for v in (2, 1, 3, 4)] == [1, 2, 3, 4]
    assert [p.block[v] for v in (2, 1, 3, 4)] == [0, 0, 1, 2]
    assert p.left_of(2, 3) and not p.left_of(4, 1)
    blocks = [p.block[v] for v, _ in p.order]
    assert blocks == sorted(blocks)


def test_prefix_rejects_bad_orders():
    with pytest.raises(QBFError):
        Prefix.from_blocks([(EXISTS, [1, 1])])
    with pytest.raises(QBFError):
        Prefix.from_blocks([(EXISTS, [1, 3])])


def test_pcnf_rejects_merged_and_unquantified():
    with pytest.raises(QBFError):
        PCNF.build([(EXISTS, [1])], [[1, -1]])
    with pytest.raises(QBFError):
        PCNF.build([(EXISTS, [1])], [[2]])


def test_constraint_text_form():
    c = Constraint.clause([3, -1, -3])
    assert str(c) == "l* -1 3 -3 0"
    assert c.merged == {3}
    assert parse_constraint(str(c)) == c
    t = Constraint.cube([])
    assert str(t) == "c* 0" and parse_constraint("c* 0") == t
    for bad in ("1 2 0", "l* 1 2", "l* 1 x 0", "c* 1 0 2 0"):
        with pytest.raises(QBFError):
            parse_constraint(bad)


def test_restrict_examples():
    assert restrict(Constraint.clause([1, 2]), {1: False}) == Constraint.clause([2])
    assert restrict(Constraint.cube([1, -3]), {1: True}) == Constraint.cube([-3])
    assert restrict(Constraint.clause([1, 2]), {1: False, 2: False}) == Status.FALSIFIED
    assert restrict(Constraint.clause([1, 2]), {2: True}) == Status.SATISFIED
    assert restrict(Constraint.cube([1, 2]), {2: False}) == Status.FALSIFIED
    assert restrict(Constraint.cube([1, 2]), {1: True, 2: True}) == Status.SATISFIED
    with pytest.raises(QBFError, match="merged restriction unsupported"):
        restrict(Constraint.clause([1, -1]), {})


@settings(max_examples=200, deadline=None)
@given(st.sets(st.integers(-6, 6).filter(bool), max_size=5),
       st.dictionaries(st.integers(1, 6), st.booleans()),
       st.dictionaries(st.integers(1, 6), st.booleans()),
       st.sampled_from(["clause", "cube"]))
def test_restrict_composes(lits, a, b, kind):
    lits = {l for l in lits if -l not in lits}
    c = Constraint(kind, frozenset(lits))
    b = {k: v for k, v in b.items() if k not in a}
    full = restrict(c, {**a, **b})
    first = restrict(c, a)
    if isinstance(first, Status):
        assert full == first
    else:
        assert restrict(first, b) == full


def test_negation_involution():
    for l in (1, -1, 7, -7):
        assert -(-l) == l
