import itertools

import pytest
from hypothesis import given, strategies as st

from reqlens.errors import CapacityExceeded
from reqlens.formula import (
    FALSE, TRUE, And, Equality, Implies, Not, Or, QueryPath, atoms, conj, evaluate,
)
from reqlens.logic import (
    Logic, entails, implications_of, satisfiable, simplify, top_level_dnf,
    truth_table_oracle,
)

V = [QueryPath((f"v{i}",)) for i in range(8)]
a, b, c = V[:3]

FORMULAS = st.recursive(
    st.sampled_from(V) | st.sampled_from([TRUE, FALSE]),
    lambda sub: st.one_of(
        sub.map(Not), st.builds(And, sub, sub), st.builds(Or, sub, sub),
        st.builds(Implies, sub, sub)),
    max_leaves=14)


@given(FORMULAS)
def test_solver_agrees_with_truth_table(f):
    result = satisfiable(f)
    assert result.satisfiable == truth_table_oracle(f)
    if result.satisfiable:
        assert evaluate(f, result.witness)


@given(FORMULAS, FORMULAS)
def test_counterexamples_refute_the_entailment(p, q):
    entailed, witness = entails(p, q)
    assert entailed == (not truth_table_oracle(And(p, Not(q))))
    if not entailed:
        assert evaluate(p, witness) and not evaluate(q, witness)


@given(FORMULAS)
def test_entailment_is_reflexive(f):
    assert entails(f, f).entailed


@given(FORMULAS, FORMULAS, FORMULAS)
def test_entailment_is_transitive(p, q, r):
    if entails(p, q).entailed and entails(q, r).entailed:
        assert entails(p, r).entailed


@given(FORMULAS)
def test_simplify_preserves_meaning(f):
    assert truth_table_oracle(simplify(f)) == truth_table_oracle(f)


def test_book_invariant_examples():
    avail, hold, out = (QueryPath((n,)) for n in ("is_available", "is_on_hold",
                                                  "is_checked_out"))
    inv = conj([Implies(hold, Not(avail)), Implies(out, Not(avail)),
                Implies(out, Not(hold)), Implies(avail, Not(out))])
    assert satisfiable(conj([hold, Not(avail), inv])).satisfiable
    assert not satisfiable(conj([out, hold, inv])).satisfiable
    entailed, witness = entails(And(avail, inv), hold)
    assert not entailed
    assert witness == {avail: True, hold: False, out: False}


def test_constants():
    assert satisfiable(TRUE).satisfiable
    assert not satisfiable(FALSE).satisfiable
    assert entails(FALSE, a).entailed


def test_capacity_bound():
    many = conj(QueryPath((f"x{i}",)) for i in range(10))
    with pytest.raises(CapacityExceeded):
        Logic(capacity=9).satisfiable(many)
    assert Logic(capacity=10).satisfiable(many).satisfiable
    with pytest.raises(CapacityExceeded):
        truth_table_oracle(conj(QueryPath((f"x{i}",)) for i in range(21)))


def test_functional_equality_mode():
    speed_is_safe = Equality(("speed",), ("safe",))
    speed_is_max = Equality(("speed",), ("max",))
    both = And(speed_is_safe, speed_is_max)
    assert satisfiable(both).satisfiable
    assert not satisfiable(both, functional_equality=True).satisfiable


def test_top_level_dnf_flattens_nested_disjunctions():
    assert top_level_dnf(Or(a, Or(b, c))) == [a, b, c]
    assert top_level_dnf(And(Or(a, b), c)) == [And(Or(a, b), c)]
    assert top_level_dnf(Not(Not(Or(a, b)))) == [a, b]


def test_implications_of():
    assert implications_of([a, Implies(a, b), Or(a, b)]) == [(a, b)]


@given(FORMULAS)
def test_oracle_matches_row_by_row_enumeration(f):
    names = atoms(f)
    direct = any(evaluate(f, dict(zip(names, row)))
                 for row in itertools.product((False, True), repeat=len(names)))
    assert truth_table_oracle(f) == direct
