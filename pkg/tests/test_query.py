import pytest

from core.engine import Comparator, Constraint
from core.model import PredicateKey, Variable
from core.query import QueryError, parse_query


def test_constructive_query():
    q = parse_query("expensive_car(X,V), V > 0.8")
    assert q.goal.key == PredicateKey("expensive_car", 1)
    assert q.goal.args == (Variable("X"),)
    assert q.truth_var == "V"
    assert q.constraints == (Constraint(Comparator.GT, 0.8),)


def test_ground_numeric_query():
    q = parse_query("teenager(15, V)")
    assert q.goal.args == (15.0,)
    assert q.constraints == ()


def test_literal_truth_slot_is_equality():
    q = parse_query("expensive_car(X, 0.9)")
    assert q.truth_var is None
    assert q.constraints == (Constraint(Comparator.EQ, 0.9),)


def test_anonymous_truth_slot_reports_no_truth_variable():
    q = parse_query("expensive_car(_, _)")
    assert q.goal.args == (Variable("_"),)
    assert q.truth_var is None
    assert q.constraints == ()


def test_prompt_and_terminator_are_optional():
    assert parse_query("?- expensive_car(X, V).") == parse_query("expensive_car(X, V)")


@pytest.mark.parametrize(
    "text,comparator",
    [("V < 0.3", Comparator.LT), ("V =< 0.3", Comparator.LE), ("V <= 0.3", Comparator.LE),
     ("V >= 0.3", Comparator.GE), ("V = 1", Comparator.EQ)],
)
def test_comparators(text, comparator):
    q = parse_query(f"p(a, V), {text}")
    assert q.constraints[0].comparator is comparator


def test_several_constraints():
    q = parse_query("p(X, V), V > 0.2, V < 0.8")
    assert [c.comparator for c in q.constraints] == [Comparator.GT, Comparator.LT]


@pytest.mark.parametrize(
    "text",
    [
        "p(X, V), W > 0.5",
        "p(X, V), V >> 0.5",
        "p(X, V), V ! 0.5",
        "p(V)",
        "p",
        "p(X, V) q",
        "p(X, 1.5)",
        "p(X, X)",
        "p(X, V), V > high",
    ],
)
def test_malformed_queries(text):
    with pytest.raises(QueryError) as exc:
        parse_query(text)
    assert exc.value.diagnostic.code == "query-syntax"
