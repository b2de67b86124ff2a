import itertools
from pathlib import Path

import numpy as np
import pytest

from core.engine import (
    Comparator,
    Constraint,
    Engine,
    InvalidProgram,
    Query,
    QueryTargetError,
    ResourceLimitError,
    Source,
    TIER_ORDER,
    eval_rule,
    explain,
    solve,
    truth_of,
)
from core.model import BodyAtom, FuzzyFact, PredicateKey, Variable, build_program
from core.parser import SourceUnit, parse_program

PROGRAMS = Path(__file__).resolve().parents[1] / "data" / "programs"
EXPENSIVE = PredicateKey("expensive_car", 1)


def _program(text):
    result = parse_program(SourceUnit(text, "t.rfz"))
    assert result.ok, [str(d) for d in result.diagnostics]
    return result.program


def _bundled(name):
    return _program((PROGRAMS / name).read_text(encoding="utf-8"))


def _query(name, *args, constraints=()):
    atom = BodyAtom(PredicateKey(name, len(args)), tuple(Variable(a) if a[:1].isupper() else a for a in args))
    return Query(atom, tuple(constraints), "V")


@pytest.fixture(scope="module")
def cars():
    return Engine(_bundled("cars.rfz"))


def test_cars_fact(cars):
    answers = list(cars.solve(_query("expensive_car", "alfa_romeo_gt")))
    assert len(answers) == 1
    assert answers[0].tv == pytest.approx(0.6, abs=1e-9)
    assert answers[0].source is Source.FACT
    assert answers[0].bindings == {}


def test_cars_constructive_answers(cars):
    answers = list(cars.solve(_query("expensive_car", "X", constraints=[Constraint(Comparator.GT, 0.8)])))
    assert [(a.bindings["X"], a.tv, a.source) for a in answers] == [
        ("aston_martin_bulldog", 0.9, Source.CONDITIONED_DEFAULT),
        ("lamborghini_urraco", 0.9, Source.CONDITIONED_DEFAULT),
    ]


def test_cars_defaults(cars):
    assert cars.truth_of(EXPENSIVE, ["vw_caddy"]) == (0.5, Source.GENERAL_DEFAULT)
    assert cars.truth_of(EXPENSIVE, ["lamborghini_urraco"]) == (0.9, Source.CONDITIONED_DEFAULT)


def test_cars_type_guard(cars):
    assert cars.truth_of(EXPENSIVE, ["bicycle"]) is None
    assert list(cars.solve(_query("expensive_car", "bicycle"))) == []


def test_cars_nothing_above_max(cars):
    assert list(cars.solve(_query("expensive_car", "X", constraints=[Constraint(Comparator.GT, 0.95)]))) == []


def test_cars_equality_constraint(cars):
    answers = cars.solve(_query("expensive_car", "X", constraints=[Constraint(Comparator.EQ, 0.5)]))
    assert [a.bindings["X"] for a in answers] == ["vw_caddy"]


@pytest.mark.parametrize(
    "age,expected,source",
    [
        (9, 0.0, Source.FUNCTION),
        (9.5, 0.5, Source.FUNCTION),
        (10, 1.0, Source.FUNCTION),
        (15, 1.0, Source.FUNCTION),
        (19, 1.0, Source.FUNCTION),
        (19.5, 0.5, Source.FUNCTION),
        (20, 0.0, Source.FUNCTION),
        (5, 0.0, Source.GENERAL_DEFAULT),
        (25, 0.0, Source.GENERAL_DEFAULT),
    ],
)
def test_teenager(age, expected, source):
    tv, got = truth_of(_bundled("teenager.rfz"), PredicateKey("teenager", 1), [float(age)])
    assert tv == pytest.approx(expected, abs=1e-9)
    assert got is source


def test_teenager_symbolic_argument_fails_guard():
    assert truth_of(_bundled("teenager.rfz"), PredicateKey("teenager", 1), ["fifteen"]) is None


def test_explain(cars):
    trace = cars.explain(EXPENSIVE, ["vw_caddy"])
    assert trace.tiers_tried == TIER_ORDER
    assert (trace.outcome.tv, trace.outcome.source) == (0.5, Source.GENERAL_DEFAULT)
    assert trace.atom == "expensive_car(vw_caddy)"

    trace = explain(cars.program, EXPENSIVE, ["alfa_romeo_gt"])
    assert trace.tiers_tried == (Source.FACT,)
    assert trace.outcome.tv == 0.6

    trace = cars.explain(EXPENSIVE, ["bicycle"])
    assert trace.tiers_tried == ()
    assert trace.outcome is None


def test_good_player_fixture():
    engine = Engine(_bundled("good_player.rfz"))
    good = PredicateKey("good_player", 1)
    assert engine.truth_of(good, ["ann"])[0] == pytest.approx(0.45, abs=1e-12)
    assert engine.truth_of(good, ["bob"])[0] == pytest.approx(0.42, abs=1e-12)
    # tall(cleo) comes from the general default
    assert engine.truth_of(good, ["cleo"])[0] == pytest.approx(0.18, abs=1e-12)


def test_good_player_random_valuations():
    rng = np.random.default_rng(42)
    good = PredicateKey("good_player", 1)
    for _ in range(50):
        s, t, e = (float(v) for v in rng.random(3))
        text = (
            "player(j).\n"
            ":- set_prop swift/1 => player/1.\n:- set_prop tall/1 => player/1.\n"
            ":- set_prop experience/1 => player/1.\n:- set_prop good_player/1 => player/1.\n"
            f"swift(j) value {s!r}.\ntall(j) value {t!r}.\nexperience(j) value {e!r}.\n"
            "good_player(J) cred (min, 0.8) :~ prod swift(J), tall(J), experience(J).\n"
        )
        tv, source = truth_of(_program(text), good, ["j"])
        assert source is Source.RULE
        assert tv == pytest.approx(min(0.8, s * t * e), abs=1e-12)


TIER_TEXT = {
    Source.FACT: "p(5) value 0.1 .",
    Source.FUNCTION: "p :# ([(0, 0.2), (10, 0.2)]).",
    Source.RULE: ":- set_prop q/1 => num/1.\nq(5) value 0.3 .\np(X) :~ min q(X).",
    Source.CONDITIONED_DEFAULT: "special(5).\n:- default(p/1, 0.4) => special/1.",
    Source.GENERAL_DEFAULT: ":- default(p/1, 0.5).",
}
TIER_VALUE = {
    Source.FACT: 0.1,
    Source.FUNCTION: 0.2,
    Source.RULE: 0.3,
    Source.CONDITIONED_DEFAULT: 0.4,
    Source.GENERAL_DEFAULT: 0.5,
}


@pytest.mark.parametrize("first,second", list(itertools.product(TIER_ORDER, TIER_ORDER)))
def test_precedence_pairs(first, second):
    parts = [":- set_prop p/1 => num/1.", "num(5)."]
    parts.extend(TIER_TEXT[t] for t in dict.fromkeys([first, second]))
    engine = Engine(_program("\n".join(parts) + "\n"))
    winner = min(first, second, key=TIER_ORDER.index)
    answers = list(engine.solve(Query(BodyAtom(PredicateKey("p", 1), (5.0,)), (), "V")))
    assert [(a.tv, a.source) for a in answers] == [(TIER_VALUE[winner], winner)]


def test_function_outside_domain_falls_through():
    text = ":- set_prop p/1 => num/1.\nnum(50).\np :# ([(0, 0.2), (10, 0.2)]).\n:- default(p/1, 0.5).\n"
    assert truth_of(_program(text), PredicateKey("p", 1), [50.0]) == (0.5, Source.GENERAL_DEFAULT)


def test_one_answer_per_succeeding_rule():
    text = (
        ":- set_prop p/1 => t/1.\n:- set_prop q/1 => t/1.\n:- set_prop r/1 => t/1.\n"
        "t(a).\nq(a) value 0.3 .\nr(a) value 0.7 .\n"
        "p(X) :~ min q(X).\np(X) :~ min r(X).\n"
    )
    engine = Engine(_program(text))
    answers = list(engine.solve(_query("p", "X")))
    assert [(a.bindings["X"], a.tv) for a in answers] == [("a", 0.3), ("a", 0.7)]
    assert engine.truth_of(PredicateKey("p", 1), ["a"]) == (0.3, Source.RULE)


def test_rule_falls_through_when_body_has_no_value():
    text = (
        ":- set_prop p/1 => t/1.\n:- set_prop q/1 => t/1.\n"
        "t(a).\nt(b).\nq(a) value 0.3 .\n:- default(p/1, 0.5).\n"
        "p(X) :~ min q(X).\n"
    )
    engine = Engine(_program(text))
    assert engine.truth_of(PredicateKey("p", 1), ["a"]) == (0.3, Source.RULE)
    assert engine.truth_of(PredicateKey("p", 1), ["b"]) == (0.5, Source.GENERAL_DEFAULT)


def test_repeated_head_variable():
    text = (
        ":- set_prop same/2 => t/1, t/1.\n:- set_prop q/1 => t/1.\n"
        "t(a).\nt(b).\nq(a) value 0.7 .\nq(b) value 0.4 .\n"
        "same(X, X) :~ min q(X).\n"
    )
    engine = Engine(_program(text))
    same = PredicateKey("same", 2)
    assert engine.truth_of(same, ["a", "a"]) == (0.7, Source.RULE)
    assert engine.truth_of(same, ["a", "b"]) is None
    answers = list(engine.solve(_query("same", "X", "Y")))
    assert [(a.bindings["X"], a.bindings["Y"], a.tv) for a in answers] == [("a", "a", 0.7), ("b", "b", 0.4)]


def test_enumeration_order_is_type_product():
    text = (
        ":- set_prop near/2 => t/1, u/1.\n"
        "t(a).\nt(b).\nu(x).\nu(y).\n:- default(near/2, 0.5).\n"
    )
    answers = list(solve(_program(text), _query("near", "X", "Y")))
    assert [(a.bindings["X"], a.bindings["Y"]) for a in answers] == [("a", "x"), ("a", "y"), ("b", "x"), ("b", "y")]


def test_crisp_bound_variable_backtracks():
    text = (
        ":- set_prop low/1 => r/1.\n:- set_prop close/1 => d/1.\n"
        "r(a).\nr(b).\n"
        "dist(a, 1).\ndist(a, 2).\ndist(b, 9).\n"
        "close :# ([(0, 1), (5, 0)]).\n"
        "low(R) :~ min dist(R, D), close(D).\n"
    )
    engine = Engine(_program(text))
    # first crisp match whose body succeeds wins
    assert engine.truth_of(PredicateKey("low", 1), ["a"]) == (pytest.approx(0.8), Source.RULE)
    # dist(b, 9) is outside close's domain, so the rule gives nothing
    assert engine.truth_of(PredicateKey("low", 1), ["b"]) is None


def test_restaurant_low_distance():
    engine = Engine(_bundled("restaurant.rfz"))
    low = PredicateKey("low_distance", 1)
    expected = {"kenzo": 0.95, "burguer_king": 0.8, "pizza_jardin": 0.35, "subway": 0.5, "derroscas": 0.1}
    for name, tv in expected.items():
        got, source = engine.truth_of(low, [name])
        assert got == pytest.approx(tv, abs=1e-9)
        assert source is Source.RULE


def test_self_recursion_is_a_resource_error():
    text = ":- set_prop p/1 => t/1.\nt(a).\np(X) :~ min p(X).\n"
    with pytest.raises(ResourceLimitError):
        truth_of(_program(text), PredicateKey("p", 1), ["a"])


def test_mutual_recursion_is_a_resource_error():
    text = ":- set_prop p/1 => t/1.\n:- set_prop q/1 => t/1.\nt(a).\np(X) :~ min q(X).\nq(X) :~ max p(X).\n"
    engine = Engine(_program(text))
    with pytest.raises(ResourceLimitError):
        list(engine.solve(_query("q", "X")))


def _chain(n):
    lines = ["t(a)."]
    for i in range(n + 1):
        lines.append(f":- set_prop p{i}/1 => t/1.")
    for i in range(n):
        lines.append(f"p{i}(X) :~ min p{i + 1}(X).")
    lines.append(f"p{n}(a) value 0.25 .")
    return _program("\n".join(lines) + "\n")


def test_depth_limit():
    program = _chain(30)
    assert truth_of(program, PredicateKey("p0", 1), ["a"]) == (0.25, Source.RULE)
    with pytest.raises(ResourceLimitError):
        truth_of(program, PredicateKey("p0", 1), ["a"], depth_limit=10)


def test_deep_chain_is_bounded_by_depth_limit_only():
    program = _chain(3000)
    assert truth_of(program, PredicateKey("p0", 1), ["a"]) == (0.25, Source.RULE)
    assert truth_of(program, PredicateKey("p0", 1), ["a"], depth_limit=3001) == (0.25, Source.RULE)
    with pytest.raises(ResourceLimitError):
        truth_of(program, PredicateKey("p0", 1), ["a"], depth_limit=3000)


def test_anonymous_variables_do_not_share_a_binding():
    text = (
        ":- set_prop p/1 => t/1.\n:- set_prop p2/1 => t/1.\n"
        "t(a).\nd(a, 1).\ne(a, 2).\np2(a) value 0.5 .\n"
        "p(X) :~ min d(X, _), e(X, _), p2(X).\n"
    )
    program = _program(text)
    assert truth_of(program, PredicateKey("p", 1), ["a"]) == (0.5, Source.RULE)


def test_anonymous_head_argument_matches_anything():
    text = (
        ":- set_prop p/2 => t/1, t/1.\n:- set_prop q/1 => t/1.\n"
        "t(a).\nt(b).\nq(a) value 0.7 .\n"
        "p(X, _) :~ max q(X).\n"
    )
    program = _program(text)
    assert truth_of(program, PredicateKey("p", 2), ["a", "b"]) == (0.7, Source.RULE)
    answers = list(solve(program, Query(BodyAtom(PredicateKey("p", 2), (Variable("X"), Variable("_"))), (), None)))
    assert [(a.bindings, a.tv) for a in answers] == [({"X": "a"}, 0.7), ({"X": "a"}, 0.7)]


def test_anonymous_variable_in_fuzzy_body_atom_is_unbound():
    text = ":- set_prop p/1 => t/1.\n:- set_prop q/1 => t/1.\nt(a).\np(X) :~ min d(X), q(_).\nd(a).\n"
    result = parse_program(SourceUnit(text, "t.rfz"))
    assert "unbound-body-variable" in [d.code for d in result.diagnostics]


def test_budget_is_per_instantiation():
    text = ":- set_prop p/1 => t/1.\n" + "".join(f"t(c{i}).\n" for i in range(20)) + ":- default(p/1, 0.5).\n"
    engine = Engine(_program(text), depth_limit=1)
    assert len(list(engine.solve(_query("p", "X")))) == 20


def test_undeclared_query_target(cars):
    with pytest.raises(QueryTargetError):
        list(cars.solve(_query("cheap_car", "X")))


def test_engine_rejects_invalid_program():
    program = build_program([FuzzyFact(PredicateKey("p", 1), ("a",), 0.5)])
    with pytest.raises(InvalidProgram) as exc:
        Engine(program)
    assert exc.value.diagnostics[0].code == "undeclared-predicate"


def test_eval_rule_directly():
    program = _bundled("good_player.rfz")
    [rule] = program.rules[PredicateKey("good_player", 1)]
    assert eval_rule(program, rule, ["ann"]) == pytest.approx(0.45, abs=1e-12)

    text = (
        ":- set_prop p/1 => t/1.\n:- set_prop q/1 => t/1.\n"
        "t(a).\nt(b).\nq(a) value 0.35 .\n"
        "p(X) :~ min q(X).\n"
    )
    program = _program(text)
    [rule] = program.rules[PredicateKey("p", 1)]
    assert eval_rule(program, rule, ["a"]) == 0.35
    assert eval_rule(program, rule, ["b"]) is None
