import json

from core.engine import Answer, ResolutionTrace, Source
from core.model import PredicateKey
from core.output import format_answers, format_trace

CARS = [
    Answer({"X": "aston_martin_bulldog"}, 0.9, Source.CONDITIONED_DEFAULT),
    Answer({"X": "lamborghini_urraco"}, 0.9, Source.CONDITIONED_DEFAULT),
]


def test_plain_answers():
    assert list(format_answers(CARS, "plain", "V")) == [
        "V = 0.9, X = aston_martin_bulldog",
        "V = 0.9, X = lamborghini_urraco",
    ]


def test_plain_empty_stream():
    assert list(format_answers([], "plain", "V")) == ["no"]


def test_plain_ground_literal_query():
    assert list(format_answers([Answer({}, 0.9, Source.RULE)], "plain", None)) == ["yes"]


def test_plain_numbers():
    lines = list(format_answers([Answer({"A": 15.0}, 1 / 3, Source.FUNCTION)], "plain", "V"))
    assert lines == ["V = 0.3333333333, A = 15"]


def test_json_single_answer():
    [line] = format_answers([Answer({}, 0.6, Source.FACT)], "json", "V")
    assert json.loads(line) == [{"bindings": {"V": 0.6}, "tv": 0.6, "source": "fact"}]


def test_json_stream_is_one_array():
    lines = list(format_answers(CARS, "json", "V"))
    assert len(lines) == 1
    data = json.loads(lines[0])
    assert [d["bindings"]["X"] for d in data] == ["aston_martin_bulldog", "lamborghini_urraco"]
    assert {d["source"] for d in data} == {"conditionedDefault"}
    assert json.loads(next(format_answers([], "json", "V"))) == []


def test_trace_lines():
    key = PredicateKey("expensive_car", 1)
    found = ResolutionTrace(key, ("vw_caddy",), tuple(Source), Answer({}, 0.5, Source.GENERAL_DEFAULT))
    assert format_trace(found) == (
        "% expensive_car(vw_caddy): tried [fact, function, rule, conditionedDefault, generalDefault]"
        " -> 0.5 from generalDefault"
    )
    guarded = ResolutionTrace(key, ("bicycle",), (), None)
    assert format_trace(guarded) == "% expensive_car(bicycle): tried [-] -> no answer (type guard)"
