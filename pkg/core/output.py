from __future__ import annotations

import json
from typing import Any, Dict, Iterable, Iterator, List, Literal, Optional

from .engine import Answer, Query, ResolutionTrace
from .model import Constant, atom_text, format_constant, is_number

OutputFormat = Literal["plain", "json"]


def format_truth(tv: float) -> str:
    return format(tv, ".10g")


def _plain_value(c: Constant) -> str:
    return format_truth(c) if is_number(c) else format_constant(c)


def answer_line(answer: Answer, truth_var: Optional[str]) -> str:
    parts: List[str] = []
    if truth_var is not None:
        parts.append(f"{truth_var} = {format_truth(answer.tv)}")
    parts.extend(f"{var} = {_plain_value(value)}" for var, value in answer.bindings.items())
    return ", ".join(parts) if parts else "yes"


def answer_record(answer: Answer, truth_var: Optional[str]) -> Dict[str, Any]:
    bindings: Dict[str, Any] = {}
    if truth_var is not None:
        bindings[truth_var] = answer.tv
    bindings.update(answer.bindings)
    return {"bindings": bindings, "tv": answer.tv, "source": answer.source.value}


def format_answers(
    answers: Iterable[Answer],
    fmt: OutputFormat = "plain",
    truth_var: Optional[str] = None,
) -> Iterator[str]:
    """Render an answer stream as lines of text.

    plain: one line per answer, `no` when the stream is empty.
    json: a single line holding a JSON array of answer objects.
    """
    if fmt == "json":
        yield json.dumps([answer_record(a, truth_var) for a in answers])
        return
    empty = True
    for a in answers:
        empty = False
        yield answer_line(a, truth_var)
    if empty:
        yield "no"


def format_trace(trace: ResolutionTrace) -> str:
    tiers = ", ".join(t.value for t in trace.tiers_tried) or "-"
    if trace.outcome is None:
        result = "no answer" if trace.tiers_tried else "no answer (type guard)"
    else:
        result = f"{format_truth(trace.outcome.tv)} from {trace.outcome.source.value}"
    return f"% {trace.atom}: tried [{tiers}] -> {result}"


def query_text(query: Query) -> str:
    return atom_text(query.goal.key, query.goal.args)


__all__ = ["OutputFormat", "format_answers", "format_trace", "format_truth", "answer_line", "answer_record", "query_text"]
