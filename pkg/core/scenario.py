"""Scenario files: queries paired with the answers a program should give.

A scenario names the programs it runs against (paths relative to the scenario
file) and a list of steps. Each step holds a query and one expectation:

    answers: [{bindings: {X: a}, tv: 0.9, source: rule}, ...]   exact list, in order
    count: 2                                                     number of answers
    none: true                                                   no answers at all
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml
from loguru import logger
from pydantic import BaseModel, Field, NonNegativeInt, ValidationError, model_validator

from .engine import Answer, Engine, QueryTargetError, Source
from .model import Constant
from .query import QueryError, parse_query


class ScenarioError(ValueError):
    """Raised when a scenario file is missing, unreadable or malformed."""


class ExpectedAnswer(BaseModel):
    bindings: Dict[str, Union[str, float]] = Field(default_factory=dict)
    tv: float = Field(ge=0.0, le=1.0)
    source: Optional[Source] = None


class Expectation(BaseModel):
    answers: Optional[List[ExpectedAnswer]] = None
    count: Optional[NonNegativeInt] = None
    none: bool = False

    @model_validator(mode="after")
    def _exactly_one(self) -> "Expectation":
        given = sum([self.answers is not None, self.count is not None, self.none])
        if given != 1:
            raise ValueError("expect needs exactly one of answers, count, none")
        return self


class Step(BaseModel):
    query: str
    expect: Expectation


class Scenario(BaseModel):
    name: str
    programs: List[Path] = Field(default_factory=list)
    steps: List[Step] = Field(min_length=1)
    base_dir: Path = Path(".")

    @property
    def program_paths(self) -> List[Path]:
        return [p if p.is_absolute() else self.base_dir / p for p in self.programs]


@dataclass
class StepResult:
    query: str
    passed: bool
    reasons: List[str] = field(default_factory=list)
    actual: List[Answer] = field(default_factory=list)


def load_scenario(path: Union[str, Path]) -> Scenario:
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as f:
            raw = yaml.safe_load(f)
    except OSError as e:
        raise ScenarioError(f"cannot read {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ScenarioError(f"{path}: invalid YAML: {e}") from e
    if not isinstance(raw, dict):
        raise ScenarioError(f"{path}: expected a mapping at top level")
    try:
        scenario = Scenario.model_validate({**raw, "base_dir": path.parent})
    except ValidationError as e:
        raise ScenarioError(f"{path}: {e}") from e
    logger.debug({"event": "scenario_loaded", "path": str(path), "steps": len(scenario.steps)})
    return scenario


def run_scenario(engine: Engine, scenario: Scenario, tolerance: float = 1e-9) -> List[StepResult]:
    """Run every step against engine and compare with its expectation.

    Query and target errors fail the step; resource errors propagate.
    """
    results: List[StepResult] = []
    for step in scenario.steps:
        try:
            query = parse_query(step.query)
            actual = list(engine.solve(query))
        except QueryError as e:
            results.append(StepResult(step.query, False, [f"query error: {e.diagnostic.message}"]))
            continue
        except QueryTargetError as e:
            results.append(StepResult(step.query, False, [str(e)]))
            continue
        reasons = _compare(step.expect, actual, tolerance)
        results.append(StepResult(step.query, not reasons, reasons, actual))
    failed = sum(not r.passed for r in results)
    logger.info({"event": "scenario", "name": scenario.name, "steps": len(results), "failed": failed})
    return results


def _compare(expect: Expectation, actual: List[Answer], tolerance: float) -> List[str]:
    if expect.none:
        return [] if not actual else [f"expected no answers, got {len(actual)}"]
    if expect.count is not None:
        return [] if len(actual) == expect.count else [f"expected {expect.count} answers, got {len(actual)}"]

    wanted = expect.answers or []
    reasons: List[str] = []
    if len(actual) != len(wanted):
        reasons.append(f"expected {len(wanted)} answers, got {len(actual)}")
    for i, (want, got) in enumerate(zip(wanted, actual)):
        if _normalize(want.bindings) != _normalize(got.bindings):
            reasons.append(f"answer {i}: bindings {dict(got.bindings)} != {want.bindings}")
        if not math.isclose(got.tv, want.tv, rel_tol=0.0, abs_tol=tolerance):
            reasons.append(f"answer {i}: tv {got.tv} != {want.tv}")
        if want.source is not None and got.source is not want.source:
            reasons.append(f"answer {i}: source {got.source.value} != {want.source.value}")
    return reasons


def _normalize(bindings: Dict[str, Any]) -> Dict[str, Constant]:
    # YAML reads 15 as int, the engine holds numeric constants as float
    return {k: float(v) if isinstance(v, (int, float)) and not isinstance(v, bool) else v for k, v in bindings.items()}


__all__ = [
    "ScenarioError",
    "ExpectedAnswer",
    "Expectation",
    "Step",
    "Scenario",
    "StepResult",
    "load_scenario",
    "run_scenario",
]
