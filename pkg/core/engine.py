from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Generator, Iterator, List, Mapping, Optional, Sequence, Set, Tuple, Union

from loguru import logger

from .aggregation import apply_connective, interpolate
from .diagnostics import Diagnostic, has_errors
from .model import (
    ANONYMOUS,
    BodyAtom,
    Constant,
    FuzzyRule,
    PredicateKey,
    Program,
    TruthValue,
    Variable,
    admits,
    atom_text,
    individuals_of_type,
    is_number,
)
from .validate import validate

DEFAULT_DEPTH_LIMIT = 10_000


class Source(str, Enum):
    FACT = "fact"
    FUNCTION = "function"
    RULE = "rule"
    CONDITIONED_DEFAULT = "conditionedDefault"
    GENERAL_DEFAULT = "generalDefault"


TIER_ORDER: Tuple[Source, ...] = tuple(Source)


class Comparator(str, Enum):
    LT = "<"
    LE = "=<"
    GT = ">"
    GE = ">="
    EQ = "="

    def holds(self, value: float, bound: float) -> bool:
        if self is Comparator.LT:
            return value < bound
        if self is Comparator.LE:
            return value <= bound
        if self is Comparator.GT:
            return value > bound
        if self is Comparator.GE:
            return value >= bound
        return value == bound


@dataclass(frozen=True)
class Constraint:
    comparator: Comparator
    bound: TruthValue

    def holds(self, tv: TruthValue) -> bool:
        return self.comparator.holds(tv, self.bound)

    def __str__(self) -> str:
        return f"{self.comparator.value} {self.bound}"


@dataclass(frozen=True)
class Query:
    goal: BodyAtom
    constraints: Tuple[Constraint, ...] = ()
    truth_var: Optional[str] = None


@dataclass(frozen=True)
class Answer:
    bindings: Mapping[str, Constant]
    tv: TruthValue
    source: Source


@dataclass(frozen=True)
class ResolutionTrace:
    key: PredicateKey
    args: Tuple[Constant, ...]
    tiers_tried: Tuple[Source, ...]
    outcome: Optional[Answer]

    @property
    def atom(self) -> str:
        return atom_text(self.key, self.args)


class InvalidProgram(Exception):
    """Raised when an engine is built over a program that fails validation."""

    def __init__(self, diagnostics: List[Diagnostic]) -> None:
        errors = [d for d in diagnostics if d.is_error]
        super().__init__(f"program has {len(errors)} error(s); first: {errors[0] if errors else '-'}")
        self.diagnostics = diagnostics


class QueryTargetError(ValueError):
    """Raised when a query names a predicate the program does not type."""


class ResourceLimitError(RuntimeError):
    """Raised when resolving an atom exceeds the depth limit or recurses on itself."""


@dataclass
class _Budget:
    limit: int
    used: int = 0
    active: Set[Tuple[PredicateKey, Tuple[Constant, ...]]] = field(default_factory=set)


@dataclass(frozen=True)
class _Need:
    key: PredicateKey
    args: Tuple[Constant, ...]


@dataclass(frozen=True)
class _Found:
    tv: TruthValue
    source: Source


Step = Union[_Need, _Found]
Reply = Optional[Tuple[TruthValue, Source]]

class Engine:
    """Answers queries over one immutable program.

    The engine holds no mutable state between calls, so one instance may serve
    any number of threads.
    """

    def __init__(self, program: Program, depth_limit: int = DEFAULT_DEPTH_LIMIT, *, check: bool = True) -> None:
        if check:
            diags = validate(program)
            if has_errors(diags):
                raise InvalidProgram(diags)
        if depth_limit < 1:
            raise ValueError("depth_limit must be positive")
        self.program = program
        self.depth_limit = depth_limit

    # -- single atoms ----------------------------------------------------

    def truth_of(self, key: PredicateKey, args: Sequence[Constant]) -> Optional[Tuple[TruthValue, Source]]:
        """First truth value of a ground atom following the precedence tiers, or None."""
        budget = self._budget()
        return next(self._drive(self._atom_steps(key, tuple(args), budget), budget), None)

    def explain(self, key: PredicateKey, args: Sequence[Constant]) -> ResolutionTrace:
        args = tuple(args)
        tried: List[Source] = []
        budget = self._budget()
        found = next(self._drive(self._atom_steps(key, args, budget, tried), budget), None)
        outcome = Answer({}, found[0], found[1]) if found else None
        return ResolutionTrace(key, args, tuple(tried), outcome)

    def eval_rule(self, rule: FuzzyRule, args: Sequence[Constant]) -> Optional[TruthValue]:
        budget = self._budget()
        found = next(self._drive(self._single_rule(rule, tuple(args)), budget), None)
        return found[0] if found else None

    # -- queries ---------------------------------------------------------

    def solve(self, query: Query) -> Iterator[Answer]:
        """Lazily yield the answers to query in enumeration order."""
        goal = query.goal
        sig = self.program.signatures.get(goal.key)
        if sig is None:
            raise QueryTargetError(f"{goal.key} has no set_prop declaration")

        # each `_` is its own slot, enumerated but never reported
        slots: List[Union[str, int, None]] = []
        for i, arg in enumerate(goal.args):
            if not isinstance(arg, Variable):
                slots.append(None)
            else:
                slots.append(i if arg.anonymous else arg.name)
        variables: List[Union[str, int]] = []
        domains: List[Tuple[Constant, ...]] = []
        for i, slot in enumerate(slots):
            if slot is not None and slot not in variables:
                variables.append(slot)
                domains.append(individuals_of_type(self.program, sig.argument_types[i]))

        for combo in itertools.product(*domains):
            env = dict(zip(variables, combo))
            args = tuple(a if slot is None else env[slot] for a, slot in zip(goal.args, slots))
            bindings = {k: v for k, v in env.items() if isinstance(k, str)}
            budget = self._budget()
            for tv, source in self._drive(self._atom_steps(goal.key, args, budget), budget):
                if all(c.holds(tv) for c in query.constraints):
                    yield Answer(dict(bindings), tv, source)

    # -- resolution ------------------------------------------------------
    #
    # Each atom is resolved by a step generator that yields _Need(key, args)
    # when a body atom must be resolved first and _Found(tv, source) for each
    # value it produces. _drive runs them on an explicit stack, so nesting
    # depth is bounded by depth_limit and not by the interpreter stack.

    def _budget(self) -> _Budget:
        return _Budget(self.depth_limit)

    def _drive(self, root: Iterator[Step], budget: _Budget) -> Iterator[Tuple[TruthValue, Source]]:
        """Run root to completion, yielding its values; nested atoms give their first value."""
        stack: List[Iterator[Step]] = [root]
        reply: Reply = None
        while stack:
            try:
                step = stack[-1].send(reply)
            except StopIteration:
                stack.pop()
                reply = None
                continue
            reply = None
            if isinstance(step, _Need):
                stack.append(self._atom_steps(step.key, step.args, budget))
            elif len(stack) == 1:
                yield step.tv, step.source
            else:
                stack.pop().close()
                reply = (step.tv, step.source)

    def _atom_steps(
        self,
        key: PredicateKey,
        args: Tuple[Constant, ...],
        budget: _Budget,
        tried: Optional[List[Source]] = None,
    ) -> Iterator[Step]:
        """Resolve a ground atom.

        Rule tier yields one value per succeeding rule; every other tier at
        most one. A tier is consulted only when all higher tiers gave nothing.
        """
        program = self.program
        sig = program.signatures.get(key)
        if sig is None or len(args) != key.arity:
            return
        if not all(admits(program, t, c) for t, c in zip(sig.argument_types, args)):
            return

        atom = (key, args)
        if atom in budget.active:
            logger.warning({"event": "recursion", "atom": atom_text(key, args)})
            raise ResourceLimitError(f"{atom_text(key, args)} depends on itself")
        budget.used += 1
        if budget.used > budget.limit:
            logger.warning({"event": "depth_limit", "atom": atom_text(key, args), "limit": budget.limit})
            raise ResourceLimitError(f"more than {budget.limit} atom resolutions while answering {atom_text(key, args)}")

        def mark(source: Source) -> None:
            if tried is not None:
                tried.append(source)

        mark(Source.FACT)
        fact = program.fuzzy_facts.get(atom)
        if fact is not None:
            yield _Found(fact.tv, Source.FACT)
            return

        mark(Source.FUNCTION)
        fn = program.functions.get(key)
        if fn is not None and is_number(args[0]):
            tv = interpolate(fn, args[0])
            if tv is not None:
                yield _Found(tv, Source.FUNCTION)
                return

        mark(Source.RULE)
        produced = False
        for rule in program.rules.get(key, ()):
            # the atom stays active only while its rule body runs
            budget.active.add(atom)
            try:
                tv = yield from self._rule_steps(rule, args)
            finally:
                budget.active.discard(atom)
            if tv is not None:
                produced = True
                yield _Found(tv, Source.RULE)
        if produced:
            return

        mark(Source.CONDITIONED_DEFAULT)
        for decl in program.conditioned_defaults.get(key, ()):
            if program.has_crisp(decl.condition, args):
                yield _Found(decl.tv, Source.CONDITIONED_DEFAULT)
                return

        mark(Source.GENERAL_DEFAULT)
        general = program.general_defaults.get(key)
        if general is not None:
            yield _Found(general.tv, Source.GENERAL_DEFAULT)

    def _single_rule(self, rule: FuzzyRule, args: Tuple[Constant, ...]) -> Iterator[Step]:
        tv = yield from self._rule_steps(rule, args)
        if tv is not None:
            yield _Found(tv, Source.RULE)

    def _rule_steps(
        self, rule: FuzzyRule, args: Tuple[Constant, ...]
    ) -> Generator[Step, Reply, Optional[TruthValue]]:
        env: Dict[str, Constant] = {}
        for var, value in zip(rule.head_vars, args):
            if var != ANONYMOUS and env.setdefault(var, value) != value:
                return None
        values = yield from self._body_steps(rule.body, 0, env)
        if values is None:
            return None
        result = apply_connective(rule.body_op, values)
        if rule.credibility is not None:
            result = apply_connective(rule.credibility.op, [rule.credibility.value, result])
        if not (0.0 <= result <= 1.0):
            raise ArithmeticError(f"rule for {rule.head} produced {result} outside [0,1]")
        return result

    def _body_steps(
        self, body: Tuple[BodyAtom, ...], i: int, env: Dict[str, Constant]
    ) -> Generator[Step, Reply, Optional[List[TruthValue]]]:
        """First solution of body[i:], left to right, backtracking over crisp matches."""
        if i == len(body):
            return []
        atom = body[i]
        program = self.program
        if program.is_fuzzy_predicate(atom.key):
            args = tuple(env[a.name] if isinstance(a, Variable) else a for a in atom.args)
            found = yield _Need(atom.key, args)
            if found is None:
                return None
            rest = yield from self._body_steps(body, i + 1, env)
            return None if rest is None else [found[0], *rest]

        for fact in program.crisp_facts_for(atom.key):
            extended = _match(atom.args, fact.args, env)
            if extended is None:
                continue
            rest = yield from self._body_steps(body, i + 1, extended)
            if rest is not None:
                return [1.0, *rest]
        return None


def _match(pattern: Tuple, values: Tuple[Constant, ...], env: Dict[str, Constant]) -> Optional[Dict[str, Constant]]:
    out = dict(env)
    for p, v in zip(pattern, values):
        if isinstance(p, Variable):
            if p.anonymous:
                continue
            bound = out.setdefault(p.name, v)
            if bound != v:
                return None
        elif p != v:
            return None
    return out


def truth_of(
    program: Program,
    key: PredicateKey,
    args: Sequence[Constant],
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
) -> Optional[Tuple[TruthValue, Source]]:
    return Engine(program, depth_limit, check=False).truth_of(key, args)


def eval_rule(
    program: Program,
    rule: FuzzyRule,
    args: Sequence[Constant],
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
) -> Optional[TruthValue]:
    return Engine(program, depth_limit, check=False).eval_rule(rule, args)


def solve(program: Program, query: Query, depth_limit: int = DEFAULT_DEPTH_LIMIT) -> Iterator[Answer]:
    return Engine(program, depth_limit).solve(query)


def explain(
    program: Program,
    key: PredicateKey,
    args: Sequence[Constant],
    depth_limit: int = DEFAULT_DEPTH_LIMIT,
) -> ResolutionTrace:
    return Engine(program, depth_limit, check=False).explain(key, args)


__all__ = [
    "DEFAULT_DEPTH_LIMIT",
    "Source",
    "TIER_ORDER",
    "Comparator",
    "Constraint",
    "Query",
    "Answer",
    "ResolutionTrace",
    "InvalidProgram",
    "QueryTargetError",
    "ResourceLimitError",
    "Engine",
    "truth_of",
    "eval_rule",
    "solve",
    "explain",
]
