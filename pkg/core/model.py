from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Tuple, Union

# Symbols are str, numbers are float. Parsed integers are stored as floats so
# that `15` and `15.0` denote the same individual.
Constant = Union[str, float]
TruthValue = float
ANONYMOUS = "_"


def is_number(c: object) -> bool:
    return isinstance(c, float)


def check_truth_value(value: float, what: str = "truth value") -> float:
    v = float(value)
    if not (0.0 <= v <= 1.0):
        raise ValueError(f"{what} {value!r} outside [0,1]")
    return v


@dataclass(frozen=True)
class SourceSpan:
    origin: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.origin}:{self.line}:{self.column}"


@dataclass(frozen=True, order=True)
class PredicateKey:
    name: str
    arity: int

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("predicate name must be nonempty")
        if self.arity < 0:
            raise ValueError(f"negative arity for {self.name}")

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name

    @property
    def anonymous(self) -> bool:
        """``_`` matches anything and never binds."""
        return self.name == ANONYMOUS


Term = Union[Variable, str, float]


class Connective(str, Enum):
    MIN = "min"
    MAX = "max"
    PROD = "prod"
    LUKA = "luka"
    DPROD = "dprod"
    DLUKA = "dluka"
    COMPLEMENT = "complement"

    @property
    def is_unary(self) -> bool:
        return self is Connective.COMPLEMENT


@dataclass(frozen=True)
class TypeSignature:
    target: PredicateKey
    argument_types: Tuple[PredicateKey, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.argument_types) != self.target.arity:
            raise ValueError(f"{self.target} declares {len(self.argument_types)} argument types")
        for t in self.argument_types:
            if t.arity != 1:
                raise ValueError(f"type predicate {t} must have arity 1")


@dataclass(frozen=True)
class CrispFact:
    key: PredicateKey
    args: Tuple[Constant, ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.args) != self.key.arity:
            raise ValueError(f"{self.key} applied to {len(self.args)} arguments")


@dataclass(frozen=True)
class FuzzyFact:
    key: PredicateKey
    args: Tuple[Constant, ...]
    tv: TruthValue
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.args) != self.key.arity:
            raise ValueError(f"{self.key} applied to {len(self.args)} arguments")
        if any(isinstance(a, Variable) for a in self.args):
            raise ValueError(f"fuzzy fact for {self.key} is not ground")
        check_truth_value(self.tv)


@dataclass(frozen=True)
class TruthFunction:
    key: PredicateKey
    points: Tuple[Tuple[float, TruthValue], ...]
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.key.arity != 1:
            raise ValueError(f"truth function {self.key} must have arity 1")
        if len(self.points) < 2:
            raise ValueError(f"truth function {self.key} needs at least 2 points")
        xs = [x for x, _ in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError(f"truth function {self.key}: x-coordinates not strictly increasing")
        for _, tv in self.points:
            check_truth_value(tv)


@dataclass(frozen=True)
class BodyAtom:
    key: PredicateKey
    args: Tuple[Term, ...]

    def __post_init__(self) -> None:
        if len(self.args) != self.key.arity:
            raise ValueError(f"{self.key} applied to {len(self.args)} arguments")

    def variables(self) -> Tuple[str, ...]:
        return tuple(a.name for a in self.args if isinstance(a, Variable) and not a.anonymous)

    def is_ground(self) -> bool:
        return not any(isinstance(a, Variable) for a in self.args)


@dataclass(frozen=True)
class Credibility:
    op: Connective
    value: TruthValue

    def __post_init__(self) -> None:
        check_truth_value(self.value, "credibility")


@dataclass(frozen=True)
class FuzzyRule:
    head: PredicateKey
    head_vars: Tuple[str, ...]
    body_op: Connective
    body: Tuple[BodyAtom, ...]
    credibility: Optional[Credibility] = None
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if len(self.head_vars) != self.head.arity:
            raise ValueError(f"rule head {self.head} has {len(self.head_vars)} arguments")
        if not self.body:
            raise ValueError(f"rule for {self.head} has an empty body")


@dataclass(frozen=True)
class DefaultDecl:
    target: PredicateKey
    tv: TruthValue
    condition: Optional[PredicateKey] = None
    span: Optional[SourceSpan] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        check_truth_value(self.tv, "default truth value")


Declaration = Union[TypeSignature, CrispFact, FuzzyFact, TruthFunction, FuzzyRule, DefaultDecl]


class ConflictError(ValueError):
    """Raised when a declaration contradicts one already in the program."""

    def __init__(self, message: str, decl: Declaration) -> None:
        super().__init__(message)
        self.decl = decl


def _frozen(d: dict) -> Mapping:
    return MappingProxyType(d)


@dataclass(frozen=True)
class Program:
    """Validated-or-not knowledge base; immutable, extended only via program_insert."""

    signatures: Mapping[PredicateKey, TypeSignature] = field(default_factory=lambda: _frozen({}))
    crisp_facts: Tuple[CrispFact, ...] = ()
    fuzzy_facts: Mapping[Tuple[PredicateKey, Tuple[Constant, ...]], FuzzyFact] = field(default_factory=lambda: _frozen({}))
    functions: Mapping[PredicateKey, TruthFunction] = field(default_factory=lambda: _frozen({}))
    rules: Mapping[PredicateKey, Tuple[FuzzyRule, ...]] = field(default_factory=lambda: _frozen({}))
    general_defaults: Mapping[PredicateKey, DefaultDecl] = field(default_factory=lambda: _frozen({}))
    conditioned_defaults: Mapping[PredicateKey, Tuple[DefaultDecl, ...]] = field(default_factory=lambda: _frozen({}))

    __hash__ = None  # type: ignore[assignment]

    @cached_property
    def _crisp_index(self) -> frozenset:
        return frozenset((f.key, f.args) for f in self.crisp_facts)

    @cached_property
    def _crisp_by_key(self) -> Mapping[PredicateKey, Tuple[CrispFact, ...]]:
        out: dict[PredicateKey, list[CrispFact]] = {}
        seen: set = set()
        for f in self.crisp_facts:
            if (f.key, f.args) in seen:
                continue
            seen.add((f.key, f.args))
            out.setdefault(f.key, []).append(f)
        return _frozen({k: tuple(v) for k, v in out.items()})

    def has_crisp(self, key: PredicateKey, args: Tuple[Constant, ...]) -> bool:
        return (key, tuple(args)) in self._crisp_index

    def crisp_facts_for(self, key: PredicateKey) -> Tuple[CrispFact, ...]:
        """Distinct crisp facts for key, in declaration order."""
        return self._crisp_by_key.get(key, ())

    def is_crisp_predicate(self, key: PredicateKey) -> bool:
        return key in self._crisp_by_key

    @cached_property
    def fuzzy_predicates(self) -> frozenset:
        keys = set(self.signatures)
        keys.update(k for k, _ in self.fuzzy_facts)
        keys.update(self.functions)
        keys.update(self.rules)
        keys.update(self.general_defaults)
        keys.update(self.conditioned_defaults)
        return frozenset(keys)

    def is_fuzzy_predicate(self, key: PredicateKey) -> bool:
        return key in self.fuzzy_predicates

    def declarations(self) -> Iterable[Declaration]:
        yield from self.signatures.values()
        yield from self.crisp_facts
        yield from self.fuzzy_facts.values()
        yield from self.functions.values()
        for rs in self.rules.values():
            yield from rs
        yield from self.general_defaults.values()
        for ds in self.conditioned_defaults.values():
            yield from ds

    def is_empty(self) -> bool:
        return next(iter(self.declarations()), None) is None


def _with(mapping: Mapping, key, value) -> Mapping:
    d = dict(mapping)
    d[key] = value
    return _frozen(d)


def program_insert(program: Program, decl: Declaration) -> Program:
    """Return a new program extended with decl.

    Identical re-declarations are no-ops; contradictory ones raise ConflictError.
    Rule and conditioned-default order follows insertion order.
    """
    if isinstance(decl, TypeSignature):
        old = program.signatures.get(decl.target)
        if old is not None:
            if old == decl:
                return program
            raise ConflictError(f"conflicting set_prop for {decl.target}", decl)
        return replace(program, signatures=_with(program.signatures, decl.target, decl))

    if isinstance(decl, CrispFact):
        return replace(program, crisp_facts=program.crisp_facts + (decl,))

    if isinstance(decl, FuzzyFact):
        k = (decl.key, decl.args)
        old = program.fuzzy_facts.get(k)
        if old is not None:
            if old.tv == decl.tv:
                return program
            raise ConflictError(
                f"{decl.key.name}{_args_text(decl.args)} already has truth value {old.tv}, not {decl.tv}",
                decl,
            )
        return replace(program, fuzzy_facts=_with(program.fuzzy_facts, k, decl))

    if isinstance(decl, TruthFunction):
        old = program.functions.get(decl.key)
        if old is not None:
            if old == decl:
                return program
            raise ConflictError(f"second truth function for {decl.key}", decl)
        return replace(program, functions=_with(program.functions, decl.key, decl))

    if isinstance(decl, FuzzyRule):
        existing = program.rules.get(decl.head, ())
        if decl in existing:
            return program
        return replace(program, rules=_with(program.rules, decl.head, existing + (decl,)))

    if isinstance(decl, DefaultDecl):
        if decl.condition is None:
            old = program.general_defaults.get(decl.target)
            if old is not None:
                if old.tv == decl.tv:
                    return program
                raise ConflictError(f"second general default for {decl.target}", decl)
            return replace(program, general_defaults=_with(program.general_defaults, decl.target, decl))
        existing = program.conditioned_defaults.get(decl.target, ())
        if decl in existing:
            return program
        return replace(
            program,
            conditioned_defaults=_with(program.conditioned_defaults, decl.target, existing + (decl,)),
        )

    raise TypeError(f"not a declaration: {decl!r}")


def build_program(decls: Iterable[Declaration]) -> Program:
    program = Program()
    for d in decls:
        program = program_insert(program, d)
    return program


def individuals_of_type(program: Program, type_key: PredicateKey) -> Tuple[Constant, ...]:
    """Individuals c with a crisp fact type_key(c), in declaration order, no duplicates."""
    if type_key.arity != 1:
        return ()
    return tuple(f.args[0] for f in program.crisp_facts_for(type_key))


def admits(program: Program, type_key: PredicateKey, c: Constant) -> bool:
    """Type guard for one argument position.

    A type with crisp facts admits exactly its individuals; a type with none is
    an open numeric domain.
    """
    if program.is_crisp_predicate(type_key):
        return program.has_crisp(type_key, (c,))
    return is_number(c)


def format_number(x: float) -> str:
    """Shortest text that parses back to x."""
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def format_constant(c: Constant) -> str:
    if is_number(c):
        return format_number(c)
    return str(c)


def _args_text(args: Iterable[Term]) -> str:
    return "(" + ", ".join(format_constant(a) if not isinstance(a, Variable) else a.name for a in args) + ")"


def atom_text(key: PredicateKey, args: Iterable[Term]) -> str:
    return f"{key.name}{_args_text(args)}"


__all__ = [
    "Constant",
    "TruthValue",
    "SourceSpan",
    "PredicateKey",
    "ANONYMOUS",
    "Variable",
    "Term",
    "Connective",
    "TypeSignature",
    "CrispFact",
    "FuzzyFact",
    "TruthFunction",
    "BodyAtom",
    "Credibility",
    "FuzzyRule",
    "DefaultDecl",
    "Declaration",
    "ConflictError",
    "Program",
    "program_insert",
    "build_program",
    "individuals_of_type",
    "admits",
    "is_number",
    "check_truth_value",
    "format_number",
    "format_constant",
    "atom_text",
]
