from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional

from .model import SourceSpan


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"


# Stable diagnostic codes. Tests and scripts match on these, do not rename.
SYNTAX = "syntax-error"
UNKNOWN_CONNECTIVE = "unknown-connective"
TRUTH_RANGE = "truth-range"
FUNCTION_ORDER = "function-order"
FUNCTION_POINTS = "function-points"
CRISP_RULE = "crisp-rule"
NON_GROUND_FACT = "non-ground-fact"
ZERO_ARITY = "zero-arity"
CONFLICT = "conflict"
SIGNATURE_ARITY = "signature-arity"
TYPE_ARITY = "type-arity"
DEFAULT_ARITY = "default-arity"
UNDECLARED = "undeclared-predicate"
UNKNOWN_BODY_PREDICATE = "unknown-body-predicate"
HEAD_VARIABLE = "head-variable-unbound"
UNBOUND_BODY_VARIABLE = "unbound-body-variable"
COMPLEMENT_ARITY = "complement-arity"
COMPLEMENT_CREDIBILITY = "complement-credibility"
OPEN_TYPE = "open-type"
IO_ERROR = "io-error"
QUERY_SYNTAX = "query-syntax"
QUERY_TARGET = "query-target"
RESOURCE_LIMIT = "resource-limit"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    line: int
    column: int
    code: str
    message: str
    origin: str = "<input>"

    @classmethod
    def error(cls, code: str, message: str, span: Optional[SourceSpan]) -> "Diagnostic":
        return cls._at(Severity.ERROR, code, message, span)

    @classmethod
    def warning(cls, code: str, message: str, span: Optional[SourceSpan]) -> "Diagnostic":
        return cls._at(Severity.WARNING, code, message, span)

    @classmethod
    def _at(cls, severity: Severity, code: str, message: str, span: Optional[SourceSpan]) -> "Diagnostic":
        if span is None:
            return cls(severity, 1, 1, code, message)
        return cls(severity, span.line, span.column, code, message, span.origin)

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR

    def __str__(self) -> str:
        return f"{self.origin}:{self.line}:{self.column}: {self.severity.value}[{self.code}]: {self.message}"


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


__all__ = ["Severity", "Diagnostic", "has_errors"]
