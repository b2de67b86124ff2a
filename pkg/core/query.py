from __future__ import annotations

from typing import List, Optional

from . import diagnostics as codes
from .diagnostics import Diagnostic
from .engine import Comparator, Constraint, Query
from .lexer import TokenKind, tokenize
from .model import BodyAtom, PredicateKey, Variable
from .parser import ParseError, Parser

_COMPARATORS = {
    ">": Comparator.GT,
    ">=": Comparator.GE,
    "<": Comparator.LT,
    "=<": Comparator.LE,
    "<=": Comparator.LE,
    "=": Comparator.EQ,
}


class QueryError(ValueError):
    """Raised when query text cannot be turned into a Query."""

    def __init__(self, diagnostic: Diagnostic) -> None:
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


def parse_query(text: str, origin: str = "<query>") -> Query:
    """Parse `p(args..., V) [, V op bound]*`.

    The last argument is the truth slot: a variable names the truth value, a
    number becomes an equality constraint. A leading `?-` and a trailing `.`
    are optional.
    """
    tokens, lex_diags = tokenize(text, origin)
    if lex_diags:
        raise QueryError(_as_query_error(lex_diags[0]))
    p = Parser(tokens)
    try:
        query = _query(p)
    except ParseError as exc:
        raise QueryError(_as_query_error(exc.diagnostic)) from None
    if p.diagnostics:
        raise QueryError(_as_query_error(p.diagnostics[0]))
    return query


def _as_query_error(d: Diagnostic) -> Diagnostic:
    return Diagnostic(d.severity, d.line, d.column, codes.QUERY_SYNTAX, d.message, d.origin)


def _query(p: Parser) -> Query:
    p.accept(TokenKind.QUERY)
    name = p.expect(TokenKind.ATOM, "a predicate name")
    if not p.at(TokenKind.LPAREN):
        raise p.error(f"{name.text} needs subject arguments and a truth value argument", name)
    open_paren = p.peek()
    args = p.term_list()
    if len(args) < 2:
        raise p.error(
            f"{name.text} needs at least one subject argument before the truth value argument",
            open_paren,
        )
    *subjects, slot = args

    constraints: List[Constraint] = []
    truth_var: Optional[str] = None
    if isinstance(slot, Variable):
        if not slot.anonymous:
            truth_var = slot.name
        if truth_var in {a.name for a in subjects if isinstance(a, Variable)}:
            raise p.error(f"truth variable {truth_var} also appears as a subject argument", name)
    elif isinstance(slot, float):
        if not (0.0 <= slot <= 1.0):
            raise p.error(f"truth value {slot} outside [0,1]", name)
        constraints.append(Constraint(Comparator.EQ, slot))
    else:
        raise p.error(f"the truth value argument must be a variable or a number, found {slot!r}", name)

    while p.accept(TokenKind.COMMA):
        var = p.expect(TokenKind.VAR, "a constraint on the truth variable")
        if var.text != truth_var:
            raise p.error(f"constraints may only mention the truth variable, found {var.text}", var)
        cmp_tok = p.expect(TokenKind.CMP, "a comparator (<, =<, >, >=, =)")
        bound, _ = p.number()
        constraints.append(Constraint(_COMPARATORS[cmp_tok.text], bound))

    p.accept(TokenKind.END)
    tail = p.peek()
    if tail.kind is not TokenKind.EOF:
        raise p.error(f"unexpected {tail.describe()} after the query", tail)

    goal = BodyAtom(PredicateKey(name.text, len(subjects)), tuple(subjects))
    return Query(goal, tuple(constraints), truth_var)


__all__ = ["QueryError", "parse_query"]
