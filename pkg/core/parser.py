"""Recursive-descent parser for RFuzzy source text.

Accepted clause forms:

    :- set_prop p/N => t1/1, ..., tN/1.
    p(c1, ..., cN) value V.
    p :# ([(x1, v1), (x2, v2), ...]).
    p(X1, ..., XN) [cred (op1, V)] :~ op2 q1(...), ..., qk(...).
    :- default(p/N, V).
    :- default(p/N, V) => m/N.
    t(c1, ..., cN).

Errors are collected per clause; after a syntax error the parser skips to the
next clause terminator and carries on, so one run reports every problem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from loguru import logger

from . import diagnostics as codes
from .diagnostics import Diagnostic, has_errors
from .lexer import Token, TokenKind, tokenize
from .model import (
    BodyAtom,
    ConflictError,
    Connective,
    Credibility,
    CrispFact,
    Declaration,
    DefaultDecl,
    FuzzyFact,
    FuzzyRule,
    PredicateKey,
    Program,
    SourceSpan,
    Term,
    TruthFunction,
    TypeSignature,
    Variable,
    program_insert,
)
from .validate import validate


@dataclass(frozen=True)
class SourceUnit:
    text: str
    origin: str = "<repl>"


@dataclass
class ParseResult:
    program: Optional[Program]
    diagnostics: List[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.program is not None


class ParseError(Exception):
    """Raised inside the parser to abandon the current clause."""

    def __init__(self, diagnostic: Diagnostic) -> None:
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


CONNECTIVE_NAMES = {c.value for c in Connective}


class Parser:
    def __init__(self, tokens: List[Token]) -> None:
        self.tokens = tokens
        self.pos = 0
        # semantic problems found in clauses that still parsed
        self.diagnostics: List[Diagnostic] = []

    # -- token plumbing --------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        i = min(self.pos + offset, len(self.tokens) - 1)
        return self.tokens[i]

    def advance(self) -> Token:
        tok = self.peek()
        if tok.kind is not TokenKind.EOF:
            self.pos += 1
        return tok

    def at(self, kind: TokenKind, text: Optional[str] = None) -> bool:
        tok = self.peek()
        return tok.kind is kind and (text is None or tok.text == text)

    def accept(self, kind: TokenKind, text: Optional[str] = None) -> Optional[Token]:
        if self.at(kind, text):
            return self.advance()
        return None

    def expect(self, kind: TokenKind, what: Optional[str] = None) -> Token:
        tok = self.peek()
        if tok.kind is not kind:
            raise self.error(f"expected {what or repr(kind.value)}, found {tok.describe()}", tok)
        return self.advance()

    def error(self, message: str, tok: Token, code: str = codes.SYNTAX) -> ParseError:
        return ParseError(Diagnostic.error(code, message, tok.span))

    def report(self, code: str, message: str, span: SourceSpan) -> None:
        self.diagnostics.append(Diagnostic.error(code, message, span))

    def synchronize(self) -> None:
        while not self.at(TokenKind.EOF):
            if self.advance().kind is TokenKind.END:
                return

    # -- terminals -------------------------------------------------------

    def number(self) -> Tuple[float, Token]:
        tok = self.expect(TokenKind.NUMBER, "a number")
        value = float(tok.text)
        if not math.isfinite(value):
            raise self.error(f"number {tok.text} is out of range", tok)
        return value, tok

    def truth_literal(self, what: str = "truth value") -> Tuple[float, Token]:
        value, tok = self.number()
        if not (0.0 <= value <= 1.0):
            self.report(codes.TRUTH_RANGE, f"{what} {tok.text} outside [0,1]", tok.span)
        return value, tok

    def arity(self) -> int:
        tok = self.expect(TokenKind.NUMBER, "an arity")
        if not tok.text.isdigit():
            raise self.error(f"arity must be a nonnegative integer, found {tok.text}", tok)
        return int(tok.text)

    def pred_ref(self) -> Tuple[PredicateKey, Token]:
        name = self.expect(TokenKind.ATOM, "a predicate name")
        self.expect(TokenKind.SLASH, "'/'")
        return PredicateKey(name.text, self.arity()), name

    def connective(self) -> Connective:
        tok = self.expect(TokenKind.ATOM, "a connective name")
        if tok.text not in CONNECTIVE_NAMES:
            raise self.error(
                f"unknown connective {tok.text!r} (expected one of {', '.join(sorted(CONNECTIVE_NAMES))})",
                tok,
                codes.UNKNOWN_CONNECTIVE,
            )
        return Connective(tok.text)

    def term(self) -> Term:
        tok = self.peek()
        if tok.kind is TokenKind.VAR:
            self.advance()
            return Variable(tok.text)
        if tok.kind is TokenKind.ATOM:
            self.advance()
            return tok.text
        if tok.kind is TokenKind.NUMBER:
            value, _ = self.number()
            return value
        raise self.error(f"expected a term, found {tok.describe()}", tok)

    def term_list(self) -> List[Term]:
        self.expect(TokenKind.LPAREN, "'('")
        terms = [self.term()]
        while self.accept(TokenKind.COMMA):
            terms.append(self.term())
        self.expect(TokenKind.RPAREN, "')'")
        return terms

    # -- clauses ---------------------------------------------------------

    def clauses(self) -> List[Declaration]:
        decls: List[Declaration] = []
        errors: List[Diagnostic] = []
        while not self.at(TokenKind.EOF):
            try:
                decl = self.clause()
            except ParseError as exc:
                errors.append(exc.diagnostic)
                self.synchronize()
                continue
            if decl is not None:
                decls.append(decl)
        self.diagnostics.extend(errors)
        return decls

    def clause(self) -> Optional[Declaration]:
        tok = self.peek()
        if tok.kind is TokenKind.NECK:
            return self.directive()
        if tok.kind is TokenKind.ATOM:
            return self.predicate_clause()
        raise self.error(f"expected a clause, found {tok.describe()}", tok)

    def end_clause(self) -> None:
        self.expect(TokenKind.END, "'.' ending the clause")

    def directive(self) -> Optional[Declaration]:
        neck = self.advance()
        name = self.expect(TokenKind.ATOM, "'set_prop' or 'default'")
        if name.text == "set_prop":
            return self.set_prop(neck)
        if name.text == "default":
            return self.default(neck)
        raise self.error(f"unknown directive {name.text!r}", name)

    def set_prop(self, start: Token) -> Optional[TypeSignature]:
        target, target_tok = self.pred_ref()
        self.expect(TokenKind.ARROW, "'=>'")
        types = [self.pred_ref()]
        while self.accept(TokenKind.COMMA):
            types.append(self.pred_ref())
        self.end_clause()
        before = len(self.diagnostics)
        if target.arity == 0:
            self.report(codes.ZERO_ARITY, f"fuzzy predicate {target} must have at least one argument", target_tok.span)
        for key, tok in types:
            if key.arity != 1:
                self.report(codes.TYPE_ARITY, f"type predicate {key} must have arity 1", tok.span)
        if len(types) != target.arity:
            self.report(
                codes.SIGNATURE_ARITY,
                f"{target} needs {target.arity} argument types, {len(types)} given",
                target_tok.span,
            )
        if len(self.diagnostics) > before:
            return None
        return TypeSignature(target, tuple(k for k, _ in types), span=start.span)

    def default(self, start: Token) -> Optional[DefaultDecl]:
        self.expect(TokenKind.LPAREN, "'('")
        target, target_tok = self.pred_ref()
        self.expect(TokenKind.COMMA, "','")
        before = len(self.diagnostics)
        tv, _ = self.truth_literal("default truth value")
        self.expect(TokenKind.RPAREN, "')'")
        condition = None
        if self.accept(TokenKind.ARROW):
            condition, _ = self.pred_ref()
        self.end_clause()
        if target.arity == 0:
            self.report(codes.ZERO_ARITY, f"fuzzy predicate {target} must have at least one argument", target_tok.span)
        if len(self.diagnostics) > before:
            return None
        return DefaultDecl(target, tv, condition, span=start.span)

    def predicate_clause(self) -> Optional[Declaration]:
        name = self.advance()
        if self.at(TokenKind.FUNCTION_DEF):
            return self.function(name)
        if self.at(TokenKind.NECK):
            raise self.error("crisp rules are not supported; only ground crisp facts are", name, codes.CRISP_RULE)
        if not self.at(TokenKind.LPAREN):
            raise self.error(f"predicate {name.text!r} needs at least one argument", name, codes.ZERO_ARITY)
        args = self.term_list()
        key = PredicateKey(name.text, len(args))
        nxt = self.peek()
        if nxt.kind is TokenKind.ATOM and nxt.text == "value":
            self.advance()
            return self.fuzzy_fact(name, key, args)
        if (nxt.kind is TokenKind.ATOM and nxt.text == "cred") or nxt.kind is TokenKind.FUZZY_NECK:
            return self.rule(name, key, args)
        if nxt.kind is TokenKind.NECK:
            raise self.error("crisp rules are not supported; only ground crisp facts are", nxt, codes.CRISP_RULE)
        self.end_clause()
        if any(isinstance(a, Variable) for a in args):
            self.report(codes.NON_GROUND_FACT, f"crisp fact {key} must be ground", name.span)
            return None
        return CrispFact(key, tuple(args), span=name.span)

    def fuzzy_fact(self, name: Token, key: PredicateKey, args: List[Term]) -> Optional[FuzzyFact]:
        before = len(self.diagnostics)
        tv, _ = self.truth_literal()
        self.end_clause()
        if any(isinstance(a, Variable) for a in args):
            self.report(codes.NON_GROUND_FACT, f"fuzzy fact {key} must be ground", name.span)
        if len(self.diagnostics) > before:
            return None
        return FuzzyFact(key, tuple(args), tv, span=name.span)

    def function(self, name: Token) -> Optional[TruthFunction]:
        self.advance()
        self.expect(TokenKind.LPAREN, "'('")
        self.expect(TokenKind.LBRACK, "'['")
        points = [self.point()]
        while self.accept(TokenKind.COMMA):
            points.append(self.point())
        self.expect(TokenKind.RBRACK, "']'")
        self.expect(TokenKind.RPAREN, "')'")
        self.end_clause()
        before = len(self.diagnostics)
        if len(points) < 2:
            self.report(codes.FUNCTION_POINTS, f"function {name.text} needs at least 2 points", name.span)
        for (x0, _, _), (x1, _, tok) in zip(points, points[1:]):
            if x1 <= x0:
                self.report(
                    codes.FUNCTION_ORDER,
                    f"function {name.text}: x-coordinate {tok.text} does not increase",
                    tok.span,
                )
        for _, tv, tok in points:
            if not (0.0 <= tv <= 1.0):
                self.report(codes.TRUTH_RANGE, f"truth value {tv} outside [0,1]", tok.span)
        if len(self.diagnostics) > before:
            return None
        key = PredicateKey(name.text, 1)
        return TruthFunction(key, tuple((x, tv) for x, tv, _ in points), span=name.span)

    def point(self) -> Tuple[float, float, Token]:
        self.expect(TokenKind.LPAREN, "'('")
        x, x_tok = self.number()
        self.expect(TokenKind.COMMA, "','")
        tv, _ = self.number()
        self.expect(TokenKind.RPAREN, "')'")
        return x, tv, x_tok

    def rule(self, name: Token, head: PredicateKey, args: List[Term]) -> Optional[FuzzyRule]:
        before = len(self.diagnostics)
        credibility = None
        if self.accept(TokenKind.ATOM, "cred"):
            self.expect(TokenKind.LPAREN, "'('")
            op1 = self.connective()
            self.expect(TokenKind.COMMA, "','")
            value, _ = self.truth_literal("credibility")
            self.expect(TokenKind.RPAREN, "')'")
            credibility = (op1, value)
        self.expect(TokenKind.FUZZY_NECK, "':~'")
        op2 = self.connective()
        body = [self.body_atom()]
        while self.accept(TokenKind.COMMA):
            body.append(self.body_atom())
        self.end_clause()
        for a in args:
            if not isinstance(a, Variable):
                self.report(codes.SYNTAX, f"rule head arguments must be variables, found {a!r}", name.span)
        if len(self.diagnostics) > before:
            return None
        cred = Credibility(*credibility) if credibility else None
        head_vars = tuple(a.name for a in args if isinstance(a, Variable))
        return FuzzyRule(head, head_vars, op2, tuple(body), cred, span=name.span)

    def body_atom(self) -> BodyAtom:
        name = self.expect(TokenKind.ATOM, "a body atom")
        if not self.at(TokenKind.LPAREN):
            raise self.error(f"body atom {name.text!r} needs at least one argument", name, codes.ZERO_ARITY)
        args = self.term_list()
        return BodyAtom(PredicateKey(name.text, len(args)), tuple(args))


def parse_declarations(src: SourceUnit) -> Tuple[List[Declaration], List[Diagnostic]]:
    """Parse src into declarations in source order, without building a program."""
    tokens, lex_diags = tokenize(src.text, src.origin)
    parser = Parser(tokens)
    decls = parser.clauses()
    diags = sorted(lex_diags + parser.diagnostics, key=lambda d: (d.line, d.column))
    return decls, diags


def insert_all(program: Program, decls: List[Declaration]) -> Tuple[Program, List[Diagnostic]]:
    diags: List[Diagnostic] = []
    for decl in decls:
        try:
            program = program_insert(program, decl)
        except ConflictError as exc:
            diags.append(Diagnostic.error(codes.CONFLICT, str(exc), exc.decl.span))
    return program, diags


def parse_program(src: SourceUnit) -> ParseResult:
    """Parse, build and validate src.

    On success the result holds the program together with any warnings; on
    failure it holds every diagnostic found and no program.
    """
    decls, diags = parse_declarations(src)
    program, conflicts = insert_all(Program(), decls)
    diags.extend(conflicts)
    diags.extend(validate(program))
    logger.debug({"event": "parsed", "origin": src.origin, "declarations": len(decls), "diagnostics": len(diags)})
    if has_errors(diags):
        return ParseResult(None, diags)
    return ParseResult(program, diags)


__all__ = [
    "SourceUnit",
    "ParseResult",
    "ParseError",
    "Parser",
    "parse_declarations",
    "parse_program",
    "insert_all",
]
