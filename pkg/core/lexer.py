from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

from . import diagnostics as codes
from .diagnostics import Diagnostic
from .model import SourceSpan


class TokenKind(Enum):
    ATOM = "atom"
    VAR = "variable"
    NUMBER = "number"
    LPAREN = "("
    RPAREN = ")"
    LBRACK = "["
    RBRACK = "]"
    COMMA = ","
    SLASH = "/"
    NECK = ":-"
    FUZZY_NECK = ":~"
    FUNCTION_DEF = ":#"
    QUERY = "?-"
    ARROW = "=>"
    CMP = "comparator"
    END = "."
    EOF = "end of input"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    span: SourceSpan

    def describe(self) -> str:
        if self.kind is TokenKind.EOF:
            return "end of input"
        return repr(self.text)


TOKEN_RE = re.compile(
    r"""
      (?P<ws>[ \t\r\f\v]+)
    | (?P<nl>\n)
    | (?P<comment>%[^\n]*)
    | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
    | (?P<atom>[a-z][A-Za-z0-9_]*)
    | (?P<var>[A-Z_][A-Za-z0-9_]*)
    | (?P<punct>:-|:~|:\#|\?-|=>|=<|>=|<=|[()\[\],/><=])
    | (?P<dot>\.)
    """,
    re.VERBOSE,
)

_PUNCT = {
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    "[": TokenKind.LBRACK,
    "]": TokenKind.RBRACK,
    ",": TokenKind.COMMA,
    "/": TokenKind.SLASH,
    ":-": TokenKind.NECK,
    ":~": TokenKind.FUZZY_NECK,
    ":#": TokenKind.FUNCTION_DEF,
    "?-": TokenKind.QUERY,
    "=>": TokenKind.ARROW,
}

COMPARATORS = {">", ">=", "<", "=<", "<=", "="}


def tokenize(text: str, origin: str = "<input>") -> Tuple[List[Token], List[Diagnostic]]:
    """Split source text into tokens.

    A '.' ends a clause only when followed by whitespace, a comment or the end
    of input; anything else is reported and skipped. Lexing never stops early:
    the token list always ends with EOF.
    """
    tokens: List[Token] = []
    diags: List[Diagnostic] = []
    pos = 0
    line = 1
    line_start = 0
    n = len(text)
    while pos < n:
        m = TOKEN_RE.match(text, pos)
        span = SourceSpan(origin, line, pos - line_start + 1)
        if m is None:
            diags.append(Diagnostic.error(codes.SYNTAX, f"unexpected character {text[pos]!r}", span))
            pos += 1
            continue
        kind = m.lastgroup
        lexeme = m.group(0)
        end = m.end()
        if kind == "nl":
            line += 1
            line_start = end
        elif kind in ("ws", "comment"):
            pass
        elif kind == "number":
            tokens.append(Token(TokenKind.NUMBER, lexeme, span))
        elif kind == "atom":
            tokens.append(Token(TokenKind.ATOM, lexeme, span))
        elif kind == "var":
            tokens.append(Token(TokenKind.VAR, lexeme, span))
        elif kind == "punct":
            if lexeme in COMPARATORS:
                tokens.append(Token(TokenKind.CMP, lexeme, span))
            else:
                tokens.append(Token(_PUNCT[lexeme], lexeme, span))
        elif kind == "dot":
            if end == n or text[end] in " \t\r\n\f\v%":
                tokens.append(Token(TokenKind.END, lexeme, span))
            else:
                diags.append(Diagnostic.error(codes.SYNTAX, "'.' must be followed by whitespace or end of input", span))
        pos = end
    tokens.append(Token(TokenKind.EOF, "", SourceSpan(origin, line, pos - line_start + 1)))
    return tokens, diags


__all__ = ["TokenKind", "Token", "tokenize", "COMPARATORS"]
