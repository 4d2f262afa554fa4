"""Tokenizer for RSL source text.

Whitespace is skipped, everything else (comments and unrecognised
characters included) becomes a token, so the token stream plus the skipped
whitespace reproduces the input exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from reqlens.diagnostics import Location

KEYWORDS = frozenset({
    "class", "inherit", "feature", "require", "ensure", "do", "deferred",
    "end", "invariant", "local", "if", "then", "else", "from", "until",
    "loop", "create", "not", "and", "or", "implies", "across", "as", "all",
    "Note", "note", "true", "false", "old",
})

# longest first so that ':=' wins over ':'
SYMBOLS = (":=", "/=", "<=", ">=", "//", "\\\\", "(", ")", "[", "]", ",",
           ";", ":", ".", "=", "<", ">", "+", "-", "*", "/", "^")


class TokenKind(str, Enum):
    KEYWORD = "keyword"
    IDENTIFIER = "identifier"
    SYMBOL = "symbol"
    STRING = "string"
    INTEGER = "integer"
    REAL = "real"
    COMMENT = "comment"
    ERROR = "error"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    location: Location
    offset: int

    @property
    def end(self) -> int:
        return self.offset + len(self.lexeme)

    def is_keyword(self, *words: str) -> bool:
        return self.kind is TokenKind.KEYWORD and self.lexeme in words

    def is_symbol(self, *symbols: str) -> bool:
        return self.kind is TokenKind.SYMBOL and self.lexeme in symbols

    def describe(self) -> str:
        if self.kind in (TokenKind.KEYWORD, TokenKind.SYMBOL):
            return f"'{self.lexeme}'"
        return f"{self.kind.value} '{self.lexeme}'"


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER = re.compile(r"\d+(\.\d+)?([eE][+-]?\d+)?")
_STRING = re.compile(r'"(?:%.|[^"%\n])*"')


def tokenize(text: str, file: str = "<input>") -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(text)

    def emit(kind, end):
        tokens.append(Token(kind, text[pos:end],
                            Location(file, line, pos - line_start + 1), pos))
        return end

    while pos < n:
        ch = text[pos]
        if ch == "\n":
            pos += 1
            line, line_start = line + 1, pos
            continue
        if ch.isspace():
            pos += 1
            continue
        if text.startswith("--", pos):
            end = text.find("\n", pos)
            pos = emit(TokenKind.COMMENT, n if end < 0 else end)
            continue
        m = _IDENT.match(text, pos)
        if m:
            word = m.group()
            kind = TokenKind.KEYWORD if word in KEYWORDS else TokenKind.IDENTIFIER
            pos = emit(kind, m.end())
            continue
        m = _NUMBER.match(text, pos)
        if m:
            kind = TokenKind.REAL if (m.group(1) or m.group(2)) else TokenKind.INTEGER
            pos = emit(kind, m.end())
            continue
        if ch == '"':
            m = _STRING.match(text, pos)
            if m:
                pos = emit(TokenKind.STRING, m.end())
            else:
                end = text.find("\n", pos)
                pos = emit(TokenKind.ERROR, n if end < 0 else end)
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, pos):
                pos = emit(TokenKind.SYMBOL, pos + len(sym))
                break
        else:
            pos = emit(TokenKind.ERROR, pos + 1)
    return tokens


def join_lexemes(lexemes) -> str:
    """Canonical single-line spelling of a token sequence."""
    out = ""
    prev = None
    for lex in lexemes:
        if prev is None:
            out = lex
        elif lex in (".", ",", ";", ")", "]") or prev in (".", "(", "["):
            out += lex
        else:
            out += " " + lex
        prev = lex
    return out
