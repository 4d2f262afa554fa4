"""Token-level style lints."""

from __future__ import annotations

import re

from reqlens import diagnostics as diag
from reqlens.lexer import TokenKind

_CLASS_NAME = re.compile(r"[A-Z][A-Z0-9_]*$")


def lint_style(tokens) -> list:
    found = []
    code_tokens = [t for t in tokens if t.kind is not TokenKind.COMMENT]
    for i, tok in enumerate(code_tokens):
        if tok.is_keyword("class") and i + 1 < len(code_tokens):
            name = code_tokens[i + 1]
            if name.kind is TokenKind.IDENTIFIER and not _CLASS_NAME.match(name.lexeme):
                found.append(diag.warning(
                    "CLASS_NAME_CASE",
                    f"class name '{name.lexeme}' should be upper case",
                    name.location))
        elif tok.is_keyword("Note"):
            found.append(diag.info(
                "NOTE_KEYWORD_CASE", "keyword 'Note' is conventionally written 'note'",
                tok.location))
    return found
