"""Propositional formulas over opaque atoms.

Atoms are compared structurally: two atoms denote the same proposition iff
their fields are equal. Paths are tuples of identifiers, ``()`` being the
current object.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterator, Union

from reqlens.lexer import KEYWORDS, join_lexemes

Path = tuple[str, ...]


def path_text(path: Path) -> str:
    return ".".join(path)


@dataclass(frozen=True)
class QueryPath:
    path: Path


@dataclass(frozen=True)
class Predicate:
    receiver: Path
    name: str
    args: tuple[Path, ...]


@dataclass(frozen=True)
class Equality:
    left: Path
    right: Path


@dataclass(frozen=True)
class Disequality:
    left: Path
    right: Path


@dataclass(frozen=True)
class Opaque:
    """Expression text outside the logic, kept as a free proposition."""

    tokens: tuple[str, ...]

    @property
    def text(self) -> str:
        return join_lexemes(self.tokens)


Atom = Union[QueryPath, Predicate, Equality, Disequality, Opaque]
ATOM_TYPES = (QueryPath, Predicate, Equality, Disequality, Opaque)


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


Formula = Union[Const, Not, And, Or, Implies, QueryPath, Predicate,
                Equality, Disequality, Opaque]

TRUE = Const(True)
FALSE = Const(False)


def is_atom(f) -> bool:
    return isinstance(f, ATOM_TYPES)


def conj(formulas) -> Formula:
    result = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return TRUE if result is None else result


def disj(formulas) -> Formula:
    result = None
    for f in formulas:
        result = f if result is None else Or(result, f)
    return FALSE if result is None else result


def atoms(f: Formula) -> list:
    """Distinct atoms of ``f`` in first-occurrence order."""
    seen: dict = {}
    for a in _walk_atoms(f):
        seen.setdefault(a, None)
    return list(seen)


def _walk_atoms(f) -> Iterator:
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Const):
            continue
        if isinstance(node, Not):
            stack.append(node.operand)
        elif isinstance(node, (And, Or, Implies)):
            stack.append(node.right)
            stack.append(node.left)
        else:
            yield node


def evaluate(f: Formula, assignment) -> bool:
    """Truth value of ``f``; atoms missing from ``assignment`` are false."""
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not evaluate(f.operand, assignment)
    if isinstance(f, And):
        return evaluate(f.left, assignment) and evaluate(f.right, assignment)
    if isinstance(f, Or):
        return evaluate(f.left, assignment) or evaluate(f.right, assignment)
    if isinstance(f, Implies):
        return (not evaluate(f.left, assignment)) or evaluate(f.right, assignment)
    return bool(assignment.get(f, False))


def map_atoms(f: Formula, fn: Callable) -> Formula:
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(map_atoms(f.operand, fn))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(map_atoms(f.left, fn), map_atoms(f.right, fn))
    return fn(f)


# -- printing ---------------------------------------------------------------

_PREC = {Implies: 1, Or: 2, And: 3, Not: 4}


def _prec(f) -> int:
    return _PREC.get(type(f), 5)


def pretty(f: Formula) -> str:
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, QueryPath):
        return path_text(f.path)
    if isinstance(f, Predicate):
        head = path_text(f.receiver + (f.name,))
        return f"{head} ({', '.join(path_text(a) for a in f.args)})"
    if isinstance(f, Equality):
        return f"{path_text(f.left)} = {path_text(f.right)}"
    if isinstance(f, Disequality):
        return f"{path_text(f.left)} /= {path_text(f.right)}"
    if isinstance(f, Opaque):
        return f.text
    if isinstance(f, Not):
        inner = pretty(f.operand)
        return f"not ({inner})" if _prec(f.operand) < 4 else f"not {inner}"
    p = _prec(f)
    left, right = pretty(f.left), pretty(f.right)
    if isinstance(f, Implies):
        # right associative
        if _prec(f.left) <= p:
            left = f"({left})"
        if _prec(f.right) < p:
            right = f"({right})"
        return f"{left} implies {right}"
    op = "and" if isinstance(f, And) else "or"
    if _prec(f.left) < p:
        left = f"({left})"
    if _prec(f.right) <= p:
        right = f"({right})"
    return f"{left} {op} {right}"


# -- paths --------------------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def is_identifier(word: str) -> bool:
    return bool(_IDENT.match(word)) and word not in KEYWORDS


def opaque_chains(tokens) -> list[tuple[int, int, Path]]:
    """Dotted identifier chains in an opaque token sequence.

    Returns (start, stop, path) triples. Names bound by ``across ... as x``
    are excluded since they are not paths of the enclosing object.
    """
    bound = {tokens[i + 1] for i in range(len(tokens) - 1) if tokens[i] == "as"}
    chains = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        preceded_by_dot = i > 0 and tokens[i - 1] == "."
        if is_identifier(tok) and not preceded_by_dot:
            j = i + 1
            parts = [tok]
            while j + 1 < len(tokens) and tokens[j] == "." and is_identifier(tokens[j + 1]):
                parts.append(tokens[j + 1])
                j += 2
            if tok not in bound and not (i > 0 and tokens[i - 1] == "as"):
                chains.append((i, j, tuple(parts)))
            i = j
        else:
            i += 1
    return chains


def map_paths(f: Formula, fn: Callable[[Path], Path]) -> Formula:
    """Rewrite every object path mentioned by ``f`` through ``fn``.

    For a predicate ``r.p (a)`` the receiver ``r`` and each argument are
    rewritten; for an unqualified ``p (a)`` the receiver is ``()``.
    """

    def on_atom(a):
        if isinstance(a, QueryPath):
            return QueryPath(fn(a.path))
        if isinstance(a, Predicate):
            return Predicate(fn(a.receiver) if a.receiver else fn(()),
                             a.name, tuple(fn(x) for x in a.args))
        if isinstance(a, (Equality, Disequality)):
            return type(a)(fn(a.left), fn(a.right))
        tokens = list(a.tokens)
        for start, stop, path in reversed(opaque_chains(a.tokens)):
            new = fn(path)
            spelled = []
            for k, part in enumerate(new):
                if k:
                    spelled.append(".")
                spelled.append(part)
            tokens[start:stop] = spelled
        return Opaque(tuple(tokens))

    return map_atoms(f, on_atom)


def object_prefixes(f: Formula) -> list[Path]:
    """Object paths occurring as proper prefixes of atoms in ``f``."""
    found: dict = {}

    def add_prefixes(path: Path, include_self: bool):
        stop = len(path) + (1 if include_self else 0)
        for k in range(1, stop):
            if is_identifier(path[0]):
                found.setdefault(path[:k], None)

    for a in atoms(f):
        if isinstance(a, QueryPath):
            add_prefixes(a.path, False)
        elif isinstance(a, Predicate):
            add_prefixes(a.receiver, True)
        elif isinstance(a, (Equality, Disequality)):
            add_prefixes(a.left, False)
            add_prefixes(a.right, False)
        else:
            for _, _, path in opaque_chains(a.tokens):
                add_prefixes(path, False)
    return list(found)


def strip_double_negation(f: Formula) -> Formula:
    while isinstance(f, Not) and isinstance(f.operand, Not):
        f = f.operand.operand
    return f
