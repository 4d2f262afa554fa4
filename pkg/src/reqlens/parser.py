"""Recursive descent parser for RSL.

The grammar is documented in docs/grammar.md. Syntax errors abandon the
current class and resume at the next ``class`` keyword, so every class of a
file is reported on independently.
"""

from __future__ import annotations

from pathlib import Path as FsPath
from typing import Optional

from reqlens import diagnostics as diag
from reqlens.diagnostics import Location, ParseDiagnostic, Severity
from reqlens.formula import (
    Const, Disequality, Equality, Formula, Opaque, Predicate, QueryPath,
    And, Implies, Not, Or,
)
from reqlens.lexer import Token, TokenKind, join_lexemes, tokenize
from reqlens.model import (
    Body, Call, ClassDecl, Clause, Conditional, FeatureDecl, Loop,
    OpaqueStatement, feature_kind,
)

RELATIONS = ("=", "/=", "<", ">", "<=", ">=")
ARITHMETIC = ("+", "-", "*", "/", "//", "\\\\", "^")
ROUTINE_START = ("note", "Note", "require", "local", "do", "deferred")
CLAUSE_STOP = ("do", "deferred", "local", "ensure", "end", "invariant",
               "feature", "note", "Note", "require", "class")


class ParseError(Exception):
    def __init__(self, diagnostic: ParseDiagnostic):
        super().__init__(diagnostic.message)
        self.diagnostic = diagnostic


class _Term:
    """Intermediate result while parsing an operand."""

    __slots__ = ("kind", "value", "args", "start", "stop")

    def __init__(self, kind, value, start, stop, args=None):
        self.kind = kind  # path | formula | literal | complex
        self.value = value
        self.args = args
        self.start = start
        self.stop = stop


class Parser:
    def __init__(self, tokens: list[Token], file: Optional[str] = None):
        self.file = file or (tokens[0].location.file if tokens else "<input>")
        self.diagnostics: list[diag.Diagnostic] = []
        self.tokens: list[Token] = []
        self.comments: list[list[str]] = []
        pending: list[str] = []
        for tok in tokens:
            if tok.kind is TokenKind.COMMENT:
                pending.append(tok.lexeme[2:].strip())
            elif tok.kind is TokenKind.ERROR:
                self.diagnostics.append(ParseDiagnostic(
                    Severity.ERROR, "LEX_ERROR",
                    f"unexpected character sequence {tok.lexeme!r}",
                    tok.location, found=tok.lexeme))
            else:
                self.tokens.append(tok)
                self.comments.append(pending)
                pending = []
        self.pos = 0
        self.quiet = False

    # -- token helpers --------------------------------------------------------

    def peek(self, k: int = 0) -> Optional[Token]:
        i = self.pos + k
        return self.tokens[i] if i < len(self.tokens) else None

    def at_end(self) -> bool:
        return self.pos >= len(self.tokens)

    def at_keyword(self, *words) -> bool:
        tok = self.peek()
        return tok is not None and tok.is_keyword(*words)

    def at_symbol(self, *symbols) -> bool:
        tok = self.peek()
        return tok is not None and tok.is_symbol(*symbols)

    def at_ident(self, k: int = 0) -> bool:
        tok = self.peek(k)
        return tok is not None and tok.kind is TokenKind.IDENTIFIER

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected, message: Optional[str] = None):
        tok = self.peek()
        if tok is None:
            found, loc = "end of file", self._eof_location()
        else:
            found, loc = tok.describe(), tok.location
        expected = tuple(expected)
        if message is None:
            message = f"expected {' or '.join(expected)}, found {found}"
        raise ParseError(ParseDiagnostic(
            Severity.ERROR, "PARSE_ERROR", message, loc,
            expected=expected, found=found))

    def _eof_location(self) -> Location:
        if self.tokens:
            last = self.tokens[-1]
            return Location(self.file, last.location.line,
                            last.location.column + len(last.lexeme))
        return Location(self.file, 1, 1)

    def expect_keyword(self, word: str) -> Token:
        if not self.at_keyword(word):
            self.fail([f"'{word}'"])
        return self.advance()

    def expect_symbol(self, symbol: str) -> Token:
        if not self.at_symbol(symbol):
            self.fail([f"'{symbol}'"])
        return self.advance()

    def expect_ident(self, what: str = "identifier") -> Token:
        if not self.at_ident():
            self.fail([what])
        return self.advance()

    def _same_line(self) -> bool:
        prev, tok = self.tokens[self.pos - 1], self.peek()
        return tok is not None and tok.location.line == prev.location.line

    def _text(self, start: int, stop: int) -> str:
        return join_lexemes(t.lexeme for t in self.tokens[start:stop])

    # -- classes --------------------------------------------------------------

    def parse_source(self) -> list[ClassDecl]:
        classes = []
        while not self.at_end():
            start = self.pos
            try:
                classes.append(self.parse_class())
            except ParseError as e:
                self.diagnostics.append(e.diagnostic)
                self.pos = max(self.pos, start + 1)
                while not self.at_end() and not self.at_keyword("class"):
                    self.pos += 1
        return classes

    def parse_class(self) -> ClassDecl:
        comments = list(self.comments[self.pos])
        notes = self.parse_notes() if self.at_keyword("note", "Note") else ()
        start = self.expect_keyword("class")
        name = self.expect_ident("class name").lexeme
        parents = []
        if self.at_keyword("inherit"):
            self.advance()
            while self.at_ident():
                parents.append(self.advance().lexeme)
            if not parents:
                self.fail(["parent class name"])
        features: list[FeatureDecl] = []
        while self.at_keyword("feature"):
            self.advance()
            while not self.at_keyword("feature", "invariant", "end"):
                if self.at_end():
                    self.fail(["feature declaration", "'end'"])
                features.extend(self.parse_feature())
        invariant: tuple[Clause, ...] = ()
        if self.at_keyword("invariant"):
            self.advance()
            invariant = self.parse_clauses()
        if not self.at_keyword("end"):
            self.fail(["'feature'", "'invariant'", "'end'"])
        self.advance()
        return ClassDecl(name, tuple(parents), tuple(features), invariant,
                         notes, start.location, tuple(comments))

    def parse_notes(self) -> tuple[tuple[str, str], ...]:
        self.advance()
        entries = []
        while self.at_ident() and self.peek(1) is not None and self.peek(1).is_symbol(":"):
            key = self.advance().lexeme
            colon = self.advance()
            start = self.pos
            while not self.at_end() and self.peek().location.line == colon.location.line:
                self.advance()
            entries.append((key, self._text(start, self.pos)))
        return tuple(entries)

    # -- features -------------------------------------------------------------

    def parse_feature(self) -> list[FeatureDecl]:
        comments = list(self.comments[self.pos])
        first = self.expect_ident("feature name")
        names = [first]
        while self.at_symbol(","):
            self.advance()
            names.append(self.expect_ident("feature name"))
        if len(names) > 1:
            self.expect_symbol(":")
            rtype = self.parse_type()
            return [self._attribute(tok, rtype, comments) for tok in names]

        formals: tuple = ()
        if self.at_symbol("("):
            formals = self.parse_declarations(closing=")")
        result_type = None
        if self.at_symbol(":"):
            self.advance()
            result_type = self.parse_type()
            if not formals and not self.at_keyword(*ROUTINE_START):
                return [self._attribute(first, result_type, comments)]
        if not self.at_keyword(*ROUTINE_START):
            self.fail(["':'", "'('", "'require'", "'do'", "'deferred'"])
        comments += self.comments[self.pos]

        notes: tuple = ()
        if self.at_keyword("note", "Note"):
            notes = self.parse_notes()
        require: tuple = ()
        if self.at_keyword("require"):
            self.advance()
            require = self.parse_clauses()
        locals_: tuple = ()
        if self.at_keyword("local"):
            self.advance()
            locals_ = self.parse_declarations(closing=None)
        body = None
        deferred = False
        if self.at_keyword("deferred"):
            self.advance()
            deferred = True
        elif self.at_keyword("do"):
            self.advance()
            body = self.parse_statements(("ensure", "end"))
        else:
            self.fail(["'do'", "'deferred'"])
        ensure: tuple = ()
        if self.at_keyword("ensure"):
            self.advance()
            ensure = self.parse_clauses()
        self.expect_keyword("end")
        return [FeatureDecl(
            name=first.lexeme,
            kind=feature_kind(result_type, body, deferred),
            formals=formals, locals=locals_, result_type=result_type,
            require=require, ensure=ensure, body=body, is_deferred=deferred,
            notes=notes, location=first.location, comments=tuple(comments))]

    def _attribute(self, tok, rtype, comments) -> FeatureDecl:
        return FeatureDecl(name=tok.lexeme,
                           kind=feature_kind(rtype, None, False),
                           result_type=rtype, location=tok.location,
                           comments=tuple(comments))

    def parse_type(self) -> str:
        name = self.expect_ident("type name").lexeme
        if self.at_symbol("["):
            self.fail([], "generic classes are not supported")
        return name

    def parse_declarations(self, closing: Optional[str]) -> tuple[tuple[str, str], ...]:
        """``a, b: T; c: U`` lists; ``,`` is also accepted between groups."""
        if closing:
            self.expect_symbol("(")
        decls = []
        while self.at_ident():
            names = [self.advance().lexeme]
            while self.at_symbol(","):
                self.advance()
                names.append(self.expect_ident("name").lexeme)
            self.expect_symbol(":")
            rtype = self.parse_type()
            decls.extend((n, rtype) for n in names)
            if self.at_symbol(";", ","):
                self.advance()
        if closing:
            self.expect_symbol(closing)
        return tuple(decls)

    def parse_clauses(self) -> tuple[Clause, ...]:
        clauses = []
        while not self.at_end() and not self.at_keyword(*CLAUSE_STOP):
            if self.at_symbol(";"):
                self.advance()
                continue
            loc = self.peek().location
            label = None
            if self.at_ident() and self.peek(1) is not None and self.peek(1).is_symbol(":"):
                label = self.advance().lexeme
                self.advance()
            clauses.append(Clause(self.parse_expr(), label, loc))
        return tuple(clauses)

    # -- statements -----------------------------------------------------------

    def parse_statements(self, stops) -> Body:
        statements = []
        while not self.at_keyword(*stops):
            if self.at_end():
                self.fail([f"'{s}'" for s in stops])
            if self.at_symbol(";"):
                self.advance()
                continue
            statements.append(self.parse_statement())
        return Body(tuple(statements))

    def parse_statement(self):
        tok = self.peek()
        if tok.is_keyword("if"):
            self.advance()
            cond = self.parse_expr()
            self.expect_keyword("then")
            then_branch = self.parse_statements(("else", "end"))
            else_branch = None
            if self.at_keyword("else"):
                self.advance()
                else_branch = self.parse_statements(("end",))
            self.expect_keyword("end")
            return Conditional(cond, then_branch, else_branch, tok.location)
        if tok.is_keyword("from"):
            self.advance()
            init = self.parse_statements(("until",))
            self.advance()
            cond = self.parse_expr()
            self.expect_keyword("loop")
            body = self.parse_statements(("end",))
            self.expect_keyword("end")
            return Loop(cond, body, init, tok.location)
        if tok.is_keyword("create"):
            start = self.pos
            self.advance()
            var = self.expect_ident("creation target").lexeme
            if self.at_symbol(".") and self.at_ident(1):
                self.advance()
                self.advance()
            if self.at_symbol("(") and self._same_line():
                self.parse_arguments()
            return OpaqueStatement(self._text(start, self.pos), var, None, tok.location)
        if tok.kind is TokenKind.IDENTIFIER:
            start = self.pos
            path, args = self.parse_path()
            if self.at_symbol(":="):
                if args is not None or len(path) != 1:
                    self.fail([], "only a local or attribute name may be assigned")
                self.advance()
                quiet, self.quiet = self.quiet, True
                try:
                    rhs = self.parse_expr()
                finally:
                    self.quiet = quiet
                call = None
                if isinstance(rhs, QueryPath):
                    call = Call(rhs.path[:-1], rhs.path[-1], (), tok.location)
                elif isinstance(rhs, Predicate):
                    call = Call(rhs.receiver, rhs.name, rhs.args, tok.location)
                return OpaqueStatement(self._text(start, self.pos), path[0],
                                       call, tok.location)
            return Call(path[:-1], path[-1], args or (), tok.location)
        self.fail(["statement"])

    def parse_path(self):
        path = [self.expect_ident().lexeme]
        while self.at_symbol(".") and self.at_ident(1):
            self.advance()
            path.append(self.advance().lexeme)
        args = None
        if self.at_symbol("(") and self._same_line():
            args = self.parse_arguments()
        return tuple(path), args

    def parse_arguments(self) -> tuple:
        self.expect_symbol("(")
        args = []
        if not self.at_symbol(")"):
            while True:
                term = self.parse_term()
                if term.kind == "path" and term.args is None:
                    args.append(term.value)
                else:
                    args.append((self._text(term.start, term.stop),))
                if not self.at_symbol(","):
                    break
                self.advance()
        self.expect_symbol(")")
        return tuple(args)

    # -- expressions ----------------------------------------------------------

    def parse_expr(self) -> Formula:
        left = self.parse_or()
        if self.at_keyword("implies"):
            self.advance()
            return Implies(left, self.parse_expr())
        return left

    def parse_or(self) -> Formula:
        left = self.parse_and()
        while self.at_keyword("or"):
            self.advance()
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_not()
        while self.at_keyword("and"):
            self.advance()
            left = And(left, self.parse_not())
        return left

    def parse_not(self) -> Formula:
        if self.at_keyword("not"):
            self.advance()
            return Not(self.parse_not())
        return self.parse_relation()

    def parse_relation(self) -> Formula:
        start = self.pos
        left = self.parse_term()
        if self.at_symbol(*RELATIONS):
            op = self.advance().lexeme
            right = self.parse_term()
            plain = (left.kind == right.kind == "path"
                     and left.args is None and right.args is None)
            if op == "=" and plain:
                return Equality(left.value, right.value)
            if op == "/=" and plain:
                return Disequality(left.value, right.value)
            return self._opaque(start)
        if left.kind == "formula":
            return left.value
        if left.kind == "path":
            path = left.value
            if left.args is None:
                return QueryPath(path)
            return Predicate(path[:-1], path[-1], left.args)
        return self._opaque(start)

    def _opaque(self, start: int) -> Opaque:
        atom = Opaque(tuple(t.lexeme for t in self.tokens[start:self.pos]))
        if not self.quiet:
            self.diagnostics.append(diag.warning(
                "OPAQUE_ATOM",
                f"'{atom.text}' is treated as an uninterpreted proposition",
                self.tokens[start].location))
        return atom

    def parse_term(self) -> _Term:
        start = self.pos
        term = self.parse_operand()
        if self.at_symbol(*ARITHMETIC):
            while self.at_symbol(*ARITHMETIC):
                self.advance()
                self.parse_operand()
            return _Term("complex", None, start, self.pos)
        return term

    def parse_operand(self) -> _Term:
        start = self.pos
        tok = self.peek()
        if tok is None:
            self.fail(["expression"])
        if tok.is_keyword("true", "false"):
            self.advance()
            return _Term("formula", Const(tok.lexeme == "true"), start, self.pos)
        if tok.is_keyword("old"):
            self.fail([], "'old' expressions are not supported")
        if tok.is_keyword("across"):
            depth = 0
            while True:
                if self.at_end():
                    self.fail(["'end'"])
                t = self.advance()
                if t.is_keyword("across"):
                    depth += 1
                elif t.is_keyword("end"):
                    depth -= 1
                    if depth == 0:
                        break
            return _Term("formula", self._opaque(start), start, self.pos)
        if tok.is_symbol("("):
            self.advance()
            inner = self.parse_expr()
            self.expect_symbol(")")
            return _Term("formula", inner, start, self.pos)
        if tok.is_symbol("-", "+"):
            self.advance()
            self.parse_operand()
            return _Term("complex", None, start, self.pos)
        if tok.kind is TokenKind.IDENTIFIER:
            path, args = self.parse_path()
            return _Term("path", path, start, self.pos, args)
        if tok.kind in (TokenKind.INTEGER, TokenKind.REAL, TokenKind.STRING):
            self.advance()
            return _Term("literal", tok.lexeme, start, self.pos)
        self.fail(["expression"])


def parse_source(tokens: list[Token], file: Optional[str] = None):
    """Parse a token stream into class declarations plus diagnostics."""
    parser = Parser(tokens, file)
    classes = parser.parse_source()
    return classes, parser.diagnostics


def parse_text(text: str, file: str = "<input>"):
    return parse_source(tokenize(text, file), file)


def parse_file(path):
    path = FsPath(path)
    return parse_text(path.read_text(encoding="utf-8"), str(path))


def parse_expression(text: str, diagnostics: Optional[list] = None) -> Formula:
    """Parse a single expression; raises ParseError when malformed.

    Warnings (opaque atoms) are appended to ``diagnostics`` if given.
    """
    parser = Parser(tokenize(text, "<expression>"), "<expression>")
    if parser.diagnostics:
        raise ParseError(parser.diagnostics[0])
    f = parser.parse_expr()
    if not parser.at_end():
        parser.fail(["end of expression"])
    if diagnostics is not None:
        diagnostics.extend(parser.diagnostics)
    return f
