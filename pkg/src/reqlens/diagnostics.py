"""Located findings reported by every stage of the toolchain."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional


class Severity(str, Enum):
    ERROR = "error"
    WARNING = "warning"
    INFO = "info"


@dataclass(frozen=True, order=True)
class Location:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


NOWHERE = Location("<unknown>", 0, 0)


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    location: Location = NOWHERE
    # atom -> truth value; a counterexample for failed entailments
    witness: Optional[dict] = field(default=None, hash=False)

    def sort_key(self):
        return (self.location.file, self.location.line,
                self.location.column, self.code, self.message)

    def witness_text(self) -> Optional[dict[str, bool]]:
        if self.witness is None:
            return None
        from reqlens.formula import pretty
        items = sorted((pretty(atom), value)
                       for atom, value in self.witness.items())
        return dict(items)

    def __str__(self) -> str:
        return f"{self.location}: {self.severity.value}: [{self.code}] {self.message}"


@dataclass(frozen=True)
class ParseDiagnostic(Diagnostic):
    expected: tuple[str, ...] = ()
    found: Optional[str] = None


def error(code, message, location=NOWHERE, witness=None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, location, witness)


def warning(code, message, location=NOWHERE) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, location)


def info(code, message, location=NOWHERE) -> Diagnostic:
    return Diagnostic(Severity.INFO, code, message, location)


def count(diagnostics) -> dict[str, int]:
    totals = {"errors": 0, "warnings": 0, "infos": 0}
    for d in diagnostics:
        totals[d.severity.value + "s"] += 1
    return totals
