"""Exception hierarchy shared by the reqlens modules."""

from __future__ import annotations


class ReqlensError(Exception):
    """Base class for every error raised by reqlens."""


class ResolutionError(ReqlensError):
    """Model construction failed; ``diagnostics`` lists every finding."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.message for d in self.diagnostics))


class UnknownClass(ReqlensError):
    pass


class ArityMismatch(ReqlensError):
    pass


class CapacityExceeded(ReqlensError):
    pass


class NotAPlainSequence(ReqlensError):
    pass


class NothingToExtract(ReqlensError):
    pass


class UnresolvedStory(ReqlensError):
    pass


class StateInconsistent(ReqlensError):
    """A postcondition contradicts the invariants in force."""
