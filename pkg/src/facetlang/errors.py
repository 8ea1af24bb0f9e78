"""Error types shared across the reader, the evaluator, and the oracle."""

from __future__ import annotations


class LangError(Exception):
    """Base for every error a program can provoke."""

    def __init__(self, message: str, loc: tuple[int, int] | None = None):
        super().__init__(message)
        self.message = message
        self.loc = loc

    def __str__(self) -> str:
        if self.loc is not None:
            return "line %d, col %d: %s" % (self.loc[0], self.loc[1], self.message)
        return self.message


class ParseError(LangError):
    """Malformed source text. Always carries a source location."""


class EvalError(LangError):
    """Base for runtime errors."""


class UnboundVariableError(EvalError):
    pass


class WrongTypeError(EvalError):
    pass


class ArityError(EvalError):
    pass


class PolicyError(EvalError):
    """An obs policy produced a faceted or unknown decision."""


class StarObservedError(EvalError):
    """A missing-data placeholder reached an output channel."""


class FacetEscapeError(EvalError):
    """A faceted value reached an output channel."""


class PcConsistencyError(EvalError):
    """Both branches of one label in a program counter. Signals an evaluator bug."""


class UserError(EvalError):
    """Raised by the in-language (error ...) primitive. Aborts the top level."""


class NotOracleSafeError(LangError):
    """Program is outside the fragment the projection oracle can check."""


class MissingLabelError(LangError):
    """A runtime label had no view assignment during projection."""
