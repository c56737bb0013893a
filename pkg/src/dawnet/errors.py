"""Exception hierarchy shared by all dawnet modules."""

from __future__ import annotations


class DawnetError(Exception):
    """Base class for every error raised by this package."""


class NetError(DawnetError, ValueError):
    """A Petri net or model is structurally malformed."""


class NotFound(DawnetError, LookupError):
    """A referenced node does not exist."""


class UnknownTransition(NotFound):
    pass


class FiringError(DawnetError):
    """A transition cannot fire in the given state."""


class NotEnabled(FiringError):
    pass


class GuardFalse(FiringError):
    pass


class BadChoice(FiringError):
    pass


class DomainTooLarge(DawnetError):
    pass


class InvalidStep(DawnetError):
    def __init__(self, index: int, cause: Exception):
        super().__init__(f"step {index}: {cause}")
        self.index = index
        self.cause = cause


class InvalidCase(DawnetError):
    pass


class GuardSyntaxError(DawnetError):
    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} at position {pos}")
        self.pos = pos


class UnknownVariable(DawnetError):
    pass


class PayloadViolatesWr(DawnetError):
    pass


class NotATraceWorkflowCase(DawnetError):
    pass


class IntervalNotExpanded(DawnetError):
    pass


class UnboundedVariable(DawnetError):
    pass


class ContradictionInInit(DawnetError):
    pass


class InconsistentState(DawnetError):
    pass


class NotStratified(DawnetError):
    pass


class KSyntaxError(DawnetError):
    pass


class IoError(DawnetError, OSError):
    pass


class SchemaError(DawnetError):
    pass


class FormatError(DawnetError):
    pass


class ValidationErrors(DawnetError):
    """Collected semantic diagnostics, each a ``(location, message)`` pair."""

    def __init__(self, diagnostics: list[tuple[str, str]]):
        self.diagnostics = list(diagnostics)
        lines = "; ".join(f"{loc}: {msg}" for loc, msg in self.diagnostics)
        super().__init__(lines or "validation failed")
