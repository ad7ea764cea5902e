"""Exception hierarchy shared by all modules."""


class FmgenError(Exception):
    """Base class for errors raised by fmgen."""


class DomainError(FmgenError, ValueError):
    """An argument lies outside the domain where an operation is defined."""


class DegenerateInputError(FmgenError, ValueError):
    """Input is well-formed but degenerate (e.g. a zero normalizer)."""


class InfeasibleError(FmgenError):
    """The requested construction has no solution for the given parameters."""


class CapabilityError(FmgenError):
    """The request exceeds what this implementation supports."""


class RejectionError(FmgenError):
    """A construction produced an output that failed its own validation."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
