"""Exceptions shared across the solver."""


class CmdpError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(CmdpError):
    """Raised on malformed model input."""

    def __init__(self, line, column, message):
        super().__init__("line %d:%d: %s" % (line, column, message))
        self.line = line
        self.column = column
        self.message = message


class SemanticError(CmdpError):
    """Raised when a parsed model is structurally inconsistent."""


class SchedulerIncomplete(CmdpError):
    """A scheduler was queried at a (state, level) pair it does not cover."""


class PreconditionViolated(CmdpError):
    """An operation was applied to a model outside its admissible inputs."""


class Singular(CmdpError):
    """A linear system has no unique solution."""


class NotAcyclic(CmdpError):
    """An operation restricted to acyclic models was given a cyclic one."""


class NegativeAfterShift(CmdpError):
    """Internal check: reward shifting left a negative reward behind."""


class SpaceTooLarge(CmdpError):
    """Brute-force enumeration would exceed the configured cap."""

    def __init__(self, size):
        super().__init__("scheduler space has %d elements" % size)
        self.size = size


class EmptyActStar(CmdpError):
    """Internal check: no action survived the equality filter at some state."""


class PositiveEcPresent(CmdpError):
    """Quotient construction requires all end components to be reward-free."""
