"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class PovmError(ValueError):
    """Base class for domain failures (CLI exit status 1)."""


class NotHermitian(PovmError):
    pass


class NotPSD(PovmError):
    pass


class NoConvergence(PovmError):
    pass


class UnknownLabel(PovmError, KeyError):
    pass


class SpaceMismatch(PovmError):
    pass


class DimMismatch(PovmError):
    pass


class NotSurjective(PovmError):
    pass


class ZeroProbability(PovmError):
    pass


class OutOfRange(PovmError):
    pass


class ValidationError(PovmError):
    """An entity failed its construction invariants."""


class ConsistencyError(PovmError):
    """Two independent computations of the same quantity disagree."""


class NameNotFound(PovmError, KeyError):
    pass


class UsageError(Exception):
    """Malformed input or invocation (CLI exit status 2)."""


class ParseError(UsageError):
    pass


class UnknownScenario(UsageError):
    pass
