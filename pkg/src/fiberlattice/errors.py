"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class FiberError(Exception):
    exit_code = 3


class ValidationError(FiberError, ValueError):
    """Input violates a structural invariant of the fiber setting."""

    exit_code = 1


class ParseError(ValidationError):
    pass


class SchemaError(ValidationError):
    pass


class InvariantError(ValidationError):
    pass


class IndexMismatchError(ValidationError):
    pass


class NotEffectiveError(ValidationError):
    pass


class UnclassifiableError(ValidationError):
    """No Dynkin template matches; such a chain cannot sit in a genus >= 2 fiber."""


class NotNegativeDefiniteError(ValidationError):
    pass


class NoAdmissibleComponentError(ValidationError):
    pass


class CapExceededError(FiberError):
    """Exhaustive enumeration would exceed the configured cap."""

    exit_code = 1


class BoundTooLargeError(FiberError, ValueError):
    exit_code = 1


class DispatchGapError(FiberError):
    """The induction found no case for a step. Never expected on valid input."""


class CriterionNotMet(FiberError):
    exit_code = 2
