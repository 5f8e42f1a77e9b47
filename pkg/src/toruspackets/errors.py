"""Exception hierarchy.

Size/validation problems derive from ``ValidationError``; tolerance failures
derive from ``NumericalError``. The CLI maps the first to exit code 2 and the
second to exit code 3.
"""


class ToruspacketsError(Exception):
    pass


class ValidationError(ToruspacketsError, ValueError):
    pass


class NumericalError(ToruspacketsError, ArithmeticError):
    pass


class ProfileInvalid(ValidationError):
    pass


class ParamMismatch(ValidationError):
    pass


class WindowOverflow(ValidationError):
    pass


class GridTooLarge(ValidationError):
    pass


class NonIrreducible(ValidationError):
    pass


class DriftUnresolved(ValidationError):
    pass


class SingularAtZeroWidth(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class QuadratureUnderResolved(NumericalError):
    pass
