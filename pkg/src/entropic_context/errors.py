"""Exception hierarchy.

Every error raised by the package derives from :class:`ContextualityError`.
The CLI maps :class:`InputError` subclasses to exit code 2 and
:class:`InvariantViolation` subclasses to exit code 3.
"""


class ContextualityError(ValueError):
    pass


class InputError(ContextualityError):
    """Malformed or out-of-domain input."""


class ValidationError(InputError):
    pass


class ParameterError(InputError):
    pass


class StructureError(InputError):
    """A graph does not have the structure an operation requires."""


class InvariantViolation(ContextualityError):
    """A value breaks a mathematical invariant (normalization, orthogonality, ...)."""


class NormalizationError(InvariantViolation):
    pass


class IncompatibleContextError(InvariantViolation):
    """Two projectors measured together are not orthogonal."""


class DegenerateConfigurationError(InvariantViolation):
    pass


class InconsistentMarginalsError(InvariantViolation):
    pass
