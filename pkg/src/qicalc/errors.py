"""Exception types shared across the package."""


class ValidationError(ValueError):
    """An object failed one of its construction invariants."""


class IncompatibleError(ValidationError):
    """Two objects that must commute elementwise do not."""

    def __init__(self, message, *, left_index=None, right_index=None, commutator_norm=None):
        super().__init__(message)
        self.left_index = left_index
        self.right_index = right_index
        self.commutator_norm = commutator_norm


class BudgetError(ValidationError):
    """A computation would exceed the configured size budget."""


class DocumentError(ValueError):
    """A JSON document failed schema validation."""
