"""Shared exception types."""


class TensorSpaceError(Exception):
    pass


class FieldError(TensorSpaceError, ValueError):
    """Invalid field construction or scalar operation."""


class CharacteristicError(FieldError):
    """Field characteristic too small for the requested operation."""


class DimensionError(TensorSpaceError, ValueError):
    """Shape mismatch between operands."""


class CertificateError(TensorSpaceError):
    """An embedding or commutation certificate failed verification."""


class CapacityError(TensorSpaceError):
    """A tower ran out of scheduled capacity (static mode)."""


class BudgetError(TensorSpaceError):
    """A search exhausted its alternation budget; result is inconclusive."""


class FormatError(TensorSpaceError, ValueError):
    """Malformed serialized input."""
