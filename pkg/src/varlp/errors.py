class PreconditionError(ValueError):
    """An input violates a documented precondition or invariant."""


class ParseError(ValueError):
    """A sequence or exponent description could not be parsed."""


class UndecidableTail(PreconditionError):
    """The tail comparison lies beyond the explicit enumeration cap."""


class BoundViolation(AssertionError):
    """A numerically observed quantity exceeded a certified bound."""
