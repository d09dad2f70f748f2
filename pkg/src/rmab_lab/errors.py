class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class NonErgodicError(DomainError):
    """The chain has no unique stationary law and no explicit belief was given."""
