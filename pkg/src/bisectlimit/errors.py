"""Exception hierarchy shared by all modules."""


class BisectLimitError(Exception):
    pass


class InvalidInputError(BisectLimitError, ValueError):
    pass


class ParityError(InvalidInputError):
    """Odd total degree where a complete matching is required."""


class FeasibilityError(InvalidInputError):
    """Requested edge-type counts admit no matching."""


class PreconditionError(InvalidInputError):
    pass


class ResourceGuardError(BisectLimitError, RuntimeError):
    """An exact computation was refused because it exceeds its size guard."""


class ConfigError(BisectLimitError, ValueError):
    pass
