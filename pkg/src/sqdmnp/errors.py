"""Exception hierarchy shared across the package."""


class SqdMnpError(Exception):
    """Base class for every error raised by this package."""


class TableFormatError(SqdMnpError, ValueError):
    pass


class DuplicateAbscissaError(TableFormatError):
    pass


class OutOfRangeError(SqdMnpError, ValueError):
    pass


class PlasmonPoleError(SqdMnpError, ZeroDivisionError):
    pass


class DegenerateGeometryError(SqdMnpError, ValueError):
    pass


class DomainError(SqdMnpError, ValueError):
    pass


class StiffnessError(SqdMnpError, RuntimeError):
    """Adaptive step size collapsed below the representable minimum.

    ``t`` and ``state`` hold the last accepted time and density matrix.
    """

    def __init__(self, message, t=None, state=None):
        super().__init__(message)
        self.t = t
        self.state = state


class IntegrityError(SqdMnpError, RuntimeError):
    """A density matrix drifted too far from trace one / Hermiticity / positivity."""


class SweepError(SqdMnpError, RuntimeError):
    pass


class ConfigError(SqdMnpError, ValueError):
    """Invalid run configuration; ``key`` is the dotted path of the offending entry."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
