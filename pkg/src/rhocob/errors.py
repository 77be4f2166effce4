"""Exception types raised across the package."""


class RhocobError(Exception):
    """Base class for every error raised by rhocob."""


class NotInvertible(RhocobError, ValueError):
    pass


class ZeroInput(RhocobError, ValueError):
    pass


class OrderNotDividing(RhocobError, ValueError):
    pass


class NotASubgroup(RhocobError, ValueError):
    pass


class NotHomogeneousAmbient(RhocobError, ValueError):
    pass


class NotAUnit(RhocobError, ValueError):
    pass


class EvenOrderUnsupported(RhocobError, ValueError):
    pass


class ZeroFraming(RhocobError, ValueError):
    pass


class EvenFraming(RhocobError, ValueError):
    pass


class SingularMatrix(RhocobError, ValueError):
    pass


class ProfileAsymmetry(RhocobError, AssertionError):
    """A metabolizer whose echelon profile is not symmetric (should never happen)."""


class InequalityViolation(RhocobError, AssertionError):
    """The coefficient chain of an h-polynomial failed (should never happen)."""


class RangeError(RhocobError, ValueError):
    pass


class CapacityError(RhocobError):
    """Refusal to enumerate beyond the supported group size."""


class NOddRequired(RhocobError, ValueError):
    pass


class MissingData(RhocobError, ValueError):
    pass


class ParseError(RhocobError, ValueError):
    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
