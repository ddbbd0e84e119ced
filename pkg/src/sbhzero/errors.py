"""Exception hierarchy shared by all modules."""


class SbhError(Exception):
    """Base class for library errors."""


class DomainError(SbhError, ValueError):
    """An argument lies outside the domain where the operation is defined."""


class PreconditionError(SbhError, ValueError):
    """An input violates a stated precondition (monotonicity, convexity, ...)."""


class InsufficientDataError(SbhError, ValueError):
    pass


class NumericalInstabilityError(SbhError, ArithmeticError):
    """A numerical limit could not be resolved within the step budget."""


class ConstructionError(SbhError, ValueError):
    """A test function could not be built from the supplied data."""


class UnsupportedError(SbhError, NotImplementedError):
    pass
