"""Exception hierarchy.

Two broad families: ``ValidationError`` for inputs that break a structural
rule (shape, sign, normalisation, parameter range) and ``NumericalError`` for
quantities that are mathematically undefined or unstable for a valid input.
The CLI maps them to exit codes 2 and 3.
"""


class AssociationError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(AssociationError, ValueError):
    pass


class NumericalError(AssociationError, ArithmeticError):
    pass


# table construction
class DimensionError(ValidationError):
    pass


class EmptyTableError(ValidationError):
    pass


class NegativeCountError(ValidationError):
    pass


class NegativeProbabilityError(ValidationError):
    pass


class NotNormalizedError(ValidationError):
    pass


class MarginalZeroError(ValidationError):
    """A marginal the measure divides by is zero."""


class ShapeMismatchError(ValidationError):
    pass


class ParameterRangeError(ValidationError):
    pass


class DegenerateMarginError(ValidationError):
    """All mass sits in a single row (or column); the normaliser is zero."""


class DomainError(ValidationError):
    """Argument outside the region where a closed form is valid."""


# numerical contracts
class ZeroCellDerivativeError(NumericalError):
    """f' is unbounded at 0 and the table has an empty cell."""


class NumericalContractError(NumericalError):
    """A measure left [0, 1] by more than roundoff."""


class AggregatorDomainError(NumericalError):
    pass


class GeneratorDegenerateError(NumericalError):
    pass
