"""Exception hierarchy.

``InputError`` subclasses signal bad arguments (CLI exit code 2);
``NumericalError`` subclasses signal a numerical breakdown (exit code 3).
"""


class QFDivError(Exception):
    pass


class InputError(QFDivError, ValueError):
    pass


class NumericalError(QFDivError, ArithmeticError):
    pass


class NotHermitianError(InputError):
    pass


class NotPSDError(InputError):
    pass


class PartitionError(InputError):
    pass


class DomainError(InputError):
    pass


class UnsupportedFormError(InputError):
    pass


class InfiniteValueError(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass


class InconsistencyError(NumericalError):
    pass
