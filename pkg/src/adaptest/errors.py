"""Exception hierarchy shared across the package."""


class AdaptestError(Exception):
    """Base class for all errors raised by adaptest."""


class InputError(AdaptestError):
    """Malformed or unusable input data."""


class ParseError(InputError):
    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class DegenerateColumnError(InputError):
    pass


class TooFewRowsError(InputError):
    pass


class NumericalError(AdaptestError):
    """A computation could not be completed to the required accuracy."""


class NonIdentifiableError(NumericalError):
    pass


class DomainError(NumericalError):
    pass


class DegenerateResponseError(NumericalError):
    pass


class DegenerateError(NumericalError):
    pass


class TransformSingularError(NumericalError):
    pass


class DegenerateBandwidthError(NumericalError):
    pass
