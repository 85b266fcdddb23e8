"""Exception hierarchy.

The CLI maps these to exit codes: ``DataError`` subclasses exit 2,
``NumericError`` subclasses exit 3.
"""


class LaborShareError(Exception):
    pass


class DataError(LaborShareError):
    pass


class NumericError(LaborShareError):
    pass


class DomainError(NumericError, ValueError):
    """An argument lies outside the domain of a formula."""


class SingularityError(NumericError):
    """Attenuation denominator ``1 - k*(mu - mu0)`` is nonpositive."""


class RangeError(NumericError):
    """Automation fraction left ``[0, 1]``."""


class StabilityError(NumericError):
    """Explicit Euler step with ``dt * delta >= 1``."""


class FitDivergenceError(NumericError):
    """Loss became NaN or infinite during fitting."""


class DegenerateError(NumericError):
    """Statistic undefined for the given data (zero variance, all-zero x...)."""


class ParseError(DataError):
    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class ValidationError(DataError):
    pass


class AlignmentError(DataError):
    pass


class MismatchError(DataError):
    """Two series that must share a year set do not."""


class InsufficientDataError(DataError):
    pass
