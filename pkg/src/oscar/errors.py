"""Exception hierarchy shared by every module."""


class OscarError(Exception):
    """Base class for all package errors."""


class DataFormatError(OscarError, ValueError):
    """Input file could not be parsed."""

    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class ValidationError(OscarError, ValueError):
    """Input parsed but violates a structural invariant."""


class EmptyUniverseError(ValidationError):
    """Every asset was dropped."""


class DataError(OscarError, ValueError):
    """Input values are unusable (non-positive prices, non-finite returns)."""


class NotPositiveDefiniteError(OscarError, ArithmeticError):
    """Cholesky hit a non-positive pivot.

    ``pivot`` is the 1-based order of the leading minor that failed.
    """

    def __init__(self, pivot, message=None):
        super().__init__(message or f"matrix is not positive definite: failure at pivot {pivot}")
        self.pivot = pivot


class IrrecoverableMatrixError(OscarError, ArithmeticError):
    """No jitter on the ladder made the matrix factorizable."""


class DimensionError(OscarError, ValueError):
    pass


class NoDirectionError(OscarError, ValueError):
    """Expected-return vector is identically zero."""


class DegenerateRiskError(OscarError, ArithmeticError):
    """Portfolio variance is (numerically) zero."""


class DegenerateAngleError(OscarError, ArithmeticError):
    pass


class SubsetError(OscarError):
    """A failure while solving on a subset of assets; carries the subset."""

    def __init__(self, subset, cause):
        super().__init__(f"subset {list(subset)}: {cause}")
        self.subset = tuple(subset)
        self.cause = cause


class SpecError(OscarError, ValueError):
    """Invalid synthetic-instance specification or run configuration."""


class UndefinedRatioError(OscarError, ArithmeticError):
    pass
