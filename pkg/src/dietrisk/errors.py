"""Exception hierarchy.

The CLI maps each family to its own exit code: ``ConfigError`` (2),
``DataError`` (3) and ``NumericalError`` (4).
"""


class DietRiskError(Exception):
    """Base class for every error raised by the toolkit."""


class ConfigError(DietRiskError, ValueError):
    pass


class DataError(DietRiskError, ValueError):
    pass


class NumericalError(DietRiskError, ArithmeticError):
    pass


# numerics / pca / kmeans / validity


class EmptyInput(NumericalError):
    def __init__(self, rows):
        super().__init__(f"need at least 2 rows, got {rows}")
        self.rows = rows


class ConstantColumn(NumericalError):
    def __init__(self, col):
        super().__init__(f"column {col} is constant (zero standard deviation)")
        self.col = col


class NonFiniteInput(NumericalError):
    pass


class NotSymmetric(NumericalError):
    pass


class NoConvergence(NumericalError):
    def __init__(self, max_sweeps, off_norm):
        super().__init__(
            f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {off_norm:.3e})"
        )
        self.max_sweeps = max_sweeps
        self.off_norm = off_norm


class DimensionMismatch(NumericalError):
    pass


class InvalidTarget(ConfigError):
    pass


class TooFewPoints(NumericalError):
    pass


class TooFewClusters(NumericalError):
    pass


class CoincidentBarycenters(NumericalError):
    def __init__(self, a, b):
        super().__init__(f"clusters {a} and {b} share a barycenter; Davies-Bouldin ratio undefined")
        self.pair = (a, b)


# pipeline


class ParseError(DataError):
    def __init__(self, file, line, message):
        super().__init__(f"{file}:{line}: {message}")
        self.file = str(file)
        self.line = line


class SchemaError(DataError):
    pass


class JoinError(DataError):
    pass


class AllRowsDropped(DataError):
    pass


class MissingOutcome(DataError):
    def __init__(self, country):
        super().__init__(f"no death metric available for {country!r}")
        self.country = country


class EmptyGroup(DataError):
    pass
