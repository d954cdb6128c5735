"""Exception hierarchy shared across the package."""


class CqrnetError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(CqrnetError):
    """Malformed data passed to an operation (shape, sign, or domain)."""


class InvalidConfigError(CqrnetError):
    """A configuration object violates its invariants."""


class CsvFormatError(InvalidInputError):
    """A CSV file failed validation; message carries the line number."""


class DegenerateDataError(CqrnetError):
    """Data cannot support the requested fit (e.g. no event observations)."""


class DegenerateWeightError(CqrnetError):
    """An IPCW denominator of zero for an event observation."""


class NumericError(CqrnetError):
    """Non-finite value encountered during computation."""


class UndefinedMetricError(CqrnetError):
    """A metric has no value on this data (e.g. zero comparable pairs)."""


class CalibrationError(CqrnetError):
    """Censoring-bound calibration could not reach the target proportion."""
