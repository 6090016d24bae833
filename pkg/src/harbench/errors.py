"""Exception and warning types shared across the library.

Two broad families matter for the command-line front end:

* :class:`ValidationError` — the request itself is malformed (bad channel
  name, incompatible model/input combination, bad configuration). Maps to
  exit code 1.
* :class:`DataDefectError` — the inputs on disk are broken (missing files,
  row-count mismatches, non-finite values, bad labels). Maps to exit code 2.

Everything else raised during a computation maps to exit code 3.
"""


class HarBenchError(Exception):
    """Base class for all library errors."""


class ValidationError(HarBenchError):
    """The request is invalid before any data is touched."""


class DataDefectError(HarBenchError):
    """The data on disk violates the expected layout or invariants."""


# -- dataset loading ---------------------------------------------------------

class MissingFile(DataDefectError):
    """A file required by the dataset layout is absent."""


class RowCountMismatch(DataDefectError):
    """Row counts disagree across files that must align per instance."""


class NonFiniteValue(DataDefectError):
    """A value could not be parsed as a finite real number."""


class BadLabel(DataDefectError):
    """A label or subject id falls outside its allowed range."""


class UnknownChannel(ValidationError, KeyError):
    """The requested inertial channel name is not one of the nine."""


# -- signal pipeline ---------------------------------------------------------

class BadWindow(HarBenchError, ValueError):
    """Median-filter window is even or larger than the series."""


class SeriesTooShort(HarBenchError, ValueError):
    """The series has too few samples for the requested operation."""


class LengthMismatch(HarBenchError, ValueError):
    """Series that must share a length do not."""


class BadLength(HarBenchError, ValueError):
    """A fixed-length contract (e.g. 128-sample window) is violated."""


class ZeroVariance(HarBenchError, ValueError):
    """The input is constant where non-zero variance is required."""


class ZeroVector(HarBenchError, ValueError):
    """A vector that must be non-zero is zero."""


# -- models ------------------------------------------------------------------

class InputTooShort(HarBenchError, ValueError):
    """Series too short to fit the smallest convolution kernel."""


class EmptyTrainingSet(HarBenchError, ValueError):
    """No training instances were supplied."""


class SingleClass(HarBenchError, ValueError):
    """A classifier was asked to fit fewer than two classes."""


class EmptyData(HarBenchError, ValueError):
    """A training matrix with no rows was supplied."""


class NonFiniteLabelOrFeature(HarBenchError, ValueError):
    """Labels or features contain inf, or labels contain NaN."""


class DimensionMismatch(HarBenchError, ValueError):
    """Feature dimension at predict time differs from training."""


# -- evaluation --------------------------------------------------------------

class DegenerateSplit(HarBenchError, ValueError):
    """A train/test split left one side empty."""


class Empty(HarBenchError, ValueError):
    """Metric input vectors are empty."""


class IncompatibleInput(ValidationError):
    """The model cannot consume the requested input representation."""


# -- reporting ---------------------------------------------------------------

class MissingReport(DataDefectError):
    """A run directory does not contain report.json."""


class SchemaVersionMismatch(DataDefectError):
    """A report.json was written by an incompatible schema version."""


# -- warnings ----------------------------------------------------------------

class HarBenchWarning(UserWarning):
    """Base class for library warnings."""


class FeatureRangeWarning(HarBenchWarning):
    """Precomputed features fall outside the documented [-1, 1] range."""


class DegenerateSeriesWarning(HarBenchWarning):
    """A statistic hit its degenerate rule (e.g. skewness of a constant)."""


class AllZeroSpectrumWarning(HarBenchWarning):
    """Mean frequency of an all-zero spectrum; 0 returned by decision."""
