"""Exception hierarchy for the egfet package.

Errors are grouped by subsystem so the CLI can map them to distinct exit
codes: model evaluation, numerical kernels, parameter extraction, and
file I/O.
"""


class EgfetError(Exception):
    """Base class for all errors raised by this package."""


# --- forward model ---------------------------------------------------------

class ModelError(EgfetError):
    pass


class BelowThreshold(ModelError):
    """Gate bias at or below threshold; the linear-region model is undefined there."""


class NegativeDiscriminant(ModelError):
    """The drain-current quadratic has no real root; bias outside model validity."""


class EmptyGrid(ModelError):
    """A synthesis grid contained no points."""


# --- numerics --------------------------------------------------------------

class NumericsError(EgfetError):
    pass


class TooFewPoints(NumericsError):
    pass


class BadWindow(NumericsError):
    pass


class DegenerateWindow(NumericsError):
    """Line fit impossible: zero x-variance, or zero slope (no x-intercept)."""


# --- extraction ------------------------------------------------------------

class ExtractionError(EgfetError):
    pass


class NoInteriorMax(ExtractionError):
    """Transconductance is maximal at a grid edge; sweep does not reach its peak."""


class NonpositiveGm(ExtractionError):
    pass


class NonpositiveCurrent(ExtractionError):
    pass


class NegativeSecondDerivative(ExtractionError):
    pass


class NonpositiveDerivative(ExtractionError):
    pass


class InsufficientGateValues(ExtractionError):
    pass


class InsufficientDevices(ExtractionError):
    pass


class ParallelLines(ExtractionError):
    """Channel-resistance lines share a slope; intersection is undetermined."""


class MissingReference(ExtractionError):
    pass


class WindowBelowThreshold(ExtractionError):
    pass


# --- data I/O --------------------------------------------------------------

class DataError(EgfetError):
    pass


class ParseError(DataError):
    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class MissingMetadata(DataError):
    pass


class NonMonotoneGrid(DataError):
    pass


class InconsistentFamily(DataError):
    pass


class EmptyPlot(DataError):
    pass


class IoError(DataError):
    pass
