"""
VisNet exceptions
Every error carries the process exit code the CLI reports for it.
"""


class VisnetError(Exception):
    """Base class for all VisNet failures"""

    exit_code = 2

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class IngestError(VisnetError):
    """Input could not be read: missing file, bad cell, too few rows"""

    exit_code = 1


class SeriesError(IngestError):
    """Invalid series, window or synthetic spec"""


class AnalysisError(VisnetError):
    """A numerical stage failed"""

    exit_code = 2


class GraphError(AnalysisError):
    pass


class DfaError(AnalysisError):
    pass


class MetricsError(AnalysisError):
    pass


class RegressionError(AnalysisError):
    pass


class TailFitError(AnalysisError):
    pass


class ReportIOError(VisnetError):
    """Writing an output file failed"""

    exit_code = 3
