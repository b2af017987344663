from redbench.core.errors import RedbenchError


class AnalyticsError(RedbenchError):
    pass


class EmptyResultSetError(AnalyticsError):
    code = "empty-result-set"
    msg = "No run result matches {detail}."


class MissingSectionError(AnalyticsError):
    """
    A knowledge entry or an experiment report lacks one of its sections, or leaves it empty.
    """

    code = "missing-section"
    msg = "Missing section: {detail}"


class RepeatCountError(AnalyticsError):
    code = "repeat-count"
    msg = "Experiments must be repeated at least 3 times, got {detail}."


class CsvSchemaError(AnalyticsError):
    code = "csv-schema"
    msg = "Invalid results file: {detail}"


class MalformedBookError(AnalyticsError):
    """
    A rendered knowledge book cannot be read back, or an entry holds text that would break its layout.
    """

    code = "malformed-book"
    msg = "Malformed knowledge book: {detail}"


class UnknownReportError(AnalyticsError):
    code = "unknown-report"
    msg = "There is no experiment report {detail}."


class UnreadableArchiveError(AnalyticsError):
    code = "unreadable-archive"
    msg = "Cannot read the experiment archive: {detail}"
