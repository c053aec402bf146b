"""Exception hierarchy shared by every wifipos module."""


class WifiPosError(ValueError):
    """Base class for all domain errors raised by wifipos."""


class SurveyParseError(WifiPosError):
    """One or more survey/query rows could not be parsed.

    ``errors`` holds ``(line_number, message)`` pairs, 1-based.
    """

    def __init__(self, source, errors):
        self.source = source
        self.errors = list(errors)
        line, msg = self.errors[0]
        text = f"{source} line {line}: {msg}"
        if len(self.errors) > 1:
            text += f" (+{len(self.errors) - 1} more malformed rows)"
        super().__init__(text)


class GridError(WifiPosError):
    """A grid point lies outside the configured grid."""


class NoUsableAPsError(WifiPosError):
    def __init__(self, msg="no usable APs"):
        super().__init__(msg)


class QueryError(WifiPosError):
    """Locating a query in a batch failed; ``index`` is its 0-based position."""

    def __init__(self, index, cause):
        self.index = index
        super().__init__(f"query {index}: {cause}")


class FormatError(WifiPosError):
    """A persisted file is not a valid wifipos document."""
