class FirmFrobError(Exception):
    pass


class UsageError(FirmFrobError, ValueError):
    """Bad arguments: mismatched fields or dimensions, invalid parameters."""


class ParseError(FirmFrobError, ValueError):
    def __init__(self, message: str, location: str | None = None):
        self.message = message
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class Refused(FirmFrobError):
    """An operation's precondition does not hold; ``report`` carries the evidence."""

    def __init__(self, reason: str, report=None):
        self.reason = reason
        self.report = report
        super().__init__(reason)


class DegeneracyLeak(FirmFrobError):
    """A membership solve was underdetermined, which non-degeneracy rules out."""
