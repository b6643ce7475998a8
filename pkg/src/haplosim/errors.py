"""Exception types shared across the package."""


class InvalidParameterError(ValueError):
    """Raised when an argument violates an operation's contract."""


class TableFormatError(ValueError):
    """Raised when a haplotype table file cannot be parsed.

    Carries the offending line number so callers can report it.
    """

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no
