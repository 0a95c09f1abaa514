"""Exception types raised across the package."""


class InvalidParameterError(ValueError):
    """A scenario parameter violates its allowed range.

    ``key`` names the offending field so front ends can report it.
    """

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


class CapacityError(ValueError):
    """A class with positive traffic has a zero per-packet rate, so its occupancy is unbounded."""


class SingularSystemError(RuntimeError):
    """The global balance system could not be solved (reducible chain)."""


class ScenarioParseError(ValueError):
    def __init__(self, lineno, message):
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)
        self.lineno = lineno
