"""Exception hierarchy shared by all simulator layers."""


class CryocamError(Exception):
    """Base class for simulator errors."""


class DomainError(CryocamError, ValueError):
    """An argument is outside the physical domain of an operation."""


class ConfigError(CryocamError):
    """A configuration or bias setting violates a validity constraint.

    Carries the full list of violations so callers can report all of
    them at once instead of only the first.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class NumericError(CryocamError):
    """A numerical routine failed to converge; message carries diagnostics."""


class UnsupportedModeError(CryocamError):
    """The requested operation is not defined in the selected bias mode."""


class UsageError(CryocamError, ValueError):
    """Malformed input data (wrong length, empty list, bad character)."""
