"""Exception hierarchy shared by the numerical modules."""


class RfsoError(Exception):
    """Base class for all errors raised by :mod:`rfso`."""


class DomainError(RfsoError, ValueError):
    """An argument lies outside the mathematical domain of a function."""


class NumericalError(RfsoError, ArithmeticError):
    """A computation overflowed, failed to converge or lost too much precision."""


class CapabilityError(RfsoError, NotImplementedError):
    """The requested case is valid mathematically but not supported here."""


class ConfigError(RfsoError, ValueError):
    """A configuration file or parameter record failed validation."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
