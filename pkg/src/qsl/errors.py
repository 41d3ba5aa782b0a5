"""Exception hierarchy.

Every error raised on purpose by the package derives from :class:`QSLError`.
Errors that describe a measured violation carry it on ``.violation`` so that
callers (and the JSON report) can say by how much a check failed.
"""

from __future__ import annotations


class QSLError(Exception):
    """Base class for all package errors."""


class NumericalError(QSLError):
    """A computation produced something it should not have (CLI exit code 3)."""


class InvalidInput(QSLError, ValueError):
    """Argument failed a precondition."""


class MeasuredViolation(InvalidInput):
    def __init__(self, message: str, violation: float):
        super().__init__(f"{message} (violation {violation:.3e})")
        self.violation = float(violation)


class NotHermitian(MeasuredViolation):
    pass


class NotPSD(MeasuredViolation):
    pass


class TraceDeviation(MeasuredViolation):
    pass


class NotNormalized(MeasuredViolation):
    pass


class DimMismatch(InvalidInput):
    pass


class BadRank(InvalidInput):
    pass


class StepMismatch(InvalidInput):
    pass


class TooFewSamples(InvalidInput):
    pass


class UnknownName(InvalidInput, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""


class MixedInitialState(InvalidInput):
    pass


class NumericalFailure(NumericalError):
    pass


class DriftExceeded(NumericalError):
    def __init__(self, message: str, index: int, cause: Exception | None = None):
        super().__init__(f"{message} at grid index {index}")
        self.index = index
        self.cause = cause


class PurityDegenerate(NumericalError):
    def __init__(self, message: str, index: int | None = None):
        where = f" at grid index {index}" if index is not None else ""
        super().__init__(message + where)
        self.index = index


class ZeroEnergy(NumericalError):
    pass


class ZeroDenominator(NumericalError):
    pass


class DomainExit(NumericalError):
    def __init__(self, message: str, index: int):
        super().__init__(f"{message} at grid index {index}")
        self.index = index


class ConfigError(QSLError):
    """Scenario file problem (CLI exit code 2)."""


class ParseError(ConfigError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        loc = []
        if line is not None:
            loc.append(f"line {line}")
        if key is not None:
            loc.append(f"key {key!r}")
        super().__init__(f"{message} ({', '.join(loc)})" if loc else message)
        self.line = line
        self.key = key


class ValidationError(ConfigError):
    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
