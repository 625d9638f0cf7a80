"""Exception hierarchy shared by every qmrel module."""


class QMRelError(Exception):
    """Base class for all library errors."""


class UsageError(QMRelError, ValueError):
    """Bad call: mismatched variable tables, unknown variables, bad arguments."""


class ParseError(UsageError):
    def __init__(self, text, position, expected):
        self.text = text
        self.position = position
        self.expected = expected
        pointer = " " * position + "^"
        super().__init__(f"parse error at position {position}: expected {expected}\n  {text}\n  {pointer}")


class UnsupportedDomainError(QMRelError):
    """A reduction would need to divide by a parameter-dependent leading coefficient."""


class BudgetExceeded(QMRelError):
    """A step or storage cap was hit. ``progress`` holds a partial-progress report."""

    def __init__(self, message, progress=None):
        super().__init__(message)
        self.progress = dict(progress or {})


class CacheError(QMRelError):
    """Basis cache file is corrupt, from another version, or fails its invariants."""


class NonInvertibleError(QMRelError, ZeroDivisionError):
    pass


class ValidationError(UsageError):
    """Input fails a number-theoretic precondition."""


class DegenerateFieldError(ValidationError):
    """The radicand is a perfect square, so there is no quadratic field."""


class ConstructionError(QMRelError):
    """An explicitly constructed value failed its post-verification."""

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = tuple(failed)


class ExponentOverflow(QMRelError, OverflowError):
    """An exponent would exceed the variable table's configured cap."""
