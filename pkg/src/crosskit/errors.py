"""Exception hierarchy shared by every crosskit module."""


class CrosskitError(Exception):
    """Base class for all errors raised by crosskit."""


class ParseError(CrosskitError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(CrosskitError, ValueError):
    """An argument lies outside the domain of an operation."""


class StructureError(CrosskitError, ValueError):
    """A partition, drawing or grouping is internally inconsistent."""


class BudgetError(CrosskitError):
    """The requested computation exceeds a configured size limit."""


class RegionError(CrosskitError):
    """A planar region is degenerate (zero or vanishing area)."""
