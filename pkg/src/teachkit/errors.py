"""Exception types shared across the toolkit."""

from __future__ import annotations


class TeachkitError(Exception):
    """Base class for all toolkit errors."""


class DimensionMismatch(TeachkitError, ValueError):
    pass


class ContradictorySample(TeachkitError, ValueError):
    pass


class InvalidClass(TeachkitError, ValueError):
    pass


class ClassFormatError(TeachkitError, ValueError):
    """Raised by the text parsers; carries the 1-based line and column."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class NoPositiveTeachingSet(TeachkitError):
    def __init__(self, concept: int, rival: int):
        super().__init__(
            f"concept {concept} has no positive teaching set: "
            f"concept {rival} contains it"
        )
        self.concept = concept
        self.rival = rival


class InconsistentTeacherMap(TeachkitError, ValueError):
    def __init__(self, concept: int):
        super().__init__(f"sample assigned to concept {concept} is not consistent with it")
        self.concept = concept


class SearchBudgetExceeded(TeachkitError):
    """An exact search ran out of nodes or time.

    ``lower`` and ``upper`` bracket the true value; ``upper`` is ``None`` when
    no feasible solution was found before the budget ran out.
    """

    def __init__(self, lower, upper=None, message: str = "search budget exceeded"):
        super().__init__(f"{message} (bracket [{lower}, {upper}])")
        self.lower = lower
        self.upper = upper


class ForbiddenEdge(TeachkitError, ValueError):
    pass
