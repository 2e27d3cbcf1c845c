"""Exception types shared across the package."""

from __future__ import annotations


class CiaError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CiaError):
    """A domain invariant was violated (bad label, hierarchy, automaton...)."""


class FormatError(CiaError):
    """A document does not conform to the textual automaton format."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", col {column}"
            where += ": "
        super().__init__(where + message)


class RefinementTimeout(CiaError):
    """Partition refinement exceeded its time budget; the partial partition is discarded."""

    def __init__(self, elapsed: float, budget: float):
        self.elapsed = elapsed
        self.budget = budget
        super().__init__(f"partition refinement timed out after {elapsed:.3f}s (budget {budget:.3f}s)")


class OracleLimitError(CiaError):
    """The brute-force bisimulation oracle was asked to handle too many states."""


class SeparationError(CiaError):
    """Logistic MLE diverged: the classes are (quasi-)completely separated."""
