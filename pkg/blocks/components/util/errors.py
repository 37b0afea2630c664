# blocks/components/util/errors.py
"""
Purpose
-------
Gemeinsame Fehlerklassen aller Komponenten. Bewusst dünn: jede Klasse erbt von
ValueError bzw. RuntimeError, damit Aufrufer auch mit den eingebauten Typen
fangen können.

Contracts
---------
class DomainError(ValueError)
class BudgetExceededError(RuntimeError)
class NumericallySingularError(ValueError)
class IfsValidationError(ValueError)
class IfsFormatError(ValueError)
class DegenerateCloudError(ValueError)
class UsageError(ValueError)

Side Effects
------------
Keine.
"""

from __future__ import annotations

from typing import Any, Optional


class DomainError(ValueError):
    """Argument outside the domain of an operation (empty word, bad symbol, ...)."""


class BudgetExceededError(RuntimeError):
    """Enumeration of #I^n words would exceed the configured budget."""

    def __init__(self, n: int, count: int, budget: int) -> None:
        self.n = int(n)
        self.count = int(count)
        self.budget = int(budget)
        super().__init__(f"budget exceeded: level n={n} needs {count} words, budget is {budget}")


class NumericallySingularError(ValueError):
    """Smallest singular value below 1e-14 times the largest."""


class IfsValidationError(ValueError):
    """Hard validation failure of an affine IFS (singular or expanding map, too few maps)."""

    def __init__(self, message: str, report: Optional[Any] = None) -> None:
        self.report = report
        super().__init__(message)


class IfsFormatError(ValueError):
    """Malformed IFS document; message is anchored to a line of the source file."""

    def __init__(self, message: str, line: Optional[int] = None, path: Optional[str] = None) -> None:
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip() if where else message)


class DegenerateCloudError(ValueError):
    """Point cloud without spatial extent (all points equal)."""


class UsageError(ValueError):
    """Invalid command line or configuration input."""
