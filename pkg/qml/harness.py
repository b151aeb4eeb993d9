"""
Enumeration guard and verification bookkeeping.

Every exhaustive operation in qml asks a Budget before it starts enumerating,
so that an instance that is too large fails fast with BudgetExceeded instead of
running for hours. Verification sweeps collect their outcome in a
VerificationReport, which the suite runner merges into a JSON report.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_BUDGET = 10 ** 7
BUDGET_ENV_VAR = "QML_BUDGET"
MAX_RECORDED_FAILURES = 25

T = TypeVar("T")
R = TypeVar("R")


class BudgetExceeded(Exception):
    """Custom exception for enumerations larger than the configured budget."""

    def __init__(self, what: str, count: int, limit: int):
        self.what = what
        self.count = count
        self.limit = limit
        super().__init__(f"Enumeration of {what} needs {count} candidates, budget is {limit}")


@dataclass(frozen=True)
class Budget:
    """Upper bound on the number of candidates a single enumeration may visit."""

    limit: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.limit <= 0:
            raise ValueError(f"Budget must be positive, got {self.limit}")

    @classmethod
    def from_env(cls, environ: Optional[Dict[str, str]] = None) -> "Budget":
        """
        Build the default budget, honouring the QML_BUDGET environment variable.

        Raises:
            ValueError: If QML_BUDGET is set but not a positive integer
        """
        environ = os.environ if environ is None else environ
        raw = environ.get(BUDGET_ENV_VAR)
        if raw is None or not raw.strip():
            return cls()
        try:
            limit = int(raw)
        except ValueError:
            raise ValueError(f"{BUDGET_ENV_VAR} must be an integer, got {raw!r}")
        return cls(limit)

    def ensure(self, count: int, what: str) -> int:
        """
        Check that an enumeration of ``count`` candidates fits the budget.

        Args:
            count: Number of candidates the caller is about to visit
            what: Human readable description used in the error message

        Returns:
            ``count`` unchanged, so the call can be used inline

        Raises:
            BudgetExceeded: If ``count`` exceeds the limit
        """
        if count > self.limit:
            raise BudgetExceeded(what, count, self.limit)
        logger.debug("Budget ok for %s: %d <= %d", what, count, self.limit)
        return count


def resolve_budget(budget: Optional[Budget]) -> Budget:
    return budget if budget is not None else Budget.from_env()


@dataclass
class VerificationReport:
    """Outcome of one verification sweep: how many cases were checked and which failed."""

    name: str
    checked: int = 0
    failure_count: int = 0
    failures: List[Dict[str, Any]] = field(default_factory=list)
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def record(self, ok: bool, **context: Any) -> bool:
        """Count one checked case and keep its context if it failed."""
        self.checked += 1
        if not ok:
            self.fail(**context)
        return ok

    def fail(self, **context: Any) -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_RECORDED_FAILURES:
            self.failures.append(context)
        logger.warning("%s: counterexample %s", self.name, context)

    def merge(self, other: "VerificationReport", prefix: Optional[str] = None) -> None:
        """Fold another report into this one, optionally tagging its failures."""
        self.checked += other.checked
        self.failure_count += other.failure_count
        room = MAX_RECORDED_FAILURES - len(self.failures)
        for failure in other.failures[:max(room, 0)]:
            self.failures.append({"part": prefix or other.name, **failure})
        self.details[prefix or other.name] = other.details

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "checked": self.checked,
            "passed": self.passed,
            "failure_count": self.failure_count,
            "failures": self.failures,
            "details": self.details,
        }


def derive_rng(seed: int, *labels: str) -> np.random.Generator:
    """
    Create a generator that depends only on the seed and the given labels.

    Using a label-derived stream per check keeps results independent of the
    order in which concurrent checks happen to run.
    """
    entropy = [int(seed)] + [sum((i + 1) * ord(ch) for i, ch in enumerate(label)) for label in labels]
    return np.random.default_rng(entropy)


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """Map ``fn`` over ``items``, preserving order, with an optional thread pool."""
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
