"""Establishment model and Leontief evaluation.

An establishment produces y = min(l/a, k/b): a and b are the labor and
capital technical coefficients (input per unit of output), so 1/a and 1/b
are the average productivities of labor and capital. The factor whose ratio
attains the min is the binding one.
"""

import logging
import math
from dataclasses import dataclass
from leontief._compat import StrEnum

from leontief.config import REGIME_TOLERANCE
from leontief.errors import DomainError

logger = logging.getLogger("leontief")


class Regime(StrEnum):
    LABOR_LIMITED = "LaborLimited"
    CAPITAL_LIMITED = "CapitalLimited"
    BALANCED = "Balanced"


@dataclass(frozen=True, slots=True)
class Establishment:
    """One production unit. Ids are 1-based."""
    id: int
    a: float  # labor per unit of output
    b: float  # capital per unit of output
    k: float
    l: float


@dataclass(frozen=True, slots=True)
class OutputRecord:
    y: float
    regime: Regime
    slack: float  # |l/a - k/b|, zero when Balanced


def check_establishment(est: Establishment) -> None:
    """Raise DomainError naming the first non-positive (or non-finite) field."""
    for name in ("a", "b", "k", "l"):
        value = getattr(est, name)
        if not math.isfinite(value) or value <= 0:
            raise DomainError(
                f"establishment {est.id}: {name} must be positive and finite, got {value!r}",
                field=name)


def capacity(est: Establishment) -> tuple[float, float]:
    """Output each factor alone would allow: (l/a, k/b)."""
    check_establishment(est)
    return est.l / est.a, est.k / est.b


def average_productivities(est: Establishment) -> tuple[float, float]:
    """(1/a, 1/b)."""
    check_establishment(est)
    return 1.0 / est.a, 1.0 / est.b


def _classify(labor_cap: float, capital_cap: float, tol: float) -> Regime:
    if labor_cap < capital_cap * (1.0 - tol):
        return Regime.LABOR_LIMITED
    if capital_cap < labor_cap * (1.0 - tol):
        return Regime.CAPITAL_LIMITED
    return Regime.BALANCED


def classify_regime(est: Establishment, tol: float = REGIME_TOLERANCE) -> Regime:
    """Name the binding factor, treating capacities within `tol` (relative) as Balanced."""
    if tol < 0:
        raise DomainError(f"regime tolerance must be non-negative, got {tol!r}", field="tol")
    labor_cap, capital_cap = capacity(est)
    return _classify(labor_cap, capital_cap, tol)


def eval_leontief(est: Establishment, tol: float = REGIME_TOLERANCE) -> OutputRecord:
    labor_cap, capital_cap = capacity(est)
    regime = classify_regime(est, tol)
    slack = 0.0 if regime is Regime.BALANCED else abs(labor_cap - capital_cap)
    return OutputRecord(y=min(labor_cap, capital_cap), regime=regime, slack=slack)


def output(est: Establishment) -> float:
    """Shorthand for eval_leontief(est).y."""
    labor_cap, capital_cap = capacity(est)
    return min(labor_cap, capital_cap)
