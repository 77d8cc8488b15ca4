"""Expectation-driven factor adjustment for a single establishment.

Factor levels at moment j are fixed. A factor can only change from j+1 on,
so its marginal productivity is the output the agent expects at j+1 with
one more unit of it, minus today's output, per unit. Under Leontief
technology that gain is positive only if the agent also expects the other
factor's average productivity to rise, so expectations about the technical
coefficients are exogenous inputs here.

Each period the agent raises any factor whose expected marginal
productivity exceeds its real price. If the realized coefficients at j+1
do not confirm the expectation, the increase is undone at j+2.
"""

import logging
from dataclasses import dataclass, field, replace
from leontief._compat import StrEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from leontief.config import DEFAULT_FACTOR_STEP, DEFAULT_MAX_PERIODS, GAP_TOLERANCE
from leontief.core import Establishment, average_productivities, check_establishment, output
from leontief.errors import DomainError, SpecError

logger = logging.getLogger("leontief")


class Factor(StrEnum):
    CAPITAL = "Capital"
    LABOR = "Labor"


class Action(StrEnum):
    INCREASE_K = "IncreaseK"
    INCREASE_L = "IncreaseL"
    BOTH = "Both"
    HOLD = "Hold"
    REVERT = "Revert"


_INCREASES = {Action.INCREASE_K, Action.INCREASE_L, Action.BOTH}


class Realization(StrEnum):
    CONFIRM = "Confirm"  # realized coefficients are the expected ones
    DISCONFIRM = "Disconfirm"  # realized coefficients stay at today's
    SCRIPTED = "Scripted"  # caller-supplied (a, b) per decision, then Confirm


@dataclass(frozen=True)
class ExpectationState:
    """Coefficients and factors at `moment`, plus the coefficients expected for moment + 1."""
    current: Establishment
    expected_a: float
    expected_b: float
    moment: int = 0

    def __post_init__(self):
        check_establishment(self.current)
        for name in ("expected_a", "expected_b"):
            value = getattr(self, name)
            if not value > 0:
                raise DomainError(f"{name} must be positive, got {value!r}", field=name)


@dataclass(frozen=True)
class MarginalProductivity:
    factor: Factor
    value: float
    increment: float
    output_now: float
    output_expected: float


class FactorPrices(BaseModel):
    model_config = ConfigDict(extra="forbid")

    real_wage: float = Field(1.0, gt=0)
    real_interest: float = Field(0.05, gt=0)


class AdjustmentPolicy(BaseModel):
    model_config = ConfigDict(extra="forbid")

    capital_step: float = DEFAULT_FACTOR_STEP
    labor_step: float = DEFAULT_FACTOR_STEP
    tolerance: float = GAP_TOLERANCE
    realization: Realization = Realization.CONFIRM
    script: list[tuple[float, float]] = []

    @model_validator(mode="after")
    def _check_policy(self):
        for name in ("capital_step", "labor_step"):
            if not getattr(self, name) > 0:
                raise SpecError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.tolerance >= 0:
            raise SpecError(f"tolerance must be non-negative, got {self.tolerance}")
        if self.realization is Realization.SCRIPTED and not self.script:
            raise SpecError("Scripted realization needs a non-empty script of (a, b) pairs")
        for a, b in self.script:
            if not (a > 0 and b > 0):
                raise SpecError(f"scripted coefficients must be positive, got ({a}, {b})")
        return self


@dataclass(frozen=True)
class TraceRow:
    moment: int
    k: float  # levels in force at this moment, before any decision takes effect
    l: float
    mp_k: float
    mp_l: float
    gap_k: float
    gap_l: float
    action: Action
    confirmed: bool


@dataclass
class AdjustmentTrace:
    rows: list[TraceRow] = field(default_factory=list)
    final: ExpectationState | None = None  # state after the last row

    @property
    def actions(self) -> list[Action]:
        return [r.action for r in self.rows]


# ─── Marginal productivities ─────────────────────────────────────────────────


def expected_mp_capital(st: ExpectationState, dk: float = DEFAULT_FACTOR_STEP) -> MarginalProductivity:
    """Expected output gain per unit of capital added at j+1, labor held fixed."""
    if not dk > 0:
        raise DomainError(f"capital increment must be positive, got {dk}", field="dk")
    est = st.current
    now = output(est)
    expected = min(est.l / st.expected_a, (est.k + dk) / est.b)
    return MarginalProductivity(Factor.CAPITAL, (expected - now) / dk, dk, now, expected)


def expected_mp_labor(st: ExpectationState, dl: float = DEFAULT_FACTOR_STEP) -> MarginalProductivity:
    """Expected output gain per unit of labor added at j+1, capital held fixed."""
    if not dl > 0:
        raise DomainError(f"labor increment must be positive, got {dl}", field="dl")
    est = st.current
    now = output(est)
    expected = min((est.l + dl) / est.a, est.k / st.expected_b)
    return MarginalProductivity(Factor.LABOR, (expected - now) / dl, dl, now, expected)


# ─── Adjustment ──────────────────────────────────────────────────────────────


def _realize(st: ExpectationState, policy: AdjustmentPolicy, decision: int) -> tuple[float, float]:
    if policy.realization is Realization.DISCONFIRM:
        return st.current.a, st.current.b
    if policy.realization is Realization.SCRIPTED and decision < len(policy.script):
        return policy.script[decision]
    return st.expected_a, st.expected_b


def _decide(gap_k: float, gap_l: float, tol: float) -> Action:
    raise_k, raise_l = gap_k > tol, gap_l > tol
    if raise_k and raise_l:
        return Action.BOTH
    if raise_k:
        return Action.INCREASE_K
    if raise_l:
        return Action.INCREASE_L
    return Action.HOLD


def adjust_step(st: ExpectationState, prices: FactorPrices, policy: AdjustmentPolicy,
                decision: int = 0) -> tuple[ExpectationState, TraceRow]:
    """Decide at moment j, realize coefficients for j+1 and return the j+1 state.

    `decision` counts earlier adjust_step calls in the run; it picks the
    scripted coefficients, so Revert periods do not use up script entries.
    The agent's expectations for the following moment are reset to the
    realized coefficients.
    """
    mp_k = expected_mp_capital(st, policy.capital_step).value
    mp_l = expected_mp_labor(st, policy.labor_step).value
    gap_k = mp_k - prices.real_interest
    gap_l = mp_l - prices.real_wage
    action = _decide(gap_k, gap_l, policy.tolerance)

    a, b = _realize(st, policy, decision)
    confirmed = a == st.expected_a and b == st.expected_b
    est = st.current
    k = est.k + policy.capital_step if action in (Action.INCREASE_K, Action.BOTH) else est.k
    l = est.l + policy.labor_step if action in (Action.INCREASE_L, Action.BOTH) else est.l

    row = TraceRow(moment=st.moment, k=est.k, l=est.l, mp_k=mp_k, mp_l=mp_l,
                   gap_k=gap_k, gap_l=gap_l, action=action, confirmed=confirmed)
    nxt = ExpectationState(current=replace(est, a=a, b=b, k=k, l=l),
                           expected_a=a, expected_b=b, moment=st.moment + 1)
    logger.debug(f"moment {st.moment}: gap_k={gap_k:.6g} gap_l={gap_l:.6g} -> {action}"
                 f" ({'confirmed' if confirmed else 'disconfirmed'})")
    return nxt, row


def _revert(st: ExpectationState, undone: TraceRow, prices: FactorPrices,
            policy: AdjustmentPolicy) -> tuple[ExpectationState, TraceRow]:
    mp_k = expected_mp_capital(st, policy.capital_step).value
    mp_l = expected_mp_labor(st, policy.labor_step).value
    est = st.current
    row = TraceRow(moment=st.moment, k=est.k, l=est.l, mp_k=mp_k, mp_l=mp_l,
                   gap_k=mp_k - prices.real_interest, gap_l=mp_l - prices.real_wage,
                   action=Action.REVERT, confirmed=False)
    # restore the stored levels; (k + step) - step need not round-trip
    nxt = replace(st, current=replace(est, k=undone.k, l=undone.l), moment=st.moment + 1)
    logger.debug(f"moment {st.moment}: reverting to k={undone.k:.6g} l={undone.l:.6g}")
    return nxt, row


def run_adjustment(st: ExpectationState, prices: FactorPrices, policy: AdjustmentPolicy,
                   max_periods: int = DEFAULT_MAX_PERIODS) -> AdjustmentTrace:
    """Iterate until a period holds (both gaps within tolerance) or max_periods rows exist.

    With constant returns there is no interior optimum: an establishment
    whose unit cost w*a + r*b is below 1 can keep expanding, alternating
    IncreaseK and IncreaseL, until max_periods.
    """
    if max_periods < 2:
        raise SpecError(f"adjustment needs at least two periods, got max_periods={max_periods}")

    trace = AdjustmentTrace()
    state = st
    decisions = 0
    for _ in range(max_periods):
        last = trace.rows[-1] if trace.rows else None
        if last is not None and last.action in _INCREASES and not last.confirmed:
            state, row = _revert(state, last, prices, policy)
        else:
            state, row = adjust_step(state, prices, policy, decisions)
            decisions += 1
        trace.rows.append(row)
        if row.action is Action.HOLD:
            break
    trace.final = state

    labor_ap, capital_ap = average_productivities(state.current)
    logger.info(f"Adjustment ran {len(trace.rows)} period(s): "
                f"k {st.current.k:.6g} -> {state.current.k:.6g}, "
                f"l {st.current.l:.6g} -> {state.current.l:.6g}; "
                f"1/a={labor_ap:.6g} 1/b={capital_ap:.6g}")
    return trace


# ─── Published establishment states ──────────────────────────────────────────


def _establishment_14(k: float = 65.0, l: float = 100.0) -> Establishment:
    return Establishment(id=14, a=1 / 1.09562, b=1 / 1.68849, k=k, l=l)


def capital_expectation_state() -> ExpectationState:
    """Labor binds; the agent expects average labor productivity to rise to 1.09649."""
    est = _establishment_14()
    return ExpectationState(current=est, expected_a=1 / 1.09649, expected_b=est.b)


def labor_expectation_state() -> ExpectationState:
    """Same establishment; the agent expects average capital productivity to rise to 1.68868."""
    est = _establishment_14()
    return ExpectationState(current=est, expected_a=est.a, expected_b=1 / 1.68868)
