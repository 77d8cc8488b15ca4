"""Establishment ensemble generators.

Four deterministic kinds reproduce the published aggregate scenarios:

- I: identical coefficients everywhere, capital/labor ratio varies, labor binds.
- II: coefficients vary, every establishment uses the same capital/labor ratio.
- III: both vary along smooth decreasing schedules; optional regime switch.
- IV: kind III's factors with the coefficient schedule spread wider.

A fifth kind draws the average productivities 1/a and 1/b i.i.d. from a
Pareto or Weibull law by inverse-CDF transform of a seeded PCG64 stream.

Every generator works on positions i = 1..n of its schedule; ids are those
positions. The returned list order is a seeded permutation of the schedule,
so callers that care about order use order_by_output.
"""

import logging
import math
from dataclasses import dataclass, field
from leontief._compat import StrEnum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from leontief.config import (
    DEFAULT_ESTABLISHMENTS,
    DEFAULT_SEED,
    DEFAULT_SLACK_MARGIN,
    KIND_II_CAPITAL,
    KIND_II_LABOR,
    PUBLISHED_CAPITAL,
    PUBLISHED_LABOR,
)
from leontief.core import Establishment, output
from leontief.errors import SpecError

logger = logging.getLogger("leontief")


class ScenarioKind(StrEnum):
    I = "I"
    II = "II"
    III = "III"
    IV = "IV"
    DISTRIBUTION = "Distribution"


class DistributionFamily(StrEnum):
    PARETO = "Pareto"
    WEIBULL = "Weibull"


# ─── Per-kind defaults ───────────────────────────────────────────────────────

_PUBLISHED_TARGETS = (PUBLISHED_CAPITAL, PUBLISHED_LABOR)

_KIND_TARGETS = {
    ScenarioKind.I: _PUBLISHED_TARGETS,
    ScenarioKind.II: (KIND_II_CAPITAL, KIND_II_LABOR),
    ScenarioKind.III: _PUBLISHED_TARGETS,
    ScenarioKind.IV: _PUBLISHED_TARGETS,
    ScenarioKind.DISTRIBUTION: _PUBLISHED_TARGETS,
}

# Calibrated so the published run keeps Z_I < Z_II < Z_III < Z_IV
_KIND_DEFAULTS: dict[ScenarioKind, dict[str, float]] = {
    ScenarioKind.I: {"intensity_growth": 1.02},
    ScenarioKind.II: {"a1": 1.02, "g": 0.996, "b1": 0.6, "h": 0.996},
    ScenarioKind.III: {"a1": 0.995, "g": 0.994, "h": 0.999, "slack_decay": 0.996},
    ScenarioKind.IV: {"a1": 0.995, "g": 0.994, "h": 0.999, "slack_decay": 0.996,
                      "dispersion": 1.12},
    ScenarioKind.DISTRIBUTION: {"intensity_growth": 1.02},
}

# Which kinds accept each kind-specific parameter
_KIND_FIELDS: dict[str, set[ScenarioKind]] = {
    "intensity": {ScenarioKind.II},
    "b1": {ScenarioKind.II},
    "a1": {ScenarioKind.II, ScenarioKind.III, ScenarioKind.IV},
    "g": {ScenarioKind.II, ScenarioKind.III, ScenarioKind.IV},
    "h": {ScenarioKind.II, ScenarioKind.III, ScenarioKind.IV},
    "slack_decay": {ScenarioKind.III, ScenarioKind.IV},
    "dispersion": {ScenarioKind.IV},
    "break_index": {ScenarioKind.III},
    "base_break_index": {ScenarioKind.IV},
    "intensity_growth": {ScenarioKind.I, ScenarioKind.DISTRIBUTION},
    "distribution": {ScenarioKind.DISTRIBUTION},
}


# ─── Specs ───────────────────────────────────────────────────────────────────


class DistributionParams(BaseModel):
    model_config = ConfigDict(extra="forbid")

    family: DistributionFamily
    shape: float
    scale: float = 1.0

    @model_validator(mode="after")
    def _check_params(self):
        for name in ("shape", "scale"):
            value = getattr(self, name)
            if not math.isfinite(value) or value <= 0:
                raise SpecError(f"{self.family} {name} must be positive, got {value!r}")
        return self


class ScenarioSpec(BaseModel):
    """Generation rule for one ensemble.

    Unset kind-specific parameters are filled with the kind's defaults on
    validation, so a validated spec always states its full schedule.
    """
    model_config = ConfigDict(extra="forbid")

    kind: ScenarioKind
    label: str | None = None
    n: int = Field(DEFAULT_ESTABLISHMENTS, ge=2)
    seed: int = Field(DEFAULT_SEED, ge=0)
    capital: float | None = Field(None, gt=0)
    labor: float | None = Field(None, gt=0)
    labor_spread: float = Field(1.0, ge=0)  # last establishment's labor weight minus the first's
    slack_margin: float = Field(DEFAULT_SLACK_MARGIN, gt=0)
    intensity_growth: float | None = Field(None, gt=0)
    intensity: float | None = Field(None, gt=0)
    a1: float | None = Field(None, gt=0)
    g: float | None = None
    b1: float | None = Field(None, gt=0)
    h: float | None = None
    slack_decay: float | None = None
    dispersion: float | None = None
    break_index: int | None = None
    base_break_index: int | None = None
    distribution: DistributionParams | None = None

    @model_validator(mode="after")
    def _fill_and_check(self):
        for name, kinds in _KIND_FIELDS.items():
            if getattr(self, name) is not None and self.kind not in kinds:
                allowed = ", ".join(sorted(k.value for k in kinds))
                raise SpecError(f"{name} applies to kind {allowed}, not {self.kind}")

        for name, value in _KIND_DEFAULTS[self.kind].items():
            if getattr(self, name) is None:
                setattr(self, name, value)
        if self.label is None:
            self.label = f"Scenario {self.kind}"

        default_capital, default_labor = _KIND_TARGETS[self.kind]
        if self.labor is None:
            self.labor = default_labor
        if self.kind is ScenarioKind.II and self.intensity is not None:
            if self.capital is None:
                self.capital = self.intensity * self.labor
            elif not math.isclose(self.capital, self.intensity * self.labor, rel_tol=1e-12):
                raise SpecError(
                    f"intensity {self.intensity} does not match capital/labor "
                    f"{self.capital}/{self.labor}")
        if self.capital is None:
            self.capital = default_capital
        if self.kind is ScenarioKind.II and self.intensity is None:
            self.intensity = self.capital / self.labor

        for name in ("g", "h", "slack_decay"):
            value = getattr(self, name)
            if value is not None and not 0 < value < 1:
                raise SpecError(f"{name} must lie in (0, 1), got {value}")
        if self.slack_decay is not None and self.slack_decay <= self.g:
            raise SpecError(
                f"slack_decay ({self.slack_decay}) must exceed g ({self.g}) "
                f"so output keeps rising past the break")
        if self.dispersion is not None and self.dispersion <= 1:
            raise SpecError(f"dispersion must exceed 1, got {self.dispersion}")
        for name in ("break_index", "base_break_index"):
            value = getattr(self, name)
            if value is not None and not 2 <= value <= self.n - 1:
                raise SpecError(f"{name} must lie in [2, {self.n - 1}], got {value}")
        if self.kind is ScenarioKind.DISTRIBUTION and self.distribution is None:
            raise SpecError("kind Distribution needs distribution parameters")
        return self


@dataclass
class Scenario:
    label: str
    establishments: list[Establishment]
    spec: ScenarioSpec | None = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.establishments)


def published_specs(seed: int = DEFAULT_SEED) -> list[ScenarioSpec]:
    """The four published aggregate scenarios, breaks at 18 in III and IV."""
    return [
        ScenarioSpec(kind=ScenarioKind.I, seed=seed),
        ScenarioSpec(kind=ScenarioKind.II, seed=seed),
        ScenarioSpec(kind=ScenarioKind.III, break_index=18, seed=seed),
        ScenarioSpec(kind=ScenarioKind.IV, base_break_index=18, seed=seed),
    ]


# ─── Inverse CDFs ────────────────────────────────────────────────────────────


def pareto_quantile(u: np.ndarray, shape: float, scale: float = 1.0) -> np.ndarray:
    """Inverse of F(x) = 1 - (scale/x)**shape on [scale, inf)."""
    return scale * (1.0 - np.asarray(u)) ** (-1.0 / shape)


def weibull_quantile(u: np.ndarray, shape: float, scale: float = 1.0) -> np.ndarray:
    """Inverse of F(x) = 1 - exp(-(x/scale)**shape); shape 1 is the exponential."""
    return scale * (-np.log1p(-np.asarray(u))) ** (1.0 / shape)


_QUANTILES = {
    DistributionFamily.PARETO: pareto_quantile,
    DistributionFamily.WEIBULL: weibull_quantile,
}


# ─── Schedules ───────────────────────────────────────────────────────────────


def _positions(n: int) -> np.ndarray:
    return np.arange(n, dtype=float)  # i - 1


def _labor_schedule(spec: ScenarioSpec) -> np.ndarray:
    t = _positions(spec.n) / (spec.n - 1)
    weights = 1.0 + spec.labor_spread * t
    return spec.labor * weights / weights.sum()


def _rising_capital(spec: ScenarioSpec, labor: np.ndarray) -> np.ndarray:
    raw = spec.intensity_growth ** _positions(spec.n) * labor
    return spec.capital * raw / raw.sum()


def _slack_factors(spec: ScenarioSpec, break_index: int | None) -> np.ndarray:
    """Capital capacity over labor capacity per position.

    Above 1 the establishment is labor-limited. With a break at m the factor
    crosses 1 between positions m-1 and m and keeps falling.
    """
    if break_index is None:
        return np.full(spec.n, 1.0 + spec.slack_margin)
    exponents = _positions(spec.n) + 1 - break_index + 0.5
    return spec.slack_decay ** exponents


def _establishments(a, b, k, l) -> list[Establishment]:
    return [
        Establishment(id=i + 1, a=float(a[i]), b=float(b[i]), k=float(k[i]), l=float(l[i]))
        for i in range(len(l))
    ]


def _build_uniform_coefficients(spec: ScenarioSpec) -> list[Establishment]:
    labor = _labor_schedule(spec)
    capital = _rising_capital(spec, labor)
    a = np.ones(spec.n)
    # one b for all, leaving every establishment at least slack_margin of idle capital
    b = np.full(spec.n, (capital / labor).min() / (1.0 + spec.slack_margin))
    return _establishments(a, b, capital, labor)


def _build_uniform_intensity(spec: ScenarioSpec) -> list[Establishment]:
    labor = _labor_schedule(spec)
    pos = _positions(spec.n)
    a = spec.a1 * spec.g ** pos
    b = spec.b1 * spec.h ** pos
    return _establishments(a, b, spec.intensity * labor, labor)


def _smooth_schedule(spec: ScenarioSpec, break_index: int | None):
    """Kind III construction; returns (a, b, k, l, capital scale)."""
    labor = _labor_schedule(spec)
    pos = _positions(spec.n)
    a = spec.a1 * spec.g ** pos
    b_raw = spec.h ** pos
    raw_capital = b_raw * _slack_factors(spec, break_index) * labor / a
    scale = spec.capital / raw_capital.sum()
    return a, scale * b_raw, scale * raw_capital, labor, scale


def _build_smooth(spec: ScenarioSpec) -> list[Establishment]:
    a, b, k, l, _ = _smooth_schedule(spec, spec.break_index)
    return _establishments(a, b, k, l)


def _build_dispersed(spec: ScenarioSpec) -> list[Establishment]:
    _, _, k, l, scale = _smooth_schedule(spec, spec.base_break_index)
    spread = spec.dispersion * _positions(spec.n)
    a = spec.a1 * spec.g ** spread
    b = scale * spec.h ** spread
    return _establishments(a, b, k, l)


def _build_sampled(spec: ScenarioSpec, rng: np.random.Generator) -> list[Establishment]:
    dist = spec.distribution
    quantile = _QUANTILES[dist.family]
    tiny = np.finfo(float).tiny
    # draw order is part of the seed contract: 1/a first, then 1/b
    labor_productivity = np.maximum(quantile(rng.random(spec.n), dist.shape, dist.scale), tiny)
    capital_productivity = np.maximum(quantile(rng.random(spec.n), dist.shape, dist.scale), tiny)
    labor = _labor_schedule(spec)
    capital = _rising_capital(spec, labor)
    return _establishments(1.0 / labor_productivity, 1.0 / capital_productivity, capital, labor)


_BUILDERS = {
    ScenarioKind.I: _build_uniform_coefficients,
    ScenarioKind.II: _build_uniform_intensity,
    ScenarioKind.III: _build_smooth,
    ScenarioKind.IV: _build_dispersed,
}


# ─── Public API ──────────────────────────────────────────────────────────────


def _shuffled(spec: ScenarioSpec, establishments: list[Establishment],
              rng: np.random.Generator) -> Scenario:
    order = rng.permutation(spec.n)
    sc = Scenario(label=spec.label, establishments=[establishments[j] for j in order], spec=spec)
    logger.info(f"Generated {spec.label}: kind={spec.kind}, n={spec.n}, seed={spec.seed}")
    return sc


def generate(spec: ScenarioSpec) -> Scenario:
    """Build the ensemble a validated spec describes. Same spec, same result."""
    if spec.kind is ScenarioKind.DISTRIBUTION:
        return generate_distribution(spec)
    rng = np.random.default_rng(spec.seed)
    return _shuffled(spec, _BUILDERS[spec.kind](spec), rng)


def generate_distribution(spec: ScenarioSpec) -> Scenario:
    if spec.kind is not ScenarioKind.DISTRIBUTION or spec.distribution is None:
        raise SpecError(f"generate_distribution needs kind Distribution, got {spec.kind}")
    rng = np.random.default_rng(spec.seed)
    return _shuffled(spec, _build_sampled(spec, rng), rng)


def _output_key(est: Establishment) -> tuple[float, int]:
    return output(est), est.id


def order_by_output(sc: Scenario) -> Scenario:
    """Ascending by output, ties by id. Returns a new scenario."""
    return Scenario(label=sc.label, establishments=sorted(sc.establishments, key=_output_key),
                    spec=sc.spec)


def is_output_ordered(sc: Scenario) -> bool:
    keys = [_output_key(e) for e in sc.establishments]
    return all(prev <= cur for prev, cur in zip(keys, keys[1:]))
