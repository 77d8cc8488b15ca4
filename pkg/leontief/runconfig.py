"""Run configuration: a JSON document validated by pydantic models.

Every field has a default, so `{}` is a valid config that reproduces the
published tables. Config problems of any kind reach callers as ConfigError.
"""

import json
import logging
import os
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from leontief.config import DEFAULT_ALPHA, DEFAULT_MAX_PERIODS, OUTPUT_DIR, OUTPUT_FORMAT
from leontief.core import Establishment
from leontief.dynamics import AdjustmentPolicy, ExpectationState, FactorPrices
from leontief.errors import ConfigError, LeontiefError
from leontief.scenarios import ScenarioSpec, published_specs

logger = logging.getLogger("leontief")


class StateConfig(BaseModel):
    """Initial establishment state for the adjustment run (defaults: the published capital-expectation state)."""
    model_config = ConfigDict(extra="forbid")

    id: int = 14
    a: float = Field(1 / 1.09562, gt=0)
    b: float = Field(1 / 1.68849, gt=0)
    k: float = Field(65.0, gt=0)
    l: float = Field(100.0, gt=0)
    expected_a: float = Field(1 / 1.09649, gt=0)
    expected_b: float | None = Field(None, gt=0)  # unset: no change expected

    @model_validator(mode="after")
    def _fill_expected_b(self):
        if self.expected_b is None:
            self.expected_b = self.b
        return self

    def to_state(self) -> ExpectationState:
        est = Establishment(id=self.id, a=self.a, b=self.b, k=self.k, l=self.l)
        return ExpectationState(current=est, expected_a=self.expected_a,
                                expected_b=self.expected_b)


class DynamicsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    state: StateConfig = Field(default_factory=StateConfig)
    policy: AdjustmentPolicy = Field(default_factory=AdjustmentPolicy)
    prices: FactorPrices = Field(default_factory=FactorPrices)
    max_periods: int = Field(DEFAULT_MAX_PERIODS, ge=2)


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scenarios: list[ScenarioSpec] = Field(default_factory=published_specs)
    alpha: float = Field(DEFAULT_ALPHA, gt=0, lt=1)
    out_dir: Path = OUTPUT_DIR
    format: Literal["csv", "jsonl"] = OUTPUT_FORMAT
    seed: int | None = Field(None, ge=0)  # overrides every scenario's seed when set
    dynamics: DynamicsConfig = Field(default_factory=DynamicsConfig)

    def scenario_specs(self) -> list[ScenarioSpec]:
        if self.seed is None:
            return list(self.scenarios)
        return [s.model_copy(update={"seed": self.seed}) for s in self.scenarios]


def _format_validation_error(error: ValidationError) -> str:
    """One `dotted.field: message` per problem, joined with "; "."""
    parts = []
    for err in error.errors():
        where = ".".join(str(loc) for loc in err["loc"]) or "(root)"
        parts.append(f"{where}: {err['msg'].removeprefix('Value error, ')}")
    return "; ".join(parts)


def _validate(data, source: str) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{source}: {_format_validation_error(e)}") from e
    except LeontiefError as e:
        raise ConfigError(f"{source}: {e}") from e


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e.strerror or e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be an object, got {type(data).__name__}")

    config = _validate(data, str(path))
    logger.info(f"Loaded config {path.name}: {len(config.scenarios)} scenario(s)")
    return config


def save_config(config: RunConfig, path: str | Path) -> None:
    """Write the fully-defaulted config (atomic write via tmp + replace)."""
    path = Path(path)
    text = json.dumps(config.model_dump(mode="json"), indent=2) + "\n"
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        tmp.write_text(text, encoding="utf-8")
        os.replace(tmp, path)
    except OSError as e:
        raise ConfigError(f"cannot write config {path}: {e.strerror or e}") from e


def apply_overrides(config: RunConfig, **overrides) -> RunConfig:
    """Return a revalidated copy with the non-None overrides applied."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    if not updates:
        return config
    return _validate(config.model_dump() | updates, "command line")
