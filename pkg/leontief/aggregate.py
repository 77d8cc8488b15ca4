"""Economy-wide sums, the Cobb-Douglas TFP residual and ordered-output views.

Output, capital and labor are homogeneous, so aggregation is plain
summation (math.fsum, so the result does not depend on list order). The
residual Z = Y / (K**alpha * L**(1 - alpha)) is whatever is left once the
factor bundle is divided out; comparing it across scenarios shows how much
of a "productivity jump" comes from coefficients rather than factors.
"""

import logging
import math
from dataclasses import dataclass, field

from leontief.config import DEFAULT_ALPHA
from leontief.core import Regime, classify_regime, output
from leontief.errors import DomainError, OrderingError
from leontief.scenarios import Scenario, generate, is_output_ordered, order_by_output

logger = logging.getLogger("leontief")


@dataclass(frozen=True)
class AggregateRecord:
    Y: float
    K: float
    L: float
    moment: int = 0
    label: str = ""


@dataclass(frozen=True)
class TFPRecord:
    alpha: float
    Z: float
    source: AggregateRecord

    @property
    def bundle(self) -> float:
        return factor_bundle(self.source.K, self.source.L, self.alpha)


@dataclass(frozen=True)
class TFPDecomposition:
    base_label: str
    variant_label: str
    dz_total: float
    shared_factors: bool  # identical (K, L): the whole difference is an output effect
    output_effect: float  # (Y_variant - Y_base) / bundle_base
    factor_effect: float  # Y_variant * (1/bundle_variant - 1/bundle_base)


@dataclass(frozen=True)
class Break:
    index: int  # 1-based position in output order of the first establishment in the new regime
    before: Regime
    after: Regime


@dataclass
class BreakReport:
    breaks: list[Break] = field(default_factory=list)
    ordered: bool = True
    label: str = ""


@dataclass(frozen=True)
class CurvePoint:
    index: int
    x: float  # k/l
    y: float  # y/l


@dataclass
class PerWorkerCurve:
    points: list[CurvePoint]
    label: str = ""

    @property
    def xs(self) -> list[float]:
        return [p.x for p in self.points]

    @property
    def ys(self) -> list[float]:
        return [p.y for p in self.points]


@dataclass(frozen=True)
class ProfilePoint:
    index: int
    id: int
    y: float
    regime: Regime


@dataclass(frozen=True)
class BreakFrequency:
    label: str
    runs: int
    mean_breaks: float
    share_with_break: float


# ─── Aggregation and TFP ─────────────────────────────────────────────────────


def aggregate(sc: Scenario, moment: int = 0) -> AggregateRecord:
    if not sc.establishments:
        raise DomainError(f"cannot aggregate empty scenario {sc.label!r}", field="establishments")
    return AggregateRecord(
        Y=math.fsum(output(e) for e in sc.establishments),
        K=math.fsum(e.k for e in sc.establishments),
        L=math.fsum(e.l for e in sc.establishments),
        moment=moment,
        label=sc.label,
    )


def _check_alpha(alpha: float) -> None:
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}", field="alpha")


def factor_bundle(K: float, L: float, alpha: float) -> float:
    """K**alpha * L**(1 - alpha)."""
    return K ** alpha * L ** (1.0 - alpha)


def tfp(agg: AggregateRecord, alpha: float = DEFAULT_ALPHA) -> TFPRecord:
    _check_alpha(alpha)
    for name in ("Y", "K", "L"):
        value = getattr(agg, name)
        if not value > 0:
            raise DomainError(f"{name} must be positive, got {value}", field=name)
    return TFPRecord(alpha=alpha, Z=agg.Y / factor_bundle(agg.K, agg.L, alpha), source=agg)


def reconstruct_output(rec: TFPRecord) -> float:
    """Z * K**alpha * L**(1 - alpha); equals the source Y up to rounding."""
    return rec.Z * rec.bundle


def decompose_tfp(base: TFPRecord, variant: TFPRecord) -> TFPDecomposition:
    if base.alpha != variant.alpha:
        raise DomainError(
            f"cannot compare Z computed at alpha={base.alpha} with alpha={variant.alpha}",
            field="alpha")
    shared = (math.isclose(base.source.K, variant.source.K, rel_tol=1e-12)
              and math.isclose(base.source.L, variant.source.L, rel_tol=1e-12))
    return TFPDecomposition(
        base_label=base.source.label,
        variant_label=variant.source.label,
        dz_total=variant.Z - base.Z,
        shared_factors=shared,
        output_effect=(variant.source.Y - base.source.Y) / base.bundle,
        factor_effect=variant.source.Y * (1.0 / variant.bundle - 1.0 / base.bundle),
    )


# ─── Ordered-output views ────────────────────────────────────────────────────


def _require_ordered(sc: Scenario, what: str) -> None:
    if not is_output_ordered(sc):
        raise OrderingError(f"{what} needs establishments ordered by output; "
                            f"call order_by_output on {sc.label!r} first")


def detect_breaks(sc: Scenario) -> BreakReport:
    """Positions in output order where the binding factor switches."""
    _require_ordered(sc, "detect_breaks")
    regimes = [classify_regime(e) for e in sc.establishments]
    breaks = [
        Break(index=m + 1, before=regimes[m - 1], after=regimes[m])
        for m in range(1, len(regimes))
        if regimes[m] is not regimes[m - 1]
    ]
    logger.debug(f"{sc.label}: {len(breaks)} break(s) at {[b.index for b in breaks]}")
    return BreakReport(breaks=breaks, ordered=True, label=sc.label)


def per_worker_curve(sc: Scenario) -> PerWorkerCurve:
    _require_ordered(sc, "per_worker_curve")
    return PerWorkerCurve(
        points=[CurvePoint(index=i, x=e.k / e.l, y=output(e) / e.l)
                for i, e in enumerate(sc.establishments, start=1)],
        label=sc.label,
    )


def output_profile(sc: Scenario) -> list[ProfilePoint]:
    """The rising output line: one point per establishment in output order."""
    ordered = order_by_output(sc)
    return [ProfilePoint(index=i, id=e.id, y=output(e), regime=classify_regime(e))
            for i, e in enumerate(ordered.establishments, start=1)]


def break_frequency(scenarios: list[Scenario], label: str = "") -> BreakFrequency:
    """Average break count and share of scenarios with at least one break."""
    if not scenarios:
        raise DomainError("break_frequency needs at least one scenario", field="scenarios")
    counts = [len(detect_breaks(order_by_output(sc)).breaks) for sc in scenarios]
    return BreakFrequency(
        label=label or scenarios[0].label,
        runs=len(counts),
        mean_breaks=sum(counts) / len(counts),
        share_with_break=sum(1 for c in counts if c > 0) / len(counts),
    )


def replicate_breaks(spec, replicates: int) -> BreakFrequency:
    """Regenerate `spec` with seeds seed..seed+replicates-1 and count breaks."""
    if replicates < 1:
        raise DomainError(f"replicates must be at least 1, got {replicates}", field="replicates")
    runs = [generate(spec.model_copy(update={"seed": spec.seed + r})) for r in range(replicates)]
    return break_frequency(runs, label=spec.label)
