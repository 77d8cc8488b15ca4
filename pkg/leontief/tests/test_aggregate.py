"""Tests for aggregation, the TFP residual and the ordered-output views."""

import math

import pytest

from leontief.aggregate import (
    AggregateRecord,
    Break,
    aggregate,
    break_frequency,
    decompose_tfp,
    detect_breaks,
    output_profile,
    per_worker_curve,
    reconstruct_output,
    replicate_breaks,
    tfp,
)
from leontief.core import Establishment, Regime
from leontief.errors import DomainError, OrderingError
from leontief.scenarios import Scenario, ScenarioSpec, generate, order_by_output, published_specs

# Published aggregate rows: (K, L, Y)
ROW_I = (3257.98, 4879.44, 4879.44)
ROW_II = (3250.00, 5000.00, 5491.08)
ROW_III = (3257.98, 4879.44, 5492.13)
ROW_IV = (3257.98, 4879.44, 5518.54)


def _row_tfp(row, label: str = "", alpha: float = 0.5):
    K, L, Y = row
    return tfp(AggregateRecord(Y=Y, K=K, L=L, label=label), alpha)


def _scenario(*establishments: Establishment, label: str = "toy") -> Scenario:
    return Scenario(label=label, establishments=list(establishments))


def _est(id: int, l: float, k: float, a: float = 1.0, b: float = 1.0) -> Establishment:
    return Establishment(id=id, a=a, b=b, k=k, l=l)


# ---------------------------------------------------------------------------
# aggregate
# ---------------------------------------------------------------------------


def test_aggregate_two_establishments():
    sc = _scenario(_est(1, l=1, k=1), _est(2, l=1, k=1, a=0.5, b=0.5))
    agg = aggregate(sc, moment=3)
    assert (agg.Y, agg.K, agg.L) == (3.0, 2.0, 2.0)
    assert agg.moment == 3
    assert agg.label == "toy"


def test_aggregate_singleton():
    est = _est(1, l=7.0, k=5.0, a=0.5, b=2.0)
    agg = aggregate(_scenario(est))
    assert (agg.Y, agg.K, agg.L) == (2.5, 5.0, 7.0)


def test_aggregate_empty_rejected():
    with pytest.raises(DomainError):
        aggregate(_scenario())


def test_aggregate_additive_over_concatenation():
    one = generate(ScenarioSpec(kind="III", break_index=18))
    two = generate(ScenarioSpec(kind="II"))
    both = Scenario(label="both", establishments=one.establishments + two.establishments)
    a1, a2, ab = aggregate(one), aggregate(two), aggregate(both)
    assert ab.Y == pytest.approx(a1.Y + a2.Y, rel=1e-15)
    assert ab.K == pytest.approx(a1.K + a2.K, rel=1e-15)
    assert ab.L == pytest.approx(a1.L + a2.L, rel=1e-15)


def test_kind_i_closed_form():
    agg = aggregate(generate(ScenarioSpec(kind="I")))
    assert agg.Y == agg.L
    assert agg.Y == pytest.approx(4879.44, abs=1e-9)
    rec = tfp(agg, 0.5)
    assert rec.Z == pytest.approx(math.sqrt(4879.44 / 3257.98), abs=1e-9)
    assert rec.Z == pytest.approx(1.2238, abs=1e-4)


# ---------------------------------------------------------------------------
# tfp
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("row,published", [
    (ROW_I, 1.22), (ROW_II, 1.36), (ROW_III, 1.377), (ROW_IV, 1.384),
])
def test_published_rows(row, published):
    assert _row_tfp(row).Z == pytest.approx(published, abs=0.005)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.9])
def test_unit_economy(alpha):
    assert tfp(AggregateRecord(Y=1, K=1, L=1), alpha).Z == 1.0


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.5])
def test_alpha_out_of_range(alpha):
    with pytest.raises(DomainError) as exc:
        tfp(AggregateRecord(Y=1, K=1, L=1), alpha)
    assert exc.value.field == "alpha"


def test_non_positive_aggregate_rejected():
    with pytest.raises(DomainError):
        tfp(AggregateRecord(Y=0.0, K=1, L=1))


@pytest.mark.parametrize("alpha", [0.2, 0.5, 0.73])
@pytest.mark.parametrize("row", [ROW_I, ROW_II, (1e-3, 4e5, 17.0)])
def test_reconstruct_round_trip(alpha, row):
    rec = _row_tfp(row, alpha=alpha)
    assert reconstruct_output(rec) == pytest.approx(row[2], rel=1e-9)


def test_generated_published_ordering():
    z = [tfp(aggregate(generate(spec))).Z for spec in published_specs()]
    assert z[0] < z[1] < z[2] < z[3]
    assert z[0] == pytest.approx(1.2238, abs=1e-4)


# ---------------------------------------------------------------------------
# decompose_tfp
# ---------------------------------------------------------------------------


def test_decompose_i_to_iii_shared_factors():
    d = decompose_tfp(_row_tfp(ROW_I, "I"), _row_tfp(ROW_III, "III"))
    assert d.dz_total == pytest.approx(0.157, abs=0.005)
    assert d.shared_factors
    assert d.factor_effect == pytest.approx(0.0, abs=1e-12)
    assert (d.base_label, d.variant_label) == ("I", "III")


def test_decompose_ii_to_iii_different_factors():
    d = decompose_tfp(_row_tfp(ROW_II), _row_tfp(ROW_III))
    assert d.dz_total == pytest.approx(0.017, abs=0.005)
    assert not d.shared_factors
    assert d.output_effect + d.factor_effect == pytest.approx(d.dz_total, abs=1e-12)


def test_decompose_self_is_zero():
    rec = _row_tfp(ROW_IV)
    assert decompose_tfp(rec, rec).dz_total == 0.0


def test_decompose_antisymmetric():
    a, b = _row_tfp(ROW_II), _row_tfp(ROW_IV)
    assert decompose_tfp(a, b).dz_total == -decompose_tfp(b, a).dz_total


def test_decompose_alpha_mismatch():
    with pytest.raises(DomainError):
        decompose_tfp(_row_tfp(ROW_I, alpha=0.5), _row_tfp(ROW_III, alpha=0.4))


# ---------------------------------------------------------------------------
# detect_breaks
# ---------------------------------------------------------------------------


def test_kind_iii_single_break_at_18():
    sc = order_by_output(generate(ScenarioSpec(kind="III", break_index=18)))
    report = detect_breaks(sc)
    assert report.ordered
    assert report.breaks == [Break(index=18, before=Regime.LABOR_LIMITED,
                                   after=Regime.CAPITAL_LIMITED)]


def test_kind_i_has_no_breaks():
    sc = order_by_output(generate(ScenarioSpec(kind="I")))
    assert detect_breaks(sc).breaks == []


def test_alternating_regimes():
    # outputs 1, 2, 3, 4 with the binding factor alternating
    sc = _scenario(_est(1, l=1, k=2), _est(2, l=3, k=2), _est(3, l=3, k=4), _est(4, l=5, k=4))
    report = detect_breaks(sc)
    assert [b.index for b in report.breaks] == [2, 3, 4]
    assert all(b.before is not b.after for b in report.breaks)


def test_monotone_regimes_single_break():
    sc = _scenario(_est(1, l=1, k=2), _est(2, l=2, k=3), _est(3, l=4, k=3), _est(4, l=5, k=4))
    assert len(detect_breaks(sc).breaks) == 1


def test_unordered_input_rejected():
    sc = _scenario(_est(1, l=3, k=3), _est(2, l=1, k=1))
    with pytest.raises(OrderingError):
        detect_breaks(sc)
    with pytest.raises(OrderingError):
        per_worker_curve(sc)


# ---------------------------------------------------------------------------
# Curves and profiles
# ---------------------------------------------------------------------------


def test_per_worker_point_published_state():
    est = Establishment(id=14, a=1 / 1.09562, b=1 / 1.68849, k=65, l=100)
    curve = per_worker_curve(_scenario(est))
    point = curve.points[0]
    assert point.index == 1
    assert point.x == pytest.approx(0.65)
    assert point.y == pytest.approx(1.09562, abs=1e-12)


def test_per_worker_unit_point():
    curve = per_worker_curve(_scenario(_est(1, l=2.0, k=2.0)))
    assert (curve.points[0].x, curve.points[0].y) == (1.0, 1.0)


def test_kind_iii_curve_kinks_at_break():
    sc = order_by_output(generate(ScenarioSpec(kind="III", break_index=18)))
    curve = per_worker_curve(sc)
    assert len(curve.points) == 50
    assert all(p.x > 0 and p.y > 0 for p in curve.points)
    xs, ys = curve.xs, curve.ys

    def slope(i):  # between 1-based positions i and i+1
        return (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1])

    before, across, after = slope(16), slope(17), slope(18)
    assert abs(slope(15) - before) < 0.1 * before
    assert across < 0.8 * before
    assert after < 0.6 * before
    assert abs(slope(19) - after) < 0.1 * after


def test_output_profile_rises():
    profile = output_profile(generate(ScenarioSpec(kind="III", break_index=18)))
    assert [p.index for p in profile] == list(range(1, 51))
    ys = [p.y for p in profile]
    assert ys == sorted(ys)
    assert profile[16].regime is Regime.LABOR_LIMITED
    assert profile[17].regime is Regime.CAPITAL_LIMITED


# ---------------------------------------------------------------------------
# Break frequency
# ---------------------------------------------------------------------------


def test_break_frequency_mixed():
    scenarios = [generate(ScenarioSpec(kind="III", break_index=18)), generate(ScenarioSpec(kind="I"))]
    freq = break_frequency(scenarios, label="mixed")
    assert freq.runs == 2
    assert freq.mean_breaks == 0.5
    assert freq.share_with_break == 0.5


def test_replicate_breaks_reseeds():
    spec = ScenarioSpec(kind="Distribution", n=30, seed=4,
                        distribution={"family": "Weibull", "shape": 2.0})
    freq = replicate_breaks(spec, 5)
    assert freq.runs == 5
    assert 0.0 <= freq.share_with_break <= 1.0
    assert freq.label == spec.label


def test_break_frequency_needs_scenarios():
    with pytest.raises(DomainError):
        break_frequency([])
