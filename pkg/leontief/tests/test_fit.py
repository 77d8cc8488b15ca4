"""Tests for the Cobb-Douglas fit, CES evaluation/comparison and the quadratic fit."""

import numpy as np
import pytest

from leontief.aggregate import AggregateRecord, per_worker_curve
from leontief.errors import DomainError, IdentificationError
from leontief.fit import (
    CESParams,
    cd_ces_gaps,
    compare_cd_ces,
    eval_ces,
    eval_cobb_douglas,
    fit_cobb_douglas,
    fit_cobb_douglas_scenario,
    fit_quadratic,
    quadratic_samples,
)
from leontief.scenarios import ScenarioSpec, generate, order_by_output


def _cd_panel(alpha: float, Z: float, n: int, L: float = 10.0) -> list[tuple[float, float, float]]:
    """Noiseless panel at n distinct K/L ratios."""
    panel = []
    for i in range(n):
        K = L * (0.5 + 0.1 * i)
        panel.append((Z * K ** alpha * L ** (1 - alpha), K, L))
    return panel


def _grid(n: int = 20) -> list[tuple[float, float]]:
    return [(float(k), float(l)) for k in range(1, n + 1) for l in range(1, n + 1)]


# ---------------------------------------------------------------------------
# Cobb-Douglas
# ---------------------------------------------------------------------------


def test_cd_recovers_generating_parameters():
    fit = fit_cobb_douglas(_cd_panel(0.5, 1.3, 10))
    assert fit.alpha == pytest.approx(0.5, rel=1e-9)
    assert fit.Z == pytest.approx(1.3, rel=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-9)
    assert fit.n_obs == 10


def test_cd_recovers_quarter_elasticity():
    fit = fit_cobb_douglas(_cd_panel(0.25, 0.8, 12))
    assert fit.alpha == pytest.approx(0.25, rel=1e-9)
    assert fit.Z == pytest.approx(0.8, rel=1e-9)


def test_cd_twenty_point_panel_with_varying_scale():
    panel = [(2.1 * K ** 0.3 * L ** 0.7, K, L)
             for K, L in zip(np.linspace(100, 900, 20), np.linspace(400, 250, 20))]
    fit = fit_cobb_douglas(panel)
    assert fit.alpha == pytest.approx(0.3, rel=1e-9)
    assert fit.Z == pytest.approx(2.1, rel=1e-9)


def test_cd_accepts_aggregate_records():
    panel = [AggregateRecord(Y=Y, K=K, L=L) for Y, K, L in _cd_panel(0.4, 1.1, 5)]
    assert fit_cobb_douglas(panel).alpha == pytest.approx(0.4, rel=1e-9)


def test_cd_invariant_to_row_order():
    panel = _cd_panel(0.35, 1.7, 8)
    panel = [(Y * (1 + 0.01 * (-1) ** i), K, L) for i, (Y, K, L) in enumerate(panel)]
    forward, backward = fit_cobb_douglas(panel), fit_cobb_douglas(panel[::-1])
    assert forward.alpha == pytest.approx(backward.alpha, rel=1e-12)
    assert forward.Z == pytest.approx(backward.Z, rel=1e-12)


def test_cd_repeated_observation_not_identified():
    with pytest.raises(IdentificationError):
        fit_cobb_douglas([(5.0, 2.0, 3.0)] * 3)


def test_cd_too_few_observations():
    with pytest.raises(IdentificationError):
        fit_cobb_douglas(_cd_panel(0.5, 1.0, 2))


def test_cd_non_positive_data():
    panel = _cd_panel(0.5, 1.0, 4)
    panel[1] = (0.0, panel[1][1], panel[1][2])
    with pytest.raises(DomainError):
        fit_cobb_douglas(panel)


def test_cd_scenario_panel_kind_i():
    # y_i = l_i everywhere, so output per worker ignores capital
    fit = fit_cobb_douglas_scenario(generate(ScenarioSpec(kind="I")))
    assert fit.alpha == pytest.approx(0.0, abs=1e-9)
    assert fit.Z == pytest.approx(1.0, rel=1e-9)
    assert fit.label == "Scenario I"


def test_cd_scenario_panel_kind_ii_not_identified():
    with pytest.raises(IdentificationError):
        fit_cobb_douglas_scenario(generate(ScenarioSpec(kind="II")))


def test_eval_cobb_douglas():
    assert eval_cobb_douglas(1.0, 0.5, 1.0, 4.0) == pytest.approx(2.0)


# ---------------------------------------------------------------------------
# CES
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("share,rho", [(0.3, -1.0), (0.5, 0.5), (0.8, -4.0)])
def test_ces_equal_arguments(share, rho):
    assert eval_ces(CESParams(share=share, rho=rho, Z=1.7), 3.0, 3.0) == pytest.approx(5.1)


def test_ces_harmonic_case():
    assert eval_ces(CESParams(share=0.5, rho=-1.0), 1.0, 4.0) == pytest.approx(1.6)


def test_ces_arithmetic_limit():
    y = eval_ces(CESParams(share=0.5, rho=1 - 1e-9, Z=2.0), 1.0, 4.0)
    assert y == pytest.approx(2.0 * 2.5, abs=1e-6)


def test_ces_homogeneous_degree_one():
    p = CESParams(share=0.4, rho=-0.5, Z=1.2)
    assert eval_ces(p, 6.0, 10.0) == pytest.approx(2.0 * eval_ces(p, 3.0, 5.0), rel=1e-12)


def test_ces_rho_zero_points_to_cobb_douglas():
    with pytest.raises(DomainError, match="Cobb-Douglas") as exc:
        eval_ces(CESParams(share=0.5, rho=0.0), 1.0, 1.0)
    assert exc.value.field == "rho"


@pytest.mark.parametrize("kwargs", [
    {"share": 0.0, "rho": -1.0}, {"share": 1.0, "rho": -1.0},
    {"share": 0.5, "rho": 1.0}, {"share": 0.5, "rho": -1.0, "Z": 0.0},
])
def test_ces_params_ranges(kwargs):
    with pytest.raises(DomainError):
        CESParams(**kwargs)


def test_ces_sigma():
    assert CESParams(share=0.5, rho=-1.0).sigma == 0.5
    assert CESParams(share=0.5, rho=0.5).sigma == 2.0


def test_ces_non_positive_factors():
    with pytest.raises(DomainError):
        eval_ces(CESParams(share=0.5, rho=-1.0), 0.0, 1.0)


# ---------------------------------------------------------------------------
# compare_cd_ces
# ---------------------------------------------------------------------------


def test_gap_harmonic_point():
    cmp = compare_cd_ces(1.0, 0.5, -1.0, [(1.0, 4.0)])
    assert cmp.max_gap == pytest.approx(0.4)
    assert cmp.sign_uniform
    assert cmp.n_points == 1


def test_gap_zero_on_equal_factors():
    gaps = cd_ces_gaps(1.3, 0.3, -2.0, [(2.0, 2.0), (7.5, 7.5)])
    assert np.all(np.abs(gaps) < 1e-12)


def test_cd_dominates_ces_on_grid():
    grid = _grid()
    cmp = compare_cd_ces(1.0, 0.5, -1.0, grid)
    assert cmp.sign_uniform
    assert cmp.n_points == 400
    assert cmp.min_gap >= -1e-9
    gaps = cd_ces_gaps(1.0, 0.5, -1.0, grid)
    for (K, L), gap in zip(grid, gaps):
        if K == L:
            assert abs(gap) < 1e-9
        else:
            assert gap > 1e-9


def test_direction_reverses_above_unit_elasticity():
    cmp = compare_cd_ces(1.0, 0.5, 0.5, _grid(5))
    assert not cmp.sign_uniform
    assert cmp.min_gap < 0


def test_empty_grid_rejected():
    with pytest.raises(DomainError):
        compare_cd_ces(1.0, 0.5, -1.0, [])


# ---------------------------------------------------------------------------
# Quadratic
# ---------------------------------------------------------------------------


def test_quadratic_recovers_polynomial():
    xs = np.linspace(0.0, 4.5, 10)
    fit = fit_quadratic([(x, 1 + 2 * x - 0.1 * x * x) for x in xs])
    assert fit.c0 == pytest.approx(1.0, abs=1e-9)
    assert fit.c1 == pytest.approx(2.0, abs=1e-9)
    assert fit.c2 == pytest.approx(-0.1, abs=1e-9)
    assert fit.x_range == (0.0, 4.5)
    assert fit.slope_range == pytest.approx((2 - 0.9, 2.0))


def test_quadratic_far_from_origin():
    xs = np.linspace(100.0, 110.0, 11)
    fit = fit_quadratic([(x, 1 + 2 * x - 0.1 * x * x) for x in xs])
    assert fit.c0 == pytest.approx(1.0, abs=1e-9)
    assert fit.c1 == pytest.approx(2.0, abs=1e-9)
    assert fit.c2 == pytest.approx(-0.1, abs=1e-9)

    # orthogonality in units of the largest x, so rounding in y does not scale with x**2
    u = xs / xs.max()
    residuals = (1 + 2 * xs - 0.1 * xs * xs) - np.array([fit.evaluate(x) for x in xs])
    for power in range(3):
        assert abs(np.sum(residuals * u ** power)) < 1e-9


def test_quadratic_on_line():
    fit = fit_quadratic([(x, 3 + 2 * x) for x in range(6)])
    assert fit.c2 == pytest.approx(0.0, abs=1e-9)
    assert fit.c1 == pytest.approx(2.0, abs=1e-9)


def test_quadratic_needs_three_distinct_x():
    with pytest.raises(IdentificationError):
        fit_quadratic([(1.0, 1.0), (1.0, 2.0), (2.0, 3.0), (2.0, 3.5)])


def test_quadratic_evaluate_and_slope():
    fit = fit_quadratic([(x, 1 + 2 * x - 0.1 * x * x) for x in range(5)])
    assert fit.evaluate(2.0) == pytest.approx(4.6)
    assert fit.slope(2.0) == pytest.approx(1.6)


def test_quadratic_on_kind_iii_curve():
    curve = per_worker_curve(order_by_output(generate(ScenarioSpec(kind="III", break_index=18))))
    fit = fit_quadratic(curve)
    assert fit.label == "Scenario III"
    assert fit.c2 < 0
    assert fit.slope_range[0] > 0
    assert fit.n_obs == 50

    x = np.array(curve.xs)
    residuals = np.array(curve.ys) - (fit.c0 + fit.c1 * x + fit.c2 * x * x)
    for power in range(3):
        assert abs(np.sum(residuals * x ** power)) < 1e-9


def test_quadratic_samples_span_range():
    fit = fit_quadratic([(x, 1 + 2 * x - 0.1 * x * x) for x in range(5)])
    samples = quadratic_samples(fit, 9)
    assert len(samples) == 9
    assert samples[0][0] == 0.0 and samples[-1][0] == 4.0
    assert samples[4][1] == pytest.approx(fit.evaluate(2.0))
