"""Functional-form fits: Cobb-Douglas, CES comparison and the per-worker quadratic.

Both least-squares fits solve their (2x2 or 3x3) normal equations with
numpy's pivoted LU solver. The quadratic is solved on x mapped to [-1, 1]
so the system stays well conditioned far from the origin.
"""

import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from leontief.aggregate import AggregateRecord, CurvePoint, PerWorkerCurve
from leontief.core import output
from leontief.errors import DomainError, IdentificationError
from leontief.scenarios import Scenario

logger = logging.getLogger("leontief")


@dataclass(frozen=True)
class CobbDouglasFit:
    alpha: float
    Z: float
    r_squared: float
    n_obs: int
    label: str = ""


@dataclass(frozen=True)
class QuadraticFit:
    """y = c0 + c1*x + c2*x**2 fitted over x_range."""
    c0: float
    c1: float
    c2: float
    r_squared: float
    slope_range: tuple[float, float]
    x_range: tuple[float, float]
    n_obs: int
    label: str = ""

    def evaluate(self, x: float) -> float:
        return self.c0 + self.c1 * x + self.c2 * x * x

    def slope(self, x: float) -> float:
        return self.c1 + 2.0 * self.c2 * x


@dataclass(frozen=True)
class CESParams:
    share: float  # weight on capital
    rho: float
    Z: float = 1.0

    def __post_init__(self):
        if self.rho == 0:
            raise DomainError("rho = 0 is the Cobb-Douglas limit; use eval_cobb_douglas",
                              field="rho")
        if not self.rho < 1:
            raise DomainError(f"rho must be below 1, got {self.rho}", field="rho")
        if not 0 < self.share < 1:
            raise DomainError(f"share must lie in (0, 1), got {self.share}", field="share")
        if not self.Z > 0:
            raise DomainError(f"Z must be positive, got {self.Z}", field="Z")

    @property
    def sigma(self) -> float:
        """Elasticity of substitution 1/(1 - rho)."""
        return 1.0 / (1.0 - self.rho)


@dataclass(frozen=True)
class CESComparison:
    max_gap: float
    mean_gap: float
    min_gap: float
    sign_uniform: bool  # CD >= CES at every grid point
    n_points: int


def _r_squared(y: np.ndarray, fitted: np.ndarray) -> float:
    ssr = float(np.sum((y - fitted) ** 2))
    sst = float(np.sum((y - y.mean()) ** 2))
    if sst == 0.0:
        return 1.0
    return 1.0 - ssr / sst


def _solve_normal_equations(design: np.ndarray, y: np.ndarray, what: str) -> np.ndarray:
    try:
        return np.linalg.solve(design.T @ design, design.T @ y)
    except np.linalg.LinAlgError as e:
        raise IdentificationError(f"{what}: singular design ({e})") from e


# ─── Cobb-Douglas ────────────────────────────────────────────────────────────


def eval_cobb_douglas(Z: float, alpha: float, K, L):
    return Z * np.power(K, alpha) * np.power(L, 1.0 - alpha)


def _panel_rows(panel: Iterable) -> list[tuple[float, float, float]]:
    rows = []
    for obs in panel:
        if isinstance(obs, AggregateRecord):
            rows.append((obs.Y, obs.K, obs.L))
        else:
            Y, K, L = obs
            rows.append((float(Y), float(K), float(L)))
    return rows


def fit_cobb_douglas(panel: Iterable, label: str = "") -> CobbDouglasFit:
    """Constant-returns fit of ln(Y/L) = ln Z + alpha * ln(K/L).

    `panel` holds (Y, K, L) triples or AggregateRecords.
    """
    rows = _panel_rows(panel)
    if len(rows) < 3:
        raise IdentificationError(f"need at least 3 observations, got {len(rows)}")
    data = np.array(rows)
    if np.any(~np.isfinite(data)) or np.any(data <= 0):
        raise DomainError("Cobb-Douglas fit needs positive Y, K and L", field="panel")

    Y, K, L = data[:, 0], data[:, 1], data[:, 2]
    x = np.log(K / L)
    y = np.log(Y / L)
    if np.ptp(x) <= 1e-12:
        raise IdentificationError("K/L is constant across the panel; alpha is not identified")

    design = np.column_stack([np.ones_like(x), x])
    log_z, alpha = _solve_normal_equations(design, y, "Cobb-Douglas fit")
    fit = CobbDouglasFit(alpha=float(alpha), Z=math.exp(log_z),
                         r_squared=_r_squared(y, design @ np.array([log_z, alpha])),
                         n_obs=len(rows), label=label)
    if not 0 < fit.alpha < 1:
        logger.warning(f"Fitted capital elasticity {fit.alpha:.4f} lies outside (0, 1)"
                       + (f" for {label}" if label else ""))
    return fit


def fit_cobb_douglas_scenario(sc: Scenario) -> CobbDouglasFit:
    """Fit over the establishment panel (y_i, k_i, l_i) of one scenario."""
    return fit_cobb_douglas([(output(e), e.k, e.l) for e in sc.establishments], label=sc.label)


# ─── CES ─────────────────────────────────────────────────────────────────────


def _check_factors(K, L) -> tuple[np.ndarray, np.ndarray]:
    K = np.asarray(K, dtype=float)
    L = np.asarray(L, dtype=float)
    if np.any(~(K > 0)) or np.any(~(L > 0)):
        raise DomainError("K and L must be positive", field="grid")
    return K, L


def eval_ces(p: CESParams, K, L):
    """Z * (share*K**rho + (1 - share)*L**rho) ** (1/rho)."""
    K, L = _check_factors(K, L)
    y = p.Z * (p.share * K ** p.rho + (1.0 - p.share) * L ** p.rho) ** (1.0 / p.rho)
    return float(y) if y.ndim == 0 else y


def cd_ces_gaps(Z: float, share: float, rho: float,
                grid: Sequence[tuple[float, float]]) -> np.ndarray:
    """CD(K, L) - CES(K, L) at each grid point, same Z and capital share."""
    if len(grid) == 0:
        raise DomainError("CES comparison grid is empty", field="grid")
    K, L = _check_factors([k for k, _ in grid], [l for _, l in grid])
    return eval_cobb_douglas(Z, share, K, L) - eval_ces(CESParams(share=share, rho=rho, Z=Z), K, L)


def compare_cd_ces(Z: float, share: float, rho: float,
                   grid: Sequence[tuple[float, float]]) -> CESComparison:
    gaps = cd_ces_gaps(Z, share, rho, grid)
    K, L = _check_factors([k for k, _ in grid], [l for _, l in grid])
    # equal-argument points agree only up to rounding
    floor = -1e-12 * eval_cobb_douglas(Z, share, K, L)
    if rho > 0:
        logger.info(f"rho={rho} > 0 (sigma > 1): CES output exceeds Cobb-Douglas off the diagonal")
    return CESComparison(
        max_gap=float(gaps.max()),
        mean_gap=float(gaps.mean()),
        min_gap=float(gaps.min()),
        sign_uniform=bool(np.all(gaps >= floor)),
        n_points=len(gaps),
    )


# ─── Quadratic ───────────────────────────────────────────────────────────────


def _point_xy(points) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(points, PerWorkerCurve):
        points = points.points
    xy = [(p.x, p.y) if isinstance(p, CurvePoint) else (float(p[0]), float(p[1]))
          for p in points]
    if not xy:
        return np.empty(0), np.empty(0)
    arr = np.array(xy)
    return arr[:, 0], arr[:, 1]


def fit_quadratic(points, label: str = "") -> QuadraticFit:
    """Least squares of y on {1, x, x**2}.

    `points` is a PerWorkerCurve or a sequence of (x, y) pairs / CurvePoints.
    """
    if isinstance(points, PerWorkerCurve) and not label:
        label = points.label
    x, y = _point_xy(points)
    if len(np.unique(x)) < 3:
        raise IdentificationError(
            f"quadratic fit needs at least 3 distinct x values, got {len(np.unique(x))}")

    # solve in t = (x - mid) / half on [-1, 1], then map back to powers of x
    x_min, x_max = float(x.min()), float(x.max())
    mid, half = 0.5 * (x_min + x_max), 0.5 * (x_max - x_min)
    t = (x - mid) / half
    design = np.column_stack([np.ones_like(t), t, t * t])
    d0, d1, d2 = _solve_normal_equations(design, y, "quadratic fit")
    fitted = design @ np.array([d0, d1, d2])
    c2 = float(d2 / half ** 2)
    c1 = float(d1 / half - 2.0 * d2 * mid / half ** 2)
    c0 = float(d0 - d1 * mid / half + d2 * mid ** 2 / half ** 2)
    slopes = (c1 + 2.0 * c2 * x_min, c1 + 2.0 * c2 * x_max)
    return QuadraticFit(
        c0=c0, c1=c1, c2=c2,
        r_squared=_r_squared(y, fitted),
        slope_range=(min(slopes), max(slopes)),
        x_range=(x_min, x_max),
        n_obs=len(x),
        label=label,
    )


def quadratic_samples(fit: QuadraticFit, n: int = 50) -> list[tuple[float, float]]:
    """Evenly spaced (x, fitted y) pairs across the fitted range, for plotting."""
    if n < 2:
        raise DomainError(f"need at least 2 samples, got {n}", field="n")
    return [(float(x), fit.evaluate(float(x))) for x in np.linspace(*fit.x_range, n)]
