"""Weighted log-log regression and Monte Carlo error bars.

Shared by every experiment: slopes of log-estimates against log-scales,
with delta-method weights propagated from the Monte Carlo standard
errors, plus batch-means error bars for replicated estimators.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .rng import stable_sum


@dataclass(frozen=True)
class FitPoint:
    """One cell of a scaling experiment, on log axes.

    ``x`` is the abscissa the caller wants the slope against (log delta,
    log 1/delta, log z, ...).  ``x2`` is the optional second abscissa for
    two-variable fits.  Estimates must be positive to enter a log fit.
    """

    x: float
    estimate: float
    stderr: float
    hits: int | None = None
    x2: float | None = None


@dataclass
class ExponentFit:
    slope: float
    intercept: float
    slope_stderr: float
    ci95: tuple[float, float]
    reduced_chisq: float
    n_points: int
    excluded: list[FitPoint] = field(default_factory=list)
    curvature_flag: bool = False
    leverage_flag: bool = False

    def within(self, target: float, tol: float) -> bool:
        return abs(self.slope - target) <= tol


@dataclass
class TwoVarFit:
    slope_x: float
    slope_x2: float
    stderr_x: float
    stderr_x2: float
    cov: np.ndarray
    intercept: float
    n_points: int

    @property
    def ratio(self) -> float:
        """slope_x / slope_x2 with its delta-method standard error."""
        return self.slope_x / self.slope_x2

    @property
    def ratio_stderr(self) -> float:
        sx, st = self.slope_x, self.slope_x2
        g = np.array([1.0 / st, -sx / st**2])
        return float(np.sqrt(g @ self.cov @ g))


def _split_points(points):
    """Separate usable points from zero/invalid ones (log undefined)."""
    good, excluded = [], []
    for p in points:
        if p.estimate > 0 and np.isfinite(p.estimate) and p.stderr >= 0:
            good.append(p)
        else:
            excluded.append(p)
    return good, excluded


def _wls(X: np.ndarray, y: np.ndarray, w: np.ndarray):
    W = np.diag(w)
    xtwx = X.T @ W @ X
    if np.linalg.cond(xtwx) > 1e12:
        raise np.linalg.LinAlgError("singular design matrix")
    cov = np.linalg.inv(xtwx)
    beta = cov @ X.T @ W @ y
    resid = y - X @ beta
    dof = max(len(y) - X.shape[1], 1)
    red_chisq = float(w @ resid**2) / dof
    return beta, cov, red_chisq


def loglog_fit(points: list[FitPoint]) -> ExponentFit:
    """Weighted least squares of log(estimate) on the abscissa.

    Weights are 1/Var(log estimate) with Var propagated by the delta
    method from the estimate's standard error.  Zero-estimate points are
    excluded and reported, never silently dropped.
    """
    good, excluded = _split_points(points)
    if len(good) < 3:
        raise ValueError("loglog_fit needs at least 3 positive points")
    x = np.array([p.x for p in good])
    if len(np.unique(x)) < 2:
        raise ValueError("degenerate abscissas")
    y = np.log([p.estimate for p in good])
    rel = np.array([p.stderr / p.estimate for p in good])
    rel = np.maximum(rel, 1e-12)
    w = 1.0 / rel**2

    X = np.column_stack([np.ones_like(x), x])
    beta, cov, red_chisq = _wls(X, y, w)
    slope, intercept = float(beta[1]), float(beta[0])
    se = float(np.sqrt(cov[1, 1]))
    fit = ExponentFit(
        slope=slope,
        intercept=intercept,
        slope_stderr=se,
        ci95=(slope - 1.96 * se, slope + 1.96 * se),
        reduced_chisq=red_chisq,
        n_points=len(good),
        excluded=excluded,
        curvature_flag=red_chisq > 3.0,
    )
    # leverage guard: no single point should move the slope by a CI width
    if len(good) >= 4:
        width = fit.ci95[1] - fit.ci95[0]
        for i in range(len(good)):
            keep = [j for j in range(len(good)) if j != i]
            b, _, _ = _wls(X[keep], y[keep], w[keep])
            if abs(float(b[1]) - slope) > width:
                fit.leverage_flag = True
                break
    return fit


def two_var_fit(points: list[FitPoint]) -> TwoVarFit:
    """Joint fit log(estimate) ~ intercept + slope_x * x + slope_x2 * x2."""
    good, _ = _split_points(points)
    if len(good) < 4:
        raise ValueError("two_var_fit needs at least 4 positive points")
    if any(p.x2 is None for p in good):
        raise ValueError("two_var_fit needs x2 on every point")
    x = np.array([p.x for p in good])
    x2 = np.array([p.x2 for p in good])
    X = np.column_stack([np.ones_like(x), x, x2])
    if np.linalg.matrix_rank(X) < 3:
        raise ValueError("rank-deficient design")
    y = np.log([p.estimate for p in good])
    rel = np.maximum(np.array([p.stderr / p.estimate for p in good]), 1e-12)
    beta, cov, _ = _wls(X, y, 1.0 / rel**2)
    return TwoVarFit(
        slope_x=float(beta[1]),
        slope_x2=float(beta[2]),
        stderr_x=float(np.sqrt(cov[1, 1])),
        stderr_x2=float(np.sqrt(cov[2, 2])),
        cov=cov[1:, 1:],
        intercept=float(beta[0]),
        n_points=len(good),
    )


def batch_means(values, n_batches: int = 16) -> tuple[float, float]:
    """Batch-means estimate (mean, stderr) of a replicated sample.

    For i.i.d. inputs this agrees with the classical stderr; for
    positively correlated replica outputs it is the safe choice.
    """
    v = np.asarray(values, dtype=float)
    if n_batches < 8:
        raise ValueError("need at least 8 batches")
    per = len(v) // n_batches
    if per < 1:
        raise ValueError("too few samples per batch")
    v = v[: per * n_batches].reshape(n_batches, per)
    means = np.array([stable_sum(row) / per for row in v])
    grand = stable_sum(means) / n_batches
    var = stable_sum((means - grand) ** 2) / (n_batches - 1)
    return float(grand), float(np.sqrt(var / n_batches))


def binomial_stderr(hits: float, n: int) -> float:
    """Exact i.i.d. standard error for an indicator mean."""
    p = hits / n
    return float(np.sqrt(max(p * (1.0 - p), 0.0) / n))
