"""Correlated planar Brownian motion and the approximate quadrant event.

The event of interest: both coordinates of a correlated planar Brownian
motion stay above -delta on [0, t].  Its probability decays like
t^(-sigma/2) delta^sigma with sigma = pi / arccos(alpha), where -alpha
is the correlation; for correlation -cos(4 pi / kappa) this equals
kappa / 4, which is what the main verification experiment checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .exponent_stats import (
    ExponentFit,
    FitPoint,
    TwoVarFit,
    binomial_stderr,
    loglog_fit,
    two_var_fit,
)
from .rng import RandomStream


def correlation_from_kappa(kappa: float) -> float:
    """Correlation -cos(4 pi / kappa) of the boundary-length pair."""
    if kappa <= 4:
        raise ValueError("kappa must exceed 4")
    return -math.cos(4.0 * math.pi / kappa)


def sigma_from_correlation(c: float) -> float:
    """Quadrant-exit exponent pi / arccos(-c) for correlation c."""
    if not -1.0 < c < 1.0:
        raise ValueError("correlation must lie in (-1, 1)")
    return math.pi / math.acos(-c)


@dataclass(frozen=True)
class CorrelationSpec:
    """Correlation of the planar Brownian pair; unit variance per unit time."""

    c: float
    kappa: float | None = None

    def __post_init__(self):
        if not -1.0 < self.c < 1.0:
            raise ValueError("correlation must lie in (-1, 1)")

    @classmethod
    def from_kappa(cls, kappa: float) -> "CorrelationSpec":
        return cls(c=correlation_from_kappa(kappa), kappa=kappa)

    @property
    def sigma(self) -> float:
        return sigma_from_correlation(self.c)


@dataclass(frozen=True)
class ConeEventConfig:
    delta: float
    t: float
    dt: float = 1e-3
    n_samples: int = 100_000

    def __post_init__(self):
        if min(self.delta, self.t, self.dt) <= 0 or self.n_samples < 1:
            raise ValueError("delta, t, dt must be positive and n_samples >= 1")

    @property
    def uniform_regime(self) -> bool:
        """True when t >= sqrt(delta), where the tail asymptotics are uniform."""
        return self.t >= math.sqrt(self.delta)


@dataclass
class Path2D:
    times: np.ndarray
    left: np.ndarray
    right: np.ndarray
    c: float


def sample_correlated_bm(
    spec: CorrelationSpec, dt: float, horizon: float, stream: RandomStream
) -> Path2D:
    """One correlated planar path via the Cholesky factor [[1,0],[c,sqrt(1-c^2)]]."""
    if horizon <= 0 or dt <= 0:
        raise ValueError("horizon and dt must be positive")
    rng = stream.generator()
    n = int(round(horizon / dt))
    z = rng.standard_normal((2, n))
    root = math.sqrt(dt)
    dl = root * z[0]
    dr = root * (spec.c * z[0] + math.sqrt(1.0 - spec.c**2) * z[1])
    t = np.arange(n + 1) * dt
    return Path2D(
        times=t,
        left=np.concatenate([[0.0], np.cumsum(dl)]),
        right=np.concatenate([[0.0], np.cumsum(dr)]),
        c=spec.c,
    )


def _bridge_minima(a: np.ndarray, b: np.ndarray, dt: float, u: np.ndarray) -> np.ndarray:
    """Exact per-step minima of Brownian bridges from a to b over dt.

    Inverse-CDF sampling of the bridge minimum; u are uniforms.  Pathwise
    minima built from these are exact in distribution, so indicator
    events computed from them carry no level-crossing bias.
    """
    gap = a - b
    return 0.5 * (a + b - np.sqrt(gap * gap - 2.0 * dt * np.log(u)))


def cone_indicator(
    path: Path2D,
    delta: float,
    t: float,
    stream: RandomStream | None = None,
    bridge: bool = True,
) -> bool:
    """Both coordinate minima over [0, t] stay >= -delta (bridge-corrected)."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    k = int(np.searchsorted(path.times, t + 1e-12))
    if k < 2 or path.times[k - 1] < t - 1e-9:
        raise ValueError("t outside the path horizon")
    dt = float(path.times[1] - path.times[0])
    mins = []
    if bridge:
        if stream is None:
            raise ValueError("bridge correction needs a RandomStream")
        rng = stream.generator()
        for v in (path.left, path.right):
            u = rng.random(k - 1)
            m = _bridge_minima(v[: k - 1], v[1:k], dt, u)
            mins.append(float(m.min()))
    else:
        mins = [float(path.left[:k].min()), float(path.right[:k].min())]
    return min(mins) >= -delta


@dataclass
class ConeCell:
    delta: float
    t: float
    hits: int
    n: int
    p_hat: float
    stderr: float
    zero_hit: bool = False
    one_sided_upper: float | None = None  # 95% bound when no hits


@dataclass
class ConeGrid:
    spec: CorrelationSpec
    dt: float
    n_samples: int
    cells: list[ConeCell] = field(default_factory=list)


def cone_prob_grid(
    spec: CorrelationSpec,
    deltas: np.ndarray,
    ts: np.ndarray,
    dt: float,
    n_samples: int,
    stream: RandomStream,
    batch: int = 20_000,
) -> ConeGrid:
    """Monte Carlo estimates of the quadrant event on a (delta, t) grid.

    All cells share the same paths (common random numbers), which makes
    the estimates pathwise monotone: nondecreasing in delta, nonincreasing
    in t.  The per-coordinate running minima are built from sampled
    per-step bridge minima, so each coordinate's minimum law is exact.
    """
    deltas = np.asarray(deltas, dtype=float)
    ts = np.asarray(ts, dtype=float)
    horizon = float(ts.max())
    n_steps = int(round(horizon / dt))
    t_idx = np.round(ts / dt).astype(int)
    if not np.allclose(t_idx * dt, ts, rtol=0, atol=1e-9):
        raise ValueError("observation times must be multiples of dt")
    rng = stream.generator()
    root = math.sqrt(dt)
    croot = math.sqrt(1.0 - spec.c**2)
    hits = np.zeros((len(deltas), len(ts)), dtype=np.int64)
    done = 0
    while done < n_samples:
        b = min(batch, n_samples - done)
        z = rng.standard_normal((2, b, n_steps))
        dl = root * z[0]
        dr = root * (spec.c * z[0] + croot * z[1])
        del z
        mins_at = np.empty((2, b, len(ts)))
        for coord, inc in enumerate((dl, dr)):
            v = np.cumsum(inc, axis=1)
            starts = np.concatenate([np.zeros((b, 1)), v[:, :-1]], axis=1)
            u = rng.random((b, n_steps))
            step_min = _bridge_minima(starts, v, dt, u)
            running = np.minimum.accumulate(step_min, axis=1)
            mins_at[coord] = running[:, t_idx - 1]
        joint_min = mins_at.min(axis=0)  # (b, n_t)
        for i, d in enumerate(deltas):
            hits[i] += (joint_min >= -d).sum(axis=0)
        done += b
    grid = ConeGrid(spec=spec, dt=dt, n_samples=n_samples)
    for i, d in enumerate(deltas):
        for j, t in enumerate(ts):
            h = int(hits[i, j])
            cell = ConeCell(
                delta=float(d),
                t=float(t),
                hits=h,
                n=n_samples,
                p_hat=h / n_samples,
                stderr=binomial_stderr(h, n_samples),
                zero_hit=h == 0,
            )
            if h == 0:
                cell.one_sided_upper = 3.0 / n_samples  # rule of three
            grid.cells.append(cell)
    return grid


def estimate_cone_prob(
    spec: CorrelationSpec, config: ConeEventConfig, stream: RandomStream
) -> ConeCell:
    grid = cone_prob_grid(
        spec,
        np.array([config.delta]),
        np.array([config.t]),
        config.dt,
        config.n_samples,
        stream,
    )
    return grid.cells[0]


def cone_prob_independent_theory(delta: float, t: float = 1.0) -> float:
    """Closed form (2 Phi(delta/sqrt(t)) - 1)^2 for uncorrelated coordinates."""
    return float((2.0 * norm.cdf(delta / math.sqrt(t)) - 1.0) ** 2)


@dataclass
class ConeExponentFit:
    sigma_from_delta: float
    sigma_from_delta_stderr: float
    sigma_from_t: float
    sigma_from_t_stderr: float
    joint: TwoVarFit | None
    per_t_fits: dict[float, ExponentFit]
    excluded_cells: list[ConeCell]

    @property
    def pooled_sigma(self) -> float:
        if self.joint is not None:
            return self.joint.slope_x2  # coefficient on log(delta)
        return self.sigma_from_delta


def fit_cone_exponents(cells: list[ConeCell]) -> ConeExponentFit:
    """Recover sigma from the delta axis, the t axis, and a joint fit.

    log p = const + sigma * log(delta) - (sigma/2) * log(t); zero-hit
    cells are excluded (conservatively) and reported.
    """
    good = [c for c in cells if not c.zero_hit]
    excluded = [c for c in cells if c.zero_hit]
    ts = sorted({c.t for c in good})
    deltas = sorted({c.delta for c in good})

    per_t: dict[float, ExponentFit] = {}
    sig_d, w_d = [], []
    for t in ts:
        pts = [
            FitPoint(x=math.log(c.delta), estimate=c.p_hat, stderr=c.stderr)
            for c in good
            if c.t == t
        ]
        if len(pts) >= 3:
            f = loglog_fit(pts)
            per_t[t] = f
            sig_d.append(f.slope)
            w_d.append(1.0 / f.slope_stderr**2)
    if not sig_d:
        raise ValueError("no t-slice with enough positive cells")
    w_d = np.asarray(w_d)
    sigma_delta = float(np.average(sig_d, weights=w_d))
    sigma_delta_se = float(1.0 / math.sqrt(w_d.sum()))

    sig_t, w_t = [], []
    for d in deltas:
        pts = [
            FitPoint(x=math.log(c.t), estimate=c.p_hat, stderr=c.stderr)
            for c in good
            if c.delta == d
        ]
        if len(pts) >= 3:
            f = loglog_fit(pts)
            sig_t.append(-2.0 * f.slope)
            w_t.append(1.0 / (2.0 * f.slope_stderr) ** 2)
    if sig_t:
        w_t = np.asarray(w_t)
        sigma_t = float(np.average(sig_t, weights=w_t))
        sigma_t_se = float(1.0 / math.sqrt(w_t.sum()))
    else:
        sigma_t, sigma_t_se = math.nan, math.nan

    joint = None
    if len(ts) >= 2 and len(deltas) >= 2:
        pts = [
            FitPoint(
                x=math.log(c.t),
                x2=math.log(c.delta),
                estimate=c.p_hat,
                stderr=c.stderr,
            )
            for c in good
        ]
        joint = two_var_fit(pts)

    return ConeExponentFit(
        sigma_from_delta=sigma_delta,
        sigma_from_delta_stderr=sigma_delta_se,
        sigma_from_t=sigma_t,
        sigma_from_t_stderr=sigma_t_se,
        joint=joint,
        per_t_fits=per_t,
        excluded_cells=excluded,
    )
