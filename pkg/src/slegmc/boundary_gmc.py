"""Boundary log-correlated field, quantum length measure, moment exponents.

The field lives on a geometric grid on [-r, r] accumulating at 0.  In the
log coordinate u = -log|x| the grid is uniform, and the covariance
-2 log|x - y| splits exactly into

    2 min(u, v)                  a random walk shared by both sides (the
                                 radial component: Brownian in log scale
                                 with variance rate 2), plus
    g(|u - v|)   same side       g(s)  = -2 log(1 - exp(-s))
    gt(|u - v|)  opposite side   gt(s) = -2 log(1 + exp(-s))

Both stationary remainders are mixtures of exponentials (expand the log),
hence positive definite; they are sampled by dense Cholesky of their
symmetric/antisymmetric combinations.  The decomposition gives direct
access to the radial process, whose drifted version drives the hitting
times of the closed-form Laplace oracle.  The alpha log-singularity of
the wedge field enters the measure analytically through an |x|^(-gamma
alpha/2) density, never through the Gaussian sampler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, eigvalsh, toeplitz

from .exponent_stats import ExponentFit, FitPoint, batch_means, loglog_fit
from .rng import RandomStream

PSD_TOL = 1e-8  # smallest eigenvalue >= -PSD_TOL * trace, else construction error


class KernelConstructionError(ValueError):
    """Covariance failed the positive-definiteness check after regularization."""


@dataclass(frozen=True)
class WedgeSpec:
    """gamma in (0, sqrt 2); alpha defaults to 3 gamma / 2."""

    gamma: float
    alpha: float | None = None

    def __post_init__(self):
        if not 0.0 < self.gamma < math.sqrt(2.0):
            raise ValueError("gamma must lie in (0, sqrt(2))")
        a = self.effective_alpha
        if not 0.0 <= a < self.Q:
            raise ValueError("alpha must lie in [0, Q)")

    @property
    def effective_alpha(self) -> float:
        return 1.5 * self.gamma if self.alpha is None else self.alpha

    @property
    def Q(self) -> float:
        return 2.0 / self.gamma + self.gamma / 2.0

    @property
    def a(self) -> float:
        return self.Q - self.effective_alpha

    @classmethod
    def from_kappa(cls, kappa: float) -> "WedgeSpec":
        if kappa <= 8:
            raise ValueError("kappa must exceed 8")
        return cls(gamma=4.0 / math.sqrt(kappa))


@dataclass(frozen=True)
class BoundaryGrid:
    """Symmetric geometric grid on [-r, r]; one side stored, mirrored."""

    r: float
    n_per_side: int
    ratio: float

    def __post_init__(self):
        if not 0.0 < self.r <= 1.0:
            raise ValueError("cutoff r must lie in (0, 1]")
        if self.n_per_side < 8:
            raise ValueError("need at least 8 cells per side")
        if not 0.0 < self.ratio < 1.0:
            raise ValueError("ratio must lie in (0, 1)")

    @property
    def edges(self) -> np.ndarray:
        """Cell edges r, r*q, ..., descending toward 0 (length n+1)."""
        return self.r * self.ratio ** np.arange(self.n_per_side + 1)

    @property
    def centers(self) -> np.ndarray:
        """Geometric cell midpoints (uniform in the log coordinate)."""
        return self.r * self.ratio ** (np.arange(self.n_per_side) + 0.5)

    @property
    def widths(self) -> np.ndarray:
        e = self.edges
        return e[:-1] - e[1:]

    @property
    def u(self) -> np.ndarray:
        return -np.log(self.centers)

    @property
    def du(self) -> float:
        return -math.log(self.ratio)


def make_grid_for(
    spec: WedgeSpec, delta_min: float, n_per_side: int = 1024, r: float = 1.0
) -> BoundaryGrid:
    """Grid deep enough that the smallest cell sits far below any x_delta.

    Typical -log x_delta is A_delta / a with a large-deviation spread;
    the depth covers the mean plus ten standard deviations plus margin.
    """
    a_delta = (2.0 / spec.gamma) * math.log(1.0 / delta_min)
    mean_tau = a_delta / spec.a
    depth = mean_tau + 10.0 * math.sqrt(2.0 * max(mean_tau, 1.0)) + 10.0
    ratio = math.exp(-depth / n_per_side)
    return BoundaryGrid(r=r, n_per_side=n_per_side, ratio=ratio)


def _cell_averaged_same_side_variance(width_over_center: float) -> float:
    # mean of -2 log|x - y| over the unit square, rescaled to the cell:
    # E[-log|x-y|] = -log(width) + 3/2
    return -2.0 * math.log(width_over_center) + 3.0


def covariance_reference(x1: float, x2: float) -> float:
    """Exact target covariance -2 log|x1 - x2| for distinct boundary points."""
    if x1 == x2:
        raise ValueError("diagonal entries use the cell-average rule")
    return -2.0 * math.log(abs(x1 - x2))


@dataclass
class FieldBatch:
    """Sampled boundary fields, shape (n_cells, n_fields) per side.

    ``radial`` is the shared log-scale walk (covariance 2 min(u, v));
    ``log_weight`` holds importance weights for tilted draws (zeros when
    the draw is untilted).
    """

    h_left: np.ndarray
    h_right: np.ndarray
    radial: np.ndarray
    log_weight: np.ndarray


@dataclass(frozen=True)
class RadialTilt:
    """Exponential tilt of the radial drift, for rare-event moments.

    The drifted log-scale process -radial + a*u gains extra drift
    ``theta`` until it first reaches ``level``; Girsanov weights restore
    unbiasedness.  Choosing theta = sqrt(a^2 + 4 lambda) - a centers the
    sample on the paths that dominate the lambda-moment.
    """

    theta: float
    level: float


def tilt_for_moment(spec: WedgeSpec, lam: float, delta: float) -> RadialTilt:
    a = spec.a
    theta = math.sqrt(a * a + 4.0 * lam) - a
    level = (2.0 / spec.gamma) * math.log(1.0 / delta)
    return RadialTilt(theta=theta, level=level)


class BoundaryFieldSampler:
    """Samples the two-sided boundary field on a fixed grid.

    The stationary remainders are factorized once (Cholesky) and shared
    by all draws; field draws are matrix products, replica-parallel.
    """

    def __init__(self, grid: BoundaryGrid, spec: WedgeSpec):
        self.grid = grid
        self.spec = spec
        n = grid.n_per_side
        du = grid.du
        lags = np.arange(n) * du
        with np.errstate(divide="ignore"):
            g = -2.0 * np.log1p(-np.exp(-lags))
            gt = -2.0 * np.log1p(np.exp(-lags))
        # diagonal: total cell-averaged variance is -2 log w_j + 3, and the
        # radial part contributes 2 u_j; the difference is j-independent
        # because w_j / x_j is constant on a geometric grid
        woc = (1.0 - grid.ratio) / math.sqrt(grid.ratio)
        g[0] = _cell_averaged_same_side_variance(woc)
        c_sym = toeplitz(g + gt)
        c_asym = toeplitz(g - gt)
        for name, c in (("symmetric", c_sym), ("antisymmetric", c_asym)):
            ev_min = eigvalsh(c, subset_by_index=[0, 0])[0]
            if ev_min < -PSD_TOL * np.trace(c):
                raise KernelConstructionError(
                    f"{name} remainder kernel is not positive semidefinite "
                    f"(min eigenvalue {ev_min:.3e})"
                )
        jitter = PSD_TOL * np.trace(c_sym) * np.eye(n)
        self._chol_sym = cholesky(c_sym + jitter, lower=True)
        self._chol_asym = cholesky(c_asym + jitter, lower=True)

    def sample(
        self,
        n_fields: int,
        stream: RandomStream,
        tilt: RadialTilt | None = None,
    ) -> FieldBatch:
        rng = stream.generator()
        grid = self.grid
        n = grid.n_per_side
        du = grid.du
        u = grid.u
        a = self.spec.a

        # radial walk: V_0 ~ N(0, 2 u_0), increments N(0, 2 du)
        radial = np.empty((n, n_fields))
        log_w = np.zeros(n_fields)
        v = rng.normal(0.0, math.sqrt(2.0 * u[0]), n_fields)
        radial[0] = v
        if tilt is None:
            inc = rng.normal(0.0, math.sqrt(2.0 * du), (n - 1, n_fields))
            radial[1:] = v + np.cumsum(inc, axis=0)
        else:
            theta = tilt.theta
            for j in range(1, n):
                drifted = -v + a * u[j - 1]
                active = drifted < tilt.level
                inc = rng.normal(0.0, math.sqrt(2.0 * du), n_fields)
                inc -= theta * du * active
                log_w += active * (theta * inc / 2.0 + theta * theta * du / 4.0)
                v = v + inc
                radial[j] = v

        z = rng.standard_normal((2, n, n_fields))
        sym = self._chol_sym @ z[0]
        asym = self._chol_asym @ z[1]
        inv_sqrt2 = 1.0 / math.sqrt(2.0)
        return FieldBatch(
            h_left=radial + (sym + asym) * inv_sqrt2,
            h_right=radial + (sym - asym) * inv_sqrt2,
            radial=radial,
            log_weight=log_w,
        )


def sample_boundary_field(
    grid: BoundaryGrid, spec: WedgeSpec, stream: RandomStream, n_fields: int = 1
) -> FieldBatch:
    """Convenience one-shot sampler (builds the factorization each call)."""
    return BoundaryFieldSampler(grid, spec).sample(n_fields, stream)


@dataclass
class MeasureProfile:
    """Per-cell quantum boundary masses and their cumulatives from 0.

    cum arrays are indexed by edge: cum[j] = measure of [0, edge_j]
    (decreasing in j; cum[n] = 0 below the grid).  Shapes (n+1, B).
    """

    grid: BoundaryGrid
    masses_left: np.ndarray
    masses_right: np.ndarray
    cum_left: np.ndarray
    cum_right: np.ndarray

    @property
    def cum_both(self) -> np.ndarray:
        return self.cum_left + self.cum_right

    @property
    def total_left(self) -> np.ndarray:
        return self.cum_left[0]

    @property
    def total_right(self) -> np.ndarray:
        return self.cum_right[0]


def _reverse_cumsum(masses: np.ndarray) -> np.ndarray:
    out = np.zeros((masses.shape[0] + 1, masses.shape[1]))
    out[:-1] = np.cumsum(masses[::-1], axis=0)[::-1]
    return out


def quantum_boundary_measure(
    fields: FieldBatch, spec: WedgeSpec, grid: BoundaryGrid
) -> MeasureProfile:
    """Cell masses width^(1 + gamma^2/4) * exp((gamma/2) h) * |x|^(-gamma alpha/2).

    Computed in log space before exponentiation; all masses are positive
    and the cumulative from 0 outward is nondecreasing by construction.
    """
    gamma = spec.gamma
    alpha = spec.effective_alpha
    log_geom = (1.0 + gamma**2 / 4.0) * np.log(grid.widths) + (
        gamma * alpha / 2.0
    ) * grid.u
    log_geom = log_geom[:, None]
    m_left = np.exp(log_geom + (gamma / 2.0) * fields.h_left)
    m_right = np.exp(log_geom + (gamma / 2.0) * fields.h_right)
    return MeasureProfile(
        grid=grid,
        masses_left=m_left,
        masses_right=m_right,
        cum_left=_reverse_cumsum(m_left),
        cum_right=_reverse_cumsum(m_right),
    )


def find_x_delta(
    profile: MeasureProfile, delta: float, side: str = "L"
) -> tuple[np.ndarray, np.ndarray]:
    """Quantum endpoint: smallest x with measure([0, x]) >= delta, capped at r.

    Linear interpolation inside the crossing cell; returns (x_bar, capped)
    arrays over the field batch.  A delta above the total side mass caps
    the endpoint at r with the flag set.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    if side in ("L", "left"):
        cum, masses = profile.cum_left, profile.masses_left
    elif side in ("R", "right"):
        cum, masses = profile.cum_right, profile.masses_right
    elif side == "both":
        cum = profile.cum_both
        masses = profile.masses_left + profile.masses_right
    else:
        raise ValueError("side must be 'L', 'R' or 'both'")
    grid = profile.grid
    edges = grid.edges
    widths = grid.widths
    count = (cum >= delta).sum(axis=0)  # cells are sorted outward
    capped = count == 0
    j = np.clip(count - 1, 0, grid.n_per_side - 1)
    b = np.arange(cum.shape[1])
    inner = cum[j + 1, b]
    x = edges[j + 1] + (delta - inner) * widths[j] / masses[j, b]
    x = np.minimum(x, grid.r)
    x[capped] = grid.r
    return x, capped


@dataclass
class MomentEstimate:
    delta: float
    mean: float
    stderr: float
    n_fields: int
    lam1: float
    lam2: float
    cap_fraction: float


def estimate_joint_moment(
    spec: WedgeSpec,
    lam1: float,
    lam2: float,
    deltas: np.ndarray,
    n_fields: int,
    stream: RandomStream,
    grid: BoundaryGrid | None = None,
    sampler: BoundaryFieldSampler | None = None,
    batch: int = 20_000,
    tilt: RadialTilt | None = None,
) -> list[MomentEstimate]:
    """Monte Carlo E[xbar_L^lam1 * xbar_R^lam2] on a delta grid.

    One set of fields serves every delta (common random numbers).  With a
    RadialTilt the values carry Girsanov weights; the estimator stays
    unbiased and its variance drops for small delta.
    """
    if lam1 < 0 or lam2 < 0 or lam1 + lam2 <= 0:
        raise ValueError("moments need lam1, lam2 >= 0 with a positive sum")
    deltas = np.asarray(deltas, dtype=float)
    if grid is None:
        grid = make_grid_for(spec, float(deltas.min()))
    if sampler is None:
        sampler = BoundaryFieldSampler(grid, spec)
    vals = np.empty((len(deltas), n_fields))
    caps = np.zeros(len(deltas))
    done = 0
    k = 0
    while done < n_fields:
        b = min(batch, n_fields - done)
        fields = sampler.sample(b, stream.spawn(k), tilt=tilt)
        profile = quantum_boundary_measure(fields, spec, grid)
        w = np.exp(fields.log_weight)
        for i, d in enumerate(deltas):
            xl, cl = find_x_delta(profile, d, "L")
            xr, cr = find_x_delta(profile, d, "R")
            vals[i, done : done + b] = w * xl**lam1 * xr**lam2
            caps[i] += float((cl & cr).sum())
        done += b
        k += 1
    out = []
    for i, d in enumerate(deltas):
        mean, se = batch_means(vals[i], 16)
        out.append(
            MomentEstimate(
                delta=float(d),
                mean=mean,
                stderr=se,
                n_fields=n_fields,
                lam1=lam1,
                lam2=lam2,
                cap_fraction=caps[i] / n_fields,
            )
        )
    return out


def fit_moment_exponent(
    estimates: list[MomentEstimate], spec: WedgeSpec
) -> tuple[ExponentFit, float]:
    """Slope of log E against log(1/delta), with the predicted exponent.

    The prediction is (a - sqrt(a^2 + 4(lam1+lam2))) / gamma; at least 4
    delta points spanning 1.5 decades are required.
    """
    if len(estimates) < 4:
        raise ValueError("need at least 4 delta points")
    ds = np.array([e.delta for e in estimates])
    span = math.log10(ds.max() / ds.min())
    if span < 1.5:
        raise ValueError("delta grid must span at least 1.5 decades")
    pts = [
        FitPoint(x=math.log(1.0 / e.delta), estimate=e.mean, stderr=e.stderr)
        for e in estimates
    ]
    fit = loglog_fit(pts)
    lam = estimates[0].lam1 + estimates[0].lam2
    a = spec.a
    theory = (a - math.sqrt(a * a + 4.0 * lam)) / spec.gamma
    return fit, theory


@dataclass
class SandwichCheck:
    """Per-delta ordering E[two-sided^s] <= E[joint] <= E[one-sided^s].

    The two-sided endpoint (combined mass delta) is below both one-sided
    endpoints, so the lower bound holds pointwise; the upper bound is the
    symmetrized Hoelder estimate.  Differences use shared fields, so the
    stderr is of the paired difference, which is what the 3-sigma slack
    is measured against.
    """

    delta: float
    lower: float
    joint: float
    upper: float
    lower_slack_z: float
    upper_slack_z: float

    @property
    def holds(self) -> bool:
        return self.lower_slack_z >= -3.0 and self.upper_slack_z >= -3.0


def moment_sandwich(
    spec: WedgeSpec,
    lam1: float,
    lam2: float,
    deltas: np.ndarray,
    n_fields: int,
    stream: RandomStream,
    grid: BoundaryGrid | None = None,
) -> list[SandwichCheck]:
    deltas = np.asarray(deltas, dtype=float)
    if grid is None:
        grid = make_grid_for(spec, float(deltas.min()))
    sampler = BoundaryFieldSampler(grid, spec)
    fields = sampler.sample(n_fields, stream)
    profile = quantum_boundary_measure(fields, spec, grid)
    s = lam1 + lam2
    out = []
    for d in deltas:
        xl, _ = find_x_delta(profile, float(d), "L")
        xr, _ = find_x_delta(profile, float(d), "R")
        xb, _ = find_x_delta(profile, float(d), "both")
        joint = xl**lam1 * xr**lam2
        low_diff = joint - xb**s
        up_diff = xl**s - joint
        jm, _ = batch_means(joint, 16)
        lm, lse = batch_means(low_diff, 16)
        um, use_ = batch_means(up_diff, 16)
        out.append(
            SandwichCheck(
                delta=float(d),
                lower=jm - lm,
                joint=jm,
                upper=jm + um,
                lower_slack_z=lm / lse if lse > 0 else math.inf,
                upper_slack_z=um / use_ if use_ > 0 else math.inf,
            )
        )
    return out


@dataclass
class TauCrosscheck:
    delta: float
    mean_log_ratio: float
    sd_log_ratio: float
    laplace_mc: float
    laplace_theory: float


def tau_estimator_crosscheck(
    spec: WedgeSpec,
    deltas: np.ndarray,
    n_fields: int,
    stream: RandomStream,
    lam: float = 1.0,
    grid: BoundaryGrid | None = None,
) -> tuple[list[TauCrosscheck], float]:
    """Compare exp(-tau_delta) with the measured endpoint on shared fields.

    tau_delta is read off the field's own radial component, so the two
    quantities share randomness.  Returns the per-delta diagnostics and
    the cross-estimator slope of log E[xbar^lam] against
    log E[exp(-lam tau)], which should be close to 1.
    """
    deltas = np.asarray(deltas, dtype=float)
    if grid is None:
        grid = make_grid_for(spec, float(deltas.min()))
    sampler = BoundaryFieldSampler(grid, spec)
    fields = sampler.sample(n_fields, stream)
    profile = quantum_boundary_measure(fields, spec, grid)
    u = grid.u
    drifted = -fields.radial + spec.a * u[:, None]  # (n, B)
    out = []
    log_ex, log_etau = [], []
    for d in deltas:
        level = (2.0 / spec.gamma) * math.log(1.0 / d)
        crossed = drifted >= level
        count = crossed.sum(axis=0)
        first = np.argmax(crossed, axis=0)
        never = count == 0
        first[never] = len(u) - 1
        b = np.arange(n_fields)
        j = np.maximum(first, 1)
        d0 = drifted[j - 1, b]
        d1 = drifted[j, b]
        frac = np.clip((level - d0) / np.maximum(d1 - d0, 1e-300), 0.0, 1.0)
        tau = u[j - 1] + frac * (u[j] - u[j - 1])
        tau[first == 0] = u[0]
        tau[never] = u[-1]
        xhat = np.exp(-tau)
        xbar, _ = find_x_delta(profile, float(d), "L")
        ratio = np.log(xbar) + tau
        ml = float(np.mean(np.exp(-lam * tau)))
        out.append(
            TauCrosscheck(
                delta=float(d),
                mean_log_ratio=float(np.mean(ratio)),
                sd_log_ratio=float(np.std(ratio)),
                laplace_mc=ml,
                laplace_theory=float(d) ** (
                    (math.sqrt(spec.a**2 + 4.0 * lam) - spec.a) / spec.gamma
                ),
            )
        )
        log_ex.append(math.log(float(np.mean(xbar**lam))))
        log_etau.append(math.log(ml))
    slope = float(np.polyfit(log_etau, log_ex, 1)[0])
    return out, slope
