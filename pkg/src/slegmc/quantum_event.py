"""Avoidance probability of the curve against a quantum boundary scale.

A boundary field fixes two random endpoints: the smallest x on each side
with quantum length delta between it and the origin.  The event is that
an independent chordal curve, stopped at capacity r^2, swallows neither
endpoint.  Conditioning on the field reduces the probability to a power
of the endpoints (the same power as the two-force-point avoidance law),
so the indicator can be replaced by that analytic conditional value; the
resulting estimator needs no curve simulation and reaches deltas whose
direct hit probabilities are of order delta^4.  Direct simulation runs
on a large-delta window to validate it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary_gmc import (
    BoundaryFieldSampler,
    WedgeSpec,
    find_x_delta,
    make_grid_for,
    quantum_boundary_measure,
    tilt_for_moment,
)
from .exponent_stats import ExponentFit, FitPoint, batch_means, loglog_fit
from .rng import RandomStream
from .sle_loewner import _radius_batch, _simulate_batch

FIELD_STREAM = 0  # child index for field randomness
SLE_STREAM = 1  # child index for curve randomness (kept disjoint)


@dataclass(frozen=True)
class QuantumEventConfig:
    kappa: float
    deltas: tuple[float, ...]
    n_fields: int
    n_sle_per_field: int = 1
    r: float = 1.0
    mode: str = "rao-blackwell"
    stopping: str = "capacity"
    n_grid: int = 1024
    # capacity proxy for the radius-r stop is capacity_factor * r^2; the
    # half-disk of radius r has capacity r^2/2, so any fixed fraction is a
    # valid proxy at exponent level.  Smaller factors raise the avoidance
    # prefactor, which is what makes the direct validation window
    # reachable; slopes do not depend on the factor.
    capacity_factor: float = 1.0

    def __post_init__(self):
        if self.kappa <= 8:
            raise ValueError("kappa must exceed 8")
        if not 0.0 < self.r <= 1.0:
            raise ValueError("r must lie in (0, 1]")
        if self.mode not in ("direct", "rao-blackwell"):
            raise ValueError("mode must be 'direct' or 'rao-blackwell'")
        if self.stopping not in ("capacity", "radius"):
            raise ValueError("stopping must be 'capacity' or 'radius'")
        if min(self.deltas) <= 0:
            raise ValueError("deltas must be positive")
        _ = self.wedge  # validates gamma

    @property
    def gamma(self) -> float:
        return 4.0 / math.sqrt(self.kappa)

    @property
    def wedge(self) -> WedgeSpec:
        return WedgeSpec(gamma=self.gamma)

    @property
    def rho(self) -> float:
        return self.kappa - 4.0

    @property
    def rb_lambda(self) -> float:
        """Total endpoint power in the conditional value, kappa/2 - 2."""
        return 2.0 * self.rho / self.kappa + self.rho**2 / (2.0 * self.kappa)

    @property
    def t_capacity(self) -> float:
        return self.capacity_factor * self.r * self.r


def _endpoints(
    config: QuantumEventConfig,
    delta: float,
    n: int,
    stream: RandomStream,
    sampler: BoundaryFieldSampler,
    tilt=None,
):
    fields = sampler.sample(n, stream, tilt=tilt)
    profile = quantum_boundary_measure(fields, config.wedge, sampler.grid)
    xl, cl = find_x_delta(profile, delta, "L")
    xr, cr = find_x_delta(profile, delta, "R")
    return xl, xr, cl & cr, np.exp(fields.log_weight)


def _conditional_value(config: QuantumEventConfig, xl, xr, capped):
    """Analytic conditional avoidance value given the endpoints, in [0, 1]."""
    e1 = config.rho / config.kappa
    e2 = config.rho**2 / (2.0 * config.kappa)
    v = xl**e1 * xr**e1 * (xl + xr) ** e2
    v = np.minimum(v, 1.0)
    v[capped] = 1.0
    return v


def sample_quantum_event(config: QuantumEventConfig, stream: RandomStream) -> bool:
    """One replica: draw a field, then run an independent curve to the stop.

    Both endpoints capped at r means the curve cannot reach either within
    the stopping rule, so the event holds without simulation.
    """
    delta = config.deltas[0]
    grid = make_grid_for(config.wedge, delta, config.n_grid, config.r)
    sampler = BoundaryFieldSampler(grid, config.wedge)
    xl, xr, capped, _ = _endpoints(
        config, delta, 1, stream.spawn(FIELD_STREAM), sampler
    )
    if capped[0]:
        return True
    rng = stream.spawn(SLE_STREAM).generator()
    if config.stopping == "capacity":
        _, _, _, swallowed = _simulate_batch(
            config.kappa, xl, xr, config.t_capacity, rng
        )
        return not bool(swallowed[0])
    surv, _ = _radius_batch(config.kappa, xl, xr, config.r, rng)
    return bool(surv[0])


@dataclass
class QuantumEstimate:
    delta: float
    mode: str
    estimate: float
    stderr: float
    n_fields: int
    n_sle: int
    cap_fraction: float


def rao_blackwell_estimate(
    config: QuantumEventConfig,
    stream: RandomStream,
    batch: int = 50_000,
    tilted: bool = True,
) -> list[QuantumEstimate]:
    """Average the conditional value over field draws only, per delta.

    Exponent-exact, not prefactor-exact: the clamp at 1 and the dropped
    vanishing corrections shift the constant, not the slope.  Small
    deltas use an exponentially tilted radial drift with importance
    weights; without it the relative variance grows like delta^(-2) for
    gamma = 1 and the fit window would be unreachable.
    """
    if config.mode != "rao-blackwell":
        raise ValueError("config.mode must be 'rao-blackwell'")
    grid = make_grid_for(config.wedge, min(config.deltas), config.n_grid, config.r)
    sampler = BoundaryFieldSampler(grid, config.wedge)
    out = []
    for i, delta in enumerate(config.deltas):
        tilt = (
            tilt_for_moment(config.wedge, config.rb_lambda, delta) if tilted else None
        )
        vals = np.empty(config.n_fields)
        caps = 0
        done = 0
        k = 0
        while done < config.n_fields:
            b = min(batch, config.n_fields - done)
            sub = stream.spawn(FIELD_STREAM).spawn(i).spawn(k)
            xl, xr, capped, w = _endpoints(config, delta, b, sub, sampler, tilt)
            vals[done : done + b] = w * _conditional_value(config, xl, xr, capped)
            caps += int(capped.sum())
            done += b
            k += 1
        mean, se = batch_means(vals, 16)
        out.append(
            QuantumEstimate(
                delta=delta,
                mode="rao-blackwell",
                estimate=mean,
                stderr=se,
                n_fields=config.n_fields,
                n_sle=0,
                cap_fraction=caps / config.n_fields,
            )
        )
    return out


def direct_estimate(
    config: QuantumEventConfig,
    stream: RandomStream,
    batch: int = 20_000,
) -> list[QuantumEstimate]:
    """Field draw plus independent curve runs per field, per delta.

    Curve randomness comes from a stream index disjoint from the field
    stream; with n_sle_per_field > 1 the indicators for one field are
    averaged before pooling (two-level design, batch-means errors).
    """
    grid = make_grid_for(config.wedge, min(config.deltas), config.n_grid, config.r)
    sampler = BoundaryFieldSampler(grid, config.wedge)
    m = config.n_sle_per_field
    out = []
    for i, delta in enumerate(config.deltas):
        vals = np.empty(config.n_fields)
        caps = 0
        done = 0
        k = 0
        while done < config.n_fields:
            b = min(batch, config.n_fields - done)
            f_sub = stream.spawn(FIELD_STREAM).spawn(i).spawn(k)
            xl, xr, capped, _ = _endpoints(config, delta, b, f_sub, sampler)
            rng = stream.spawn(SLE_STREAM).spawn(i).spawn(k).generator()
            surv_mean = np.zeros(b)
            run = ~capped
            for _rep in range(m):
                if config.stopping == "capacity":
                    _, _, _, swallowed = _simulate_batch(
                        config.kappa, xl[run], xr[run], config.t_capacity, rng
                    )
                    surv = ~swallowed
                else:
                    surv, _ = _radius_batch(
                        config.kappa, xl[run], xr[run], config.r, rng
                    )
                surv_mean[run] += surv / m
            surv_mean[capped] = 1.0
            vals[done : done + b] = surv_mean
            caps += int(capped.sum())
            done += b
            k += 1
        mean, se = batch_means(vals, 16)
        out.append(
            QuantumEstimate(
                delta=delta,
                mode="direct",
                estimate=mean,
                stderr=se,
                n_fields=config.n_fields,
                n_sle=m,
                cap_fraction=caps / config.n_fields,
            )
        )
    return out


def fit_quantum_exponent(
    estimates: list[QuantumEstimate],
) -> tuple[ExponentFit, float]:
    """Slope of log estimate against log(1/delta); prediction -4/gamma^2.

    The gamma behind the prediction is read off the estimates themselves,
    so the caller passes the config-free list.
    """
    if len(estimates) < 4:
        raise ValueError("need at least 4 delta points")
    pts = [
        FitPoint(x=math.log(1.0 / e.delta), estimate=e.estimate, stderr=e.stderr)
        for e in estimates
        if e.estimate > 0
    ]
    return loglog_fit(pts)


def quantum_theory_slope(config: QuantumEventConfig) -> float:
    return -4.0 / config.gamma**2


def compare_modes(
    rb: list[QuantumEstimate], direct: list[QuantumEstimate]
) -> list[tuple[float, float]]:
    """Per-delta (log-ratio, joint stderr of the log-ratio) on shared deltas.

    The conditional value is exponent-exact only, so the comparison is
    made in slope space by the caller when prefactors disagree; the raw
    ratios are still reported.
    """
    by_delta = {e.delta: e for e in direct}
    out = []
    for e in rb:
        d = by_delta.get(e.delta)
        if d is None or e.estimate <= 0 or d.estimate <= 0:
            continue
        log_ratio = math.log(e.estimate / d.estimate)
        se = math.sqrt(
            (e.stderr / e.estimate) ** 2 + (d.stderr / d.estimate) ** 2
        )
        out.append((log_ratio, se))
    return out


@dataclass
class SplitReport:
    delta: float
    s: float
    lhs: float
    lhs_stderr: float
    rhs: float
    rhs_stderr: float
    slack: float
    slack_stderr: float
    passed: bool


def consistency_split(
    config: QuantumEventConfig,
    s: float,
    stream: RandomStream,
) -> list[SplitReport]:
    """Check P[event to full capacity] <= P[event to capacity delta^s] + spill.

    Shortening the stopping time can only grow the avoidance set, so the
    full-capacity probability is bounded by the delta^s-capacity one; the
    spill term (the chance the full stop happens before the short one) is
    identically zero under the capacity proxy and is reported as such.  Verified within 3-stderr slack per delta.
    """
    if not 0.0 < s < 1.0:
        raise ValueError("s must lie in (0, 1)")
    if config.stopping != "capacity":
        raise ValueError("the split check runs in capacity stopping mode")
    full = rao_blackwell_like_direct(config, config.t_capacity, stream)
    out = []
    for i, delta in enumerate(config.deltas):
        t_short = min(delta**s, config.t_capacity)
        short = _direct_at_capacity(config, delta, t_short, stream, i)
        lhs, lse = full[i]
        rhs, rse = short
        slack_se = math.sqrt(lse**2 + rse**2)
        slack = rhs - lhs
        out.append(
            SplitReport(
                delta=delta,
                s=s,
                lhs=lhs,
                lhs_stderr=lse,
                rhs=rhs,
                rhs_stderr=rse,
                slack=slack,
                slack_stderr=slack_se,
                passed=slack >= -3.0 * slack_se,
            )
        )
    return out


def _direct_at_capacity(
    config: QuantumEventConfig,
    delta: float,
    t_stop: float,
    stream: RandomStream,
    index: int,
    batch: int = 20_000,
) -> tuple[float, float]:
    grid = make_grid_for(config.wedge, delta, config.n_grid, config.r)
    sampler = BoundaryFieldSampler(grid, config.wedge)
    vals = np.empty(config.n_fields)
    done = 0
    k = 0
    while done < config.n_fields:
        b = min(batch, config.n_fields - done)
        f_sub = stream.spawn(FIELD_STREAM).spawn(index).spawn(k)
        xl, xr, capped, _ = _endpoints(config, delta, b, f_sub, sampler)
        rng = stream.spawn(SLE_STREAM).spawn(index).spawn(k).generator()
        run = ~capped
        surv = np.ones(b)
        _, _, _, swallowed = _simulate_batch(
            config.kappa, xl[run], xr[run], t_stop, rng
        )
        surv[run] = (~swallowed).astype(float)
        vals[done : done + b] = surv
        done += b
        k += 1
    return batch_means(vals, 16)


def rao_blackwell_like_direct(
    config: QuantumEventConfig, t_stop: float, stream: RandomStream
) -> list[tuple[float, float]]:
    """Direct indicator estimates at a common stopping capacity, per delta.

    Shares the field stream indexing of the delta loop so the split check
    compares like with like (common random numbers across the two sides).
    """
    return [
        _direct_at_capacity(config, d, t_stop, stream, i)
        for i, d in enumerate(config.deltas)
    ]
