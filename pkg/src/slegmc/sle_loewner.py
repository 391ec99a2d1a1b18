"""Chordal Loewner evolution with two boundary force points.

The driving function is sqrt(kappa) times Brownian motion; the images of
the boundary points -z_L and z_R under the Loewner maps obey
dz = 2 dt / (z - W) until they are swallowed.  Both gaps are constant
multiples of Bessel processes of dimension 1 + 4/kappa, and the product
(gap_R)^(rho/kappa) (gap_L)^(rho/kappa) (span)^(rho^2/2kappa) with
rho = kappa - 4 is a local martingale, which is the main internal oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .exponent_stats import (
    ExponentFit,
    FitPoint,
    batch_means,
    binomial_stderr,
    loglog_fit,
)
from .rng import RandomStream

C_DT = 1e-2  # adaptive step: dt = min(C_DT * gap^2, DT_MAX)
DT_MAX = 1e-4
EPS_SWALLOW_REL = 1e-6  # swallow threshold, relative to the initial gap
# absolute swallow floor: a gap below this survives with probability far
# beyond double precision, and it keeps the dt floor from exceeding the
# stability constraint dt <= C_DT * gap^2 on still-active paths
EPS_SWALLOW_ABS = 1e-6


@dataclass(frozen=True)
class SleParams:
    kappa: float
    z_left: float
    z_right: float

    def __post_init__(self):
        if self.kappa <= 4:
            raise ValueError("kappa must exceed 4")
        for z in (self.z_left, self.z_right):
            if not 0.0 < z <= 1.0:
                raise ValueError("force points must lie in (0, 1]")

    @property
    def rho(self) -> float:
        return self.kappa - 4.0

    @property
    def exponent_sum(self) -> float:
        """2 rho/kappa + rho^2/(2 kappa), identically kappa/2 - 2."""
        return 2.0 * self.rho / self.kappa + self.rho**2 / (2.0 * self.kappa)


@dataclass(frozen=True)
class LoewnerState:
    t: float
    w: float
    z_l: float
    z_r: float
    swallowed_l: bool
    swallowed_r: bool
    dt: float


def adaptive_dt(gap: float) -> float:
    return min(C_DT * gap * gap, DT_MAX)


def init_state(params: SleParams) -> LoewnerState:
    gap = min(params.z_left, params.z_right)
    eps_l = max(EPS_SWALLOW_REL * params.z_left, EPS_SWALLOW_ABS)
    eps_r = max(EPS_SWALLOW_REL * params.z_right, EPS_SWALLOW_ABS)
    return LoewnerState(
        t=0.0,
        w=0.0,
        z_l=-params.z_left,
        z_r=params.z_right,
        swallowed_l=params.z_left <= eps_l,
        swallowed_r=params.z_right <= eps_r,
        dt=adaptive_dt(gap),
    )


def step(state: LoewnerState, params: SleParams, xi: float) -> LoewnerState:
    """One Euler step; xi is a standard normal driving increment.

    The driving value moves by sqrt(kappa * dt) * xi (exact in
    distribution); the force-point images integrate the repulsion
    2 / (z - W) across the step, expanded to second order in the in-step
    driving fluctuation.  A gap at or below the swallow threshold
    (including a crossing) flags that side as swallowed.
    """
    if state.swallowed_l and state.swallowed_r:
        raise ValueError("both force points already swallowed")
    dt = state.dt
    dw = math.sqrt(params.kappa * dt) * xi
    w_new = state.w + dw
    z_l, z_r = state.z_l, state.z_r
    sw_l, sw_r = state.swallowed_l, state.swallowed_r
    eps_l = max(EPS_SWALLOW_REL * params.z_left, EPS_SWALLOW_ABS)
    eps_r = max(EPS_SWALLOW_REL * params.z_right, EPS_SWALLOW_ABS)
    if not sw_l:
        gl = state.w - z_l
        z_l = z_l - (
            2.0 * dt / gl - dw * dt / gl**2 + params.kappa * dt * dt / gl**3
        )
        if w_new - z_l <= eps_l:
            sw_l = True
    if not sw_r:
        gr = z_r - state.w
        z_r = z_r + (
            2.0 * dt / gr + dw * dt / gr**2 + params.kappa * dt * dt / gr**3
        )
        if z_r - w_new <= eps_r:
            sw_r = True
    gaps = []
    if not sw_l:
        gaps.append(w_new - z_l)
    if not sw_r:
        gaps.append(z_r - w_new)
    return LoewnerState(
        t=state.t + dt,
        w=w_new,
        z_l=z_l,
        z_r=z_r,
        swallowed_l=sw_l,
        swallowed_r=sw_r,
        dt=adaptive_dt(min(gaps)) if gaps else state.dt,
    )


def martingale_value(state: LoewnerState, params: SleParams) -> float:
    """The coordinate-change local martingale; 0 once either side is swallowed."""
    if state.swallowed_l or state.swallowed_r:
        return 0.0
    e1 = params.rho / params.kappa
    e2 = params.rho**2 / (2.0 * params.kappa)
    return (
        (state.z_r - state.w) ** e1
        * (state.w - state.z_l) ** e1
        * (state.z_r - state.z_l) ** e2
    )


def initial_martingale(params: SleParams) -> float:
    zl, zr = params.z_left, params.z_right
    e1 = params.rho / params.kappa
    e2 = params.rho**2 / (2.0 * params.kappa)
    return zr**e1 * zl**e1 * (zl + zr) ** e2


def _simulate_batch(
    kappa: float,
    z_left: np.ndarray,
    z_right: np.ndarray,
    t_stop: float,
    rng: np.random.Generator,
):
    """Advance a batch of replicas to t_stop or swallowing (adaptive clocks).

    Each replica carries its own capacity time and adaptive step.  Returns
    the final (w, z_l, z_r, swallowed) arrays.
    """
    n = len(z_left)
    w = np.zeros(n)
    zl = -z_left.astype(float)
    zr = z_right.astype(float)
    t = np.zeros(n)
    eps_l = np.maximum(EPS_SWALLOW_REL * z_left, EPS_SWALLOW_ABS)
    eps_r = np.maximum(EPS_SWALLOW_REL * z_right, EPS_SWALLOW_ABS)
    # gaps already at the floor count as swallowed; stepping them would
    # divide by a near-zero gap and eject the marked points to infinity
    swallowed = (z_left <= eps_l) | (z_right <= eps_r)
    active = np.arange(n)[~swallowed]
    while active.size:
        gl = w[active] - zl[active]
        gr = zr[active] - w[active]
        g = np.minimum(gl, gr)
        dt = np.minimum(C_DT * g * g, DT_MAX)
        dt = np.maximum(np.minimum(dt, t_stop - t[active]), 1e-14)
        dw = np.sqrt(kappa * dt) * rng.standard_normal(active.size)
        w_new = w[active] + dw
        # repulsion integrated along the in-step driving fluctuation
        # (bridge mean + Ito correction); plain Euler under-integrates by
        # a relative O(kappa * C_DT) near the swallow boundary
        zl_new = zl[active] - (
            2.0 * dt / gl - dw * dt / gl**2 + kappa * dt * dt / gl**3
        )
        zr_new = zr[active] + (
            2.0 * dt / gr + dw * dt / gr**2 + kappa * dt * dt / gr**3
        )
        sw = (w_new - zl_new <= eps_l[active]) | (zr_new - w_new <= eps_r[active])
        w[active] = w_new
        zl[active] = zl_new
        zr[active] = zr_new
        t[active] += dt
        swallowed[active] |= sw
        done = sw | (t[active] >= t_stop - 1e-12)
        active = active[~done]
    return w, zl, zr, swallowed


def simulate_event_batch(
    params_kappa: float,
    z_left: np.ndarray,
    z_right: np.ndarray,
    t_stop: float,
    stream: RandomStream,
) -> np.ndarray:
    """Survival indicators (neither point swallowed by capacity t_stop)."""
    rng = stream.generator()
    _, _, _, swallowed = _simulate_batch(
        params_kappa, np.asarray(z_left, float), np.asarray(z_right, float), t_stop, rng
    )
    return ~swallowed


def event_E_capacity(params: SleParams, T: float, stream: RandomStream) -> bool:
    """One replica of the boundary-avoidance event up to capacity time T."""
    if T <= 0:
        raise ValueError("T must be positive")
    surv = simulate_event_batch(
        params.kappa, np.array([params.z_left]), np.array([params.z_right]), T, stream
    )
    return bool(surv[0])


@dataclass
class EventEstimate:
    p_hat: float
    stderr: float
    hits: int
    n: int
    zero_hit: bool


def estimate_event_prob(
    params: SleParams,
    T: float,
    n: int,
    stream: RandomStream,
    batch: int = 20_000,
) -> EventEstimate:
    """Monte Carlo probability of the capacity-time avoidance event."""
    rng = stream.generator()
    hits = 0
    done = 0
    while done < n:
        b = min(batch, n - done)
        zl = np.full(b, params.z_left)
        zr = np.full(b, params.z_right)
        _, _, _, swallowed = _simulate_batch(params.kappa, zl, zr, T, rng)
        hits += int((~swallowed).sum())
        done += b
    return EventEstimate(
        p_hat=hits / n,
        stderr=binomial_stderr(hits, n),
        hits=hits,
        n=n,
        zero_hit=hits == 0,
    )


@dataclass
class MartingaleCheck:
    mean: float
    stderr: float
    m0: float
    z_score: float
    n: int
    t_stop: float


def martingale_check(
    params: SleParams,
    t_stop: float,
    n: int,
    stream: RandomStream,
    batch: int = 20_000,
) -> MartingaleCheck:
    """Sample mean of the stopped martingale against its initial value."""
    if t_stop <= 0:
        raise ValueError("t_stop must be positive")
    rng = stream.generator()
    e1 = params.rho / params.kappa
    e2 = params.rho**2 / (2.0 * params.kappa)
    vals = np.empty(n)
    done = 0
    while done < n:
        b = min(batch, n - done)
        zl0 = np.full(b, params.z_left)
        zr0 = np.full(b, params.z_right)
        w, zl, zr, swallowed = _simulate_batch(params.kappa, zl0, zr0, t_stop, rng)
        m = np.zeros(b)
        alive = ~swallowed
        m[alive] = (
            (zr[alive] - w[alive]) ** e1
            * (w[alive] - zl[alive]) ** e1
            * (zr[alive] - zl[alive]) ** e2
        )
        vals[done : done + b] = m
        done += b
    if n >= 128:
        mean, se = batch_means(vals, 16)
    else:
        mean = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(n))
    m0 = initial_martingale(params)
    z = (mean - m0) / se if se > 0 else 0.0
    return MartingaleCheck(mean=mean, stderr=se, m0=m0, z_score=z, n=n, t_stop=t_stop)


def trace_tip(driving: np.ndarray, dts: np.ndarray) -> complex:
    """Curve tip via the reverse Loewner flow through the driving history.

    Each forward step of capacity dt with driving value w is inverted by
    the slit map f(z) = w + sqrt((z - w)^2 - 4 dt); composing the inverses
    from the final driving value yields the tip in the upper half-plane.
    """
    if len(driving) != len(dts):
        raise ValueError("driving and dts must have equal length")
    if len(driving) == 0:
        return 0.0 + 0.0j
    z = complex(driving[-1], 0.0)
    for w, dt in zip(driving[::-1], dts[::-1]):
        s = np.sqrt(complex((z - w) ** 2 - 4.0 * dt))
        if s.imag < 0:
            s = -s
        z = w + s
    return z


def _radius_batch(
    kappa: float,
    z_left: np.ndarray,
    z_right: np.ndarray,
    r: float,
    rng: np.random.Generator,
    dt: float = DT_MAX,
    check_every: int = 50,
):
    """Avoidance event stopped at radius r, via periodic tip tracing.

    Fixed dt keeps the replicas step-aligned so the reverse flow can be
    vectorized across paths.  Capacity is capped at r^2: the half-disk of
    radius r has capacity r^2/2, so the exit time cannot exceed that cap.
    """
    n = len(z_left)
    t_cap = r * r
    n_steps = int(math.ceil(t_cap / dt))
    w_hist = np.zeros((n_steps + 1, n))
    w = np.zeros(n)
    zl = -z_left.astype(float)
    zr = z_right.astype(float)
    eps_l = np.maximum(EPS_SWALLOW_REL * z_left, EPS_SWALLOW_ABS)
    eps_r = np.maximum(EPS_SWALLOW_REL * z_right, EPS_SWALLOW_ABS)
    # gaps already at the floor count as swallowed; stepping them would
    # divide by a near-zero gap and eject the marked points to infinity
    swallowed = (z_left <= eps_l) | (z_right <= eps_r)
    exited = np.zeros(n, dtype=bool)
    active = np.arange(n)[~swallowed]
    for k in range(n_steps):
        if active.size == 0:
            break
        gl = np.maximum(w[active] - zl[active], 1e-300)
        gr = np.maximum(zr[active] - w[active], 1e-300)
        dw = math.sqrt(kappa * dt) * rng.standard_normal(active.size)
        w_new = w[active] + dw
        # same in-step repulsion correction as the capacity-time stepper
        zl[active] -= 2.0 * dt / gl - dw * dt / gl**2 + kappa * dt * dt / gl**3
        zr[active] += 2.0 * dt / gr + dw * dt / gr**2 + kappa * dt * dt / gr**3
        w[active] = w_new
        w_hist[k + 1, active] = w_new
        sw = (w[active] - zl[active] <= eps_l[active]) | (
            zr[active] - w[active] <= eps_r[active]
        )
        swallowed[active] |= sw
        active = active[~sw]
        if active.size and (k + 1) % check_every == 0:
            z = w[active].astype(complex)
            for j in range(k + 1, 0, -1):
                wj = w_hist[j - 1, active]
                s = np.sqrt((z - wj) ** 2 - 4.0 * dt + 0j)
                s = np.where(s.imag < 0, -s, s)
                z = wj + s
            out = np.abs(z) >= r
            exited[active] |= out
            active = active[~out]
    return ~swallowed, exited


def event_E_radius(
    params: SleParams, r: float, stream: RandomStream, check_every: int = 50
) -> bool:
    """One replica of the avoidance event stopped at curve radius r."""
    if r <= 0:
        raise ValueError("r must be positive")
    rng = stream.generator()
    surv, _ = _radius_batch(
        params.kappa,
        np.array([params.z_left]),
        np.array([params.z_right]),
        r,
        rng,
        check_every=check_every,
    )
    return bool(surv[0])


def estimate_event_prob_radius(
    params: SleParams,
    r: float,
    n: int,
    stream: RandomStream,
    batch: int = 2_000,
    check_every: int = 50,
) -> EventEstimate:
    rng = stream.generator()
    hits = 0
    done = 0
    while done < n:
        b = min(batch, n - done)
        surv, _ = _radius_batch(
            params.kappa,
            np.full(b, params.z_left),
            np.full(b, params.z_right),
            r,
            rng,
            check_every=check_every,
        )
        hits += int(surv.sum())
        done += b
    return EventEstimate(hits / n, binomial_stderr(hits, n), hits, n, hits == 0)


@dataclass
class EuclidFit:
    fit: ExponentFit
    theory: float
    mode: str
    cells: list[tuple[float, EventEstimate]]


def euclid_exponent_fit(
    kappa: float,
    z_grid: np.ndarray,
    T: float,
    n: int,
    stream: RandomStream,
    mode: str = "symmetric",
    z_right_fixed: float = 0.5,
) -> EuclidFit:
    """Fit the avoidance-probability exponent against its predicted value.

    symmetric mode (z_L = z_R = z): slope of log P against log z should be
    kappa/2 - 2.  asymmetric mode (z_R fixed): the known span factor
    (z_L + z_R)^(rho^2/2kappa) is divided out analytically; the remaining
    slope against log z_L should be rho/kappa.
    """
    rho = kappa - 4.0
    cells = []
    pts = []
    for i, z in enumerate(np.asarray(z_grid, float)):
        if mode == "symmetric":
            params = SleParams(kappa=kappa, z_left=z, z_right=z)
        elif mode == "asymmetric":
            params = SleParams(kappa=kappa, z_left=z, z_right=z_right_fixed)
        else:
            raise ValueError("mode must be 'symmetric' or 'asymmetric'")
        est = estimate_event_prob(params, T, n, stream.spawn(i))
        cells.append((float(z), est))
        if est.zero_hit:
            continue
        p, se = est.p_hat, est.stderr
        if mode == "asymmetric":
            corr = (z + z_right_fixed) ** (rho**2 / (2.0 * kappa))
            p, se = p / corr, se / corr
        pts.append(FitPoint(x=math.log(z), estimate=p, stderr=se, hits=est.hits))
    fit = loglog_fit(pts)
    theory = kappa / 2.0 - 2.0 if mode == "symmetric" else rho / kappa
    return EuclidFit(fit=fit, theory=theory, mode=mode, cells=cells)
