import math

import numpy as np
import pytest

from slegmc.cone_time import (
    ConeEventConfig,
    CorrelationSpec,
    cone_prob_grid,
    cone_prob_independent_theory,
    correlation_from_kappa,
    estimate_cone_prob,
    fit_cone_exponents,
    sigma_from_correlation,
)
from slegmc.rng import RandomStream


def test_correlation_known_values():
    assert abs(correlation_from_kappa(16.0) + math.cos(math.pi / 4)) < 1e-12
    assert abs(correlation_from_kappa(8.0)) < 1e-12


def test_exponent_identity_exact():
    # pi / arccos(cos(4 pi / kappa)) == kappa / 4
    for kappa in (8.01, 10.0, 12.0, 16.0, 24.0, 100.0):
        c = correlation_from_kappa(kappa)
        assert abs(sigma_from_correlation(c) - kappa / 4.0) < 1e-12


def test_sigma_independent_case():
    assert abs(sigma_from_correlation(0.0) - 2.0) < 1e-12


def test_kappa_below_four_rejected():
    with pytest.raises(ValueError):
        correlation_from_kappa(4.0)


def test_independent_theory_small_delta():
    # (2 Phi(d) - 1)^2 ~ (2 phi(0) d)^2
    d = 1e-4
    approx = (2.0 * d / math.sqrt(2.0 * math.pi)) ** 2
    assert abs(cone_prob_independent_theory(d) / approx - 1.0) < 1e-4


def test_cell_matches_closed_form_c_zero():
    spec = CorrelationSpec(c=0.0)
    cfg = ConeEventConfig(delta=0.3, t=1.0, dt=1e-3, n_samples=100_000)
    cell = estimate_cone_prob(spec, cfg, RandomStream(1))
    theory = cone_prob_independent_theory(0.3, 1.0)
    assert abs(cell.p_hat - theory) < 3.0 * cell.stderr + 0.02 * theory


def test_grid_monotone_in_delta_and_t():
    spec = CorrelationSpec.from_kappa(16.0)
    deltas = np.array([0.1, 0.2, 0.4])
    ts = np.array([0.5, 1.0])
    grid = cone_prob_grid(spec, deltas, ts, 1e-2, 20_000, RandomStream(2))
    p = {(c.delta, c.t): c.p_hat for c in grid.cells}
    for t in ts:
        assert p[(0.1, t)] <= p[(0.2, t)] <= p[(0.4, t)]
    for d in deltas:
        assert p[(d, 0.5)] >= p[(d, 1.0)]  # common random numbers make this exact


def test_grid_reproducible():
    spec = CorrelationSpec.from_kappa(12.0)
    args = (spec, np.array([0.2]), np.array([1.0]), 1e-2, 5_000)
    a = cone_prob_grid(*args, RandomStream(3))
    b = cone_prob_grid(*args, RandomStream(3))
    assert a.cells[0].hits == b.cells[0].hits


def test_obs_times_must_align_with_dt():
    spec = CorrelationSpec(c=0.0)
    with pytest.raises(ValueError):
        cone_prob_grid(
            spec, np.array([0.2]), np.array([0.10007]), 1e-2, 100, RandomStream(4)
        )


def test_brownian_scaling():
    # estimate(delta, t) ~ estimate(delta / sqrt(t), 1)
    spec = CorrelationSpec.from_kappa(16.0)
    n = 150_000
    grid = cone_prob_grid(spec, np.array([0.2]), np.array([4.0]), 1e-2, n, RandomStream(5))
    ref = cone_prob_grid(spec, np.array([0.1]), np.array([1.0]), 25e-4, n, RandomStream(6))
    a, b = grid.cells[0], ref.cells[0]
    se = math.hypot(a.stderr, b.stderr)
    assert abs(a.p_hat - b.p_hat) < 3.0 * se + 0.1 * max(a.p_hat, b.p_hat)


def test_fit_recovers_synthetic_sigma():
    from slegmc.cone_time import ConeCell

    cells = []
    for d in np.geomspace(0.1, 0.4, 6):
        for t in (0.5, 1.0, 2.0):
            p = 0.4 * d**3 * t**-1.5
            cells.append(
                ConeCell(
                    delta=float(d), t=float(t), hits=int(p * 1e7), n=int(1e7),
                    p_hat=p, stderr=1e-4 * p, zero_hit=False,
                )
            )
    fit = fit_cone_exponents(cells)
    assert abs(fit.sigma_from_delta - 3.0) < 1e-6
    assert abs(fit.sigma_from_t - 3.0) < 1e-6
    assert fit.joint is not None
    assert abs(fit.joint.ratio + 0.5) < 1e-6


def test_zero_hit_cells_excluded_and_reported():
    from slegmc.cone_time import ConeCell

    cells = [
        ConeCell(delta=float(d), t=1.0, hits=h, n=1000,
                 p_hat=h / 1000, stderr=0.001, zero_hit=h == 0)
        for d, h in zip(np.geomspace(0.05, 0.4, 6), [0, 3, 10, 40, 160, 600])
    ]
    fit = fit_cone_exponents(cells)
    assert len(fit.excluded_cells) == 1
