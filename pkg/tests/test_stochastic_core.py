import math

import numpy as np
import pytest

from slegmc.rng import RandomStream
from slegmc.stochastic_core import (
    BesselParams,
    DriftedBMParams,
    HittingProblem,
    estimate_laplace,
    hitting_time_to_level,
    laplace_theory,
    sample_bessel,
    sample_bessel_ensemble,
    sample_drifted_bm,
)


def test_laplace_theory_known_values():
    # (sqrt(1+24)-1)/1 = 4 -> 0.5^4
    assert abs(laplace_theory(1.0, 1.0, 6.0, 0.5) - 0.0625) < 1e-15
    assert laplace_theory(1.0, 1.0, 0.0, 0.3) == 1.0
    assert abs(laplace_theory(1.0, 1.0, 2.0, 0.1) - 0.01) < 1e-15


def test_laplace_theory_preconditions():
    with pytest.raises(ValueError):
        laplace_theory(0.0, 1.0, 1.0, 0.1)
    with pytest.raises(ValueError):
        laplace_theory(1.0, 1.0, 1.0, 1.5)


def test_hitting_problem_level():
    prob = HittingProblem(gamma=1.0, delta=0.1, lam=1.0)
    assert abs(prob.level - 2.0 * math.log(10.0)) < 1e-12


def test_drifted_bm_moments():
    params = DriftedBMParams(a=1.0, dt=1e-2)
    t, v = sample_drifted_bm(params, 2000.0, RandomStream(3))
    inc = np.diff(v)
    assert abs(inc.mean() - params.a * params.dt) < 5e-4
    assert abs(inc.var() - 2.0 * params.dt) < 2e-3


def test_hitting_time_monotone_in_level():
    params = DriftedBMParams(a=1.0, dt=1e-3)
    _, v = sample_drifted_bm(params, 50.0, RandomStream(4))
    t1 = hitting_time_to_level(v, params.dt, 1.0, RandomStream(5))
    t2 = hitting_time_to_level(v, params.dt, 5.0, RandomStream(5))
    assert t1 <= t2


def test_hitting_time_no_cross_is_inf():
    v = np.zeros(100)
    assert hitting_time_to_level(v, 1e-3, 10.0, RandomStream(6)) == math.inf


def test_hitting_time_level_zero_rejected():
    with pytest.raises(ValueError):
        hitting_time_to_level(np.zeros(10), 1e-3, 0.0, RandomStream(0))


def test_bridge_correction_only_adds_crossings():
    params = DriftedBMParams(a=1.0, dt=1e-2)
    hits_on = hits_off = 0
    for i in range(200):
        _, v = sample_drifted_bm(params, 3.0, RandomStream(7, i))
        t_off = hitting_time_to_level(v, params.dt, 2.0, bridge=False)
        t_on = hitting_time_to_level(v, params.dt, 2.0, RandomStream(8, i))
        assert t_on <= t_off
        hits_off += t_off < math.inf
        hits_on += t_on < math.inf
    assert hits_on >= hits_off


def test_estimate_laplace_matches_theory():
    est = estimate_laplace(
        1.0, 1.0, 2.0, 0.3, 20_000, dt=1e-3, stream=RandomStream(9)
    )
    theory = laplace_theory(1.0, 1.0, 2.0, 0.3)
    assert abs(est.mean - theory) < max(3.0 * est.stderr, 0.02 * theory)
    assert not est.horizon_warning


def test_estimate_laplace_lambda_zero_is_one():
    est = estimate_laplace(1.0, 1.0, 0.0, 0.3, 100, stream=RandomStream(10))
    assert est.mean == 1.0
    assert est.stderr == 0.0


def test_estimate_laplace_reproducible():
    a = estimate_laplace(1.0, 1.0, 2.0, 0.3, 2_000, stream=RandomStream(11))
    b = estimate_laplace(1.0, 1.0, 2.0, 0.3, 2_000, stream=RandomStream(11))
    assert a.mean == b.mean and a.stderr == b.stderr


def test_bessel_path_stays_positive_and_reproducible():
    params = BesselParams.from_kappa(16.0, x0=0.5, dt=1e-3)
    p1 = sample_bessel(params, 1.0, RandomStream(12))
    p2 = sample_bessel(params, 1.0, RandomStream(12))
    assert np.array_equal(p1.values, p2.values)
    assert (p1.values > 0).all()


def test_bessel_ensemble_local_martingale():
    # X^(2-d) stopped at absorption has constant mean across times
    params = BesselParams.from_kappa(16.0, x0=0.5, dt=2e-4)
    obs = np.array([0.05, 0.1, 0.2])
    x, absorbed = sample_bessel_ensemble(params, obs, 40_000, RandomStream(13))
    e = 2.0 - params.dimension
    m = np.where(absorbed, 0.0, x**e)
    means = m.mean(axis=0)
    ses = m.std(axis=0, ddof=1) / math.sqrt(x.shape[0])
    target = params.x0**e
    for mean, se in zip(means, ses):
        assert abs(mean - target) < 4.0 * se + 5e-3


def test_bessel_dimension_high_never_absorbs():
    params = BesselParams(dimension=3.0, x0=1.0, dt=1e-3)
    x, absorbed = sample_bessel_ensemble(
        params, np.array([0.5]), 2_000, RandomStream(14)
    )
    assert absorbed.mean() < 0.01
