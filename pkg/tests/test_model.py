import math

import numpy as np
import pytest

from bayesevt import (
    ExtremesSample,
    GevParams,
    LatentEffects,
    LocationREParams,
    LocScaleREParams,
    RandomEffectsSpec,
    gev_loglik_conditional,
    gev_loglik_fixed,
    gev_loglik_marginal,
    sample_gev,
)
from bayesevt.model import group_marginal_loglik
from oracles import mc_marginal_loglik


def grouped(rng, G=3, per=4, p=GevParams(0.1, 2.0, 0.8), shift=0.5):
    vals, gids = [], []
    for g in range(G):
        d = rng.normal(0, shift)
        vals.append(sample_gev(GevParams(p.xi, p.mu + d, p.sigma), rng, per))
        gids += [g] * per
    v = np.concatenate(vals)
    return ExtremesSample(v, tuple(str(i) for i in range(v.size)), np.array(gids),
                          tuple(f"g{g}" for g in range(G)))


def test_re_spec_validation():
    with pytest.raises(ValueError):
        RandomEffectsSpec("scale")
    with pytest.raises(ValueError):
        LocationREParams(0.0)
    with pytest.raises(ValueError):
        LocScaleREParams(0, 0, 1, 1, 1.0)
    h = LocScaleREParams(0.1, 0.0, 4.0, 1.0, 0.5)
    np.testing.assert_allclose(h.cov, [[4.0, 1.0], [1.0, 1.0]])


def test_conditional_with_zero_effects_is_fixed(rng):
    s = grouped(rng)
    p = GevParams(0.1, 2.0, 0.8)
    fixed = gev_loglik_fixed(p, s)
    cond = gev_loglik_conditional(p, LatentEffects(np.zeros(3)), RandomEffectsSpec("location"), s)
    assert cond == pytest.approx(fixed, rel=1e-12)
    ls = gev_loglik_conditional(p, LatentEffects(np.zeros(3), np.array([0, 0, -1.0])),
                                RandomEffectsSpec("location-scale"), s)
    assert ls == -math.inf


def test_tau_to_zero_recovers_fixed(rng):
    s = grouped(rng)
    p = GevParams(0.1, 2.0, 0.8)
    assert gev_loglik_marginal(p, LocationREParams(1e-12), s) == pytest.approx(gev_loglik_fixed(p, s), abs=1e-6)


@pytest.mark.parametrize("hyper", [LocationREParams(0.6), LocScaleREParams(0.0, 0.0, 0.5, 0.01, 0.3)])
def test_marginal_matches_monte_carlo(rng, hyper):
    s = grouped(rng)
    p = GevParams(0.1, 2.0, 0.8)
    mc, se = mc_marginal_loglik(p, hyper, s, 200_000, np.random.default_rng(7))
    assert abs(gev_loglik_marginal(p, hyper, s) - mc) < 4 * se + 1e-6


def test_quadrature_order_stability(rng):
    s = grouped(rng, shift=1.0)
    p = GevParams(-0.1, 2.0, 0.6)
    vals = [gev_loglik_marginal(p, LocationREParams(1.5), s, quad_order=k) for k in (20, 40, 80)]
    assert max(vals) - min(vals) < 1e-8


def test_relabelling_groups_is_invariant(rng):
    s = grouped(rng, G=4)
    p = GevParams(0.05, 2.0, 0.8)
    perm = np.array([2, 0, 3, 1])
    s2 = ExtremesSample(s.values, s.block_ids, perm[s.group_ids], s.group_labels)
    h = LocationREParams(0.4)
    assert gev_loglik_marginal(p, h, s2) == pytest.approx(gev_loglik_marginal(p, h, s), rel=1e-12)


def test_group_marginal_returns_per_group(rng):
    s = grouped(rng)
    p = GevParams(0.1, 2.0, 0.8)
    per = group_marginal_loglik(p, s, np.zeros(1), np.array([[0.3]]))
    assert per.shape == (3,)
    assert per.sum() == pytest.approx(gev_loglik_marginal(p, LocationREParams(0.3), s))


def test_marginal_of_impossible_data_is_neg_inf():
    s = ExtremesSample(np.array([10.0, 0.0]), ("a", "b"), np.array([0, 1]), ("0", "1"))
    p = GevParams(-1.0, 0.0, 1.0)  # upper endpoint 1
    v = gev_loglik_marginal(p, LocationREParams(1e-6), s)
    assert v == -math.inf or v < -1e5
