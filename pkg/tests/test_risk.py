import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from bayesevt import GevParams, GpdParams, es_pot, gev_quantile, gpd_quantile, return_level, var_pot
from bayesevt.risk import (
    NonFiniteTransformError,
    es_map,
    plug_in,
    posterior_transform,
    return_level_map,
    transform_draws,
    var_map,
)
from bayesevt.sampler import Chain


@pytest.mark.parametrize("xi", [-0.3, -1e-10, 0.0, 0.2])
@pytest.mark.parametrize("k", [2, 10, 100])
def test_return_level_is_quantile(xi, k):
    p = GevParams(xi, 1.0, 0.7)
    assert return_level(p, k) == pytest.approx(gev_quantile(p, 1 - 1 / k), rel=1e-12)


def test_return_level_continuity_and_errors():
    a = return_level(GevParams(1e-7, 0, 1), 50)
    b = return_level(GevParams(0.0, 0, 1), 50)
    assert abs(a - b) < 1e-5
    with pytest.raises(ValueError):
        return_level(GevParams(0, 0, 1), 1)


def _tail_oracle(p, n, nu, tail):
    """VaR from the GPD quantile and ES by integrating the tail quantile function."""
    frac = nu / n

    def q(level):  # quantile of the observation distribution above u
        return p.u + gpd_quantile(GpdParams(p.xi, p.sigma), 1 - (1 - level) / frac)

    var = q(1 - tail)
    es, _ = integrate.quad(q, 1 - tail, 1, limit=200)
    return var, es / tail


@pytest.mark.parametrize("xi", [-0.2, 0.0, 0.3])
def test_var_es_against_oracle(xi):
    p = GpdParams(xi, 0.6, 2.0)
    var = var_pot(p, 1000, 80, 0.01)
    es = es_pot(var, p)
    v_ref, e_ref = _tail_oracle(p, 1000, 80, 0.01)
    assert var == pytest.approx(v_ref, rel=1e-10)
    assert es == pytest.approx(e_ref, rel=1e-6)


def test_var_warns_below_threshold():
    with pytest.warns(RuntimeWarning, match="below the threshold"):
        v = var_pot(GpdParams(-0.1, 0.41, 4.0), 10000, 100, 0.05)
    assert v < 4.0
    with pytest.raises(ValueError):
        var_pot(GpdParams(0.1, 1.0, 0.0), 100, 0, 0.05)
    assert es_pot(5.0, GpdParams(1.0, 1.0, 0.0)) == math.inf


def _chain(xi, sigma, mu=None):
    cols, names = [xi, sigma], ["xi", "sigma"]
    if mu is not None:
        cols.insert(1, mu)
        names.insert(1, "mu")
    return Chain(tuple(names), np.column_stack(cols), np.full(len(names), 0.3), 0, {})


def test_posterior_transform_and_plugin():
    rng = np.random.default_rng(0)
    ch = _chain(rng.normal(0.1, 0.05, 400), rng.gamma(50, 0.02, 400), rng.normal(3, 0.1, 400))
    f = return_level_map(10)
    ps = posterior_transform(ch, f)
    vals = transform_draws(ch, f)
    assert ps.mean == pytest.approx(vals.mean())
    assert ps.hpd_lo < ps.mean < ps.hpd_hi
    m = ch.posterior_mean()
    assert plug_in(ch, f) == pytest.approx(return_level(GevParams(m[0], m[1], m[2]), 10))


def test_nonfinite_es_is_reported():
    ch = _chain(np.linspace(0.5, 1.5, 200), np.ones(200))
    with pytest.raises(NonFiniteTransformError):
        posterior_transform(ch, es_map(1.0, 1000, 50, 0.01))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        posterior_transform(ch, var_map(1.0, 1000, 50, 0.01))
