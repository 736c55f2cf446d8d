import numpy as np
import pytest

from bayesevt import GpdParams, Prior, PriorSpec, SamplerConfig, fit_gev, fit_gpd, sample_gpd
from bayesevt.errors import ConfigError
from bayesevt.extract import ExceedanceSample
from bayesevt.simlab import ScenarioBM, generate_bm

CFG = SamplerConfig(burn_in=1000, n_draws=3000, thin=5, seed=11)


@pytest.fixture(scope="module")
def bm_sample():
    return generate_bm(ScenarioBM(periods=6, obs_per_year=360, tau=1.0, seed=2), np.random.default_rng(2))[1]


@pytest.mark.parametrize("re", ["none", "location", "location-scale"])
def test_fit_gev_models_run(bm_sample, re):
    res = fit_gev(bm_sample, re, cfg=CFG)
    assert set(res.summary.params) == set(res.top_names)
    assert len(res.chain) == CFG.retained
    assert np.isfinite(res.summary.dic) and np.isfinite(res.summary.loglik_at_mean)
    if re != "none":
        assert res.chain.names[len(res.top_names)].startswith("delta")
    if re == "location":
        assert res.summary["tau2"].hpd_lo > 0


def test_marginal_dic_mode(bm_sample):
    res = fit_gev(bm_sample, "location", cfg=CFG, dic_mode="marginal")
    assert res.summary.extra["dic_mode"] == "marginal"
    with pytest.raises(ConfigError):
        fit_gev(bm_sample, "location", cfg=CFG, dic_mode="other")


def test_partial_informative_priors(bm_sample):
    res = fit_gev(bm_sample, "none", priors=PriorSpec(xi=Prior.normal(-0.2, 0.01)), cfg=CFG)
    assert res.priors["xi"] == Prior.normal(-0.2, 0.01)
    assert abs(res.summary["xi"].mean + 0.2) < 0.03


def test_fit_gpd_recovers_parameters():
    x = sample_gpd(GpdParams(0.2, 0.5), np.random.default_rng(3), 2000)
    res = fit_gpd(ExceedanceSample(x, 1.0, 40000), cfg=CFG)
    assert res.summary["xi"].hpd_lo < 0.2 < res.summary["xi"].hpd_hi
    assert res.summary["sigma"].hpd_lo < 0.5 < res.summary["sigma"].hpd_hi
    assert res.summary.extra["n_exceed"] == 2000


def test_fit_is_deterministic(bm_sample):
    assert fit_gev(bm_sample, "location", cfg=CFG).chain == fit_gev(bm_sample, "location", cfg=CFG).chain
