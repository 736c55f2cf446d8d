import os
import subprocess
import sys

import numpy as np
import pytest
from scipy import stats

from bayesevt import _accel, kernels
from bayesevt.sampler import default_priors


def _group_case(rng, xi):
    G, n = 4, 40
    y = rng.gumbel(2.0, 0.7, n)
    gidx = rng.integers(0, G, n).astype(np.int64)
    return y, gidx, G, xi, rng.normal(2.0, 0.3, G), rng.uniform(0.3, 1.0, G)


@pytest.mark.parametrize("xi", [-0.4, -1e-9, 0.0, 1e-9, 0.2, 0.6])
def test_group_loglik_backends_agree(rng, xi):
    args = _group_case(rng, xi)
    a = kernels.gev_group_loglik_jit(*args)
    b = kernels.gev_group_loglik_numpy(*args)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)
    y, gidx, G, _, mu, sig = args
    ref = np.bincount(gidx, stats.genextreme(-xi, loc=mu[gidx], scale=sig[gidx]).logpdf(y), minlength=G)
    np.testing.assert_allclose(a[np.isfinite(a)], ref[np.isfinite(a)], rtol=1e-9)


def test_group_loglik_out_of_support_is_neg_inf():
    y = np.array([0.0, 5.0])
    g = np.array([0, 1], dtype=np.int64)
    for f in (kernels.gev_group_loglik_jit, kernels.gev_group_loglik_numpy):
        out = f(y, g, 2, -0.5, np.zeros(2), np.ones(2))  # endpoint 2
        assert np.isfinite(out[0]) and out[1] == -np.inf
        out = f(y, g, 2, 0.1, np.zeros(2), np.array([1.0, -1.0]))
        assert out[1] == -np.inf


def test_grid_backends_agree(rng):
    y, gidx, G, xi, _, _ = _group_case(rng, 0.1)
    dmu = rng.normal(0, 0.5, (G, 7))
    dsig = rng.normal(0, 0.1, (G, 7))
    a = kernels.gev_grid_loglik_jit(y, gidx, G, xi, 2.0, 0.7, dmu, dsig)
    b = kernels.gev_grid_loglik_numpy(y, gidx, G, xi, 2.0, 0.7, dmu, dsig)
    np.testing.assert_allclose(a, b, rtol=1e-12)


@pytest.mark.parametrize("xi", [-0.3, 0.0, 0.4])
def test_gpd_backends_agree(rng, xi):
    x = rng.exponential(0.5, 200)
    if xi < 0:
        x = x[x < 0.9 * 0.5 / -xi]
    a = kernels.gpd_loglik_jit(x, xi, 0.5)
    b = kernels.gpd_loglik_numpy(x, xi, 0.5)
    assert a == pytest.approx(b, rel=1e-12)
    assert a == pytest.approx(stats.genpareto(xi, scale=0.5).logpdf(x).sum(), rel=1e-10)
    assert kernels.gpd_loglik_jit(np.array([1.0]), -1.0, 0.5) == -np.inf


def test_log_prior_backends_agree():
    spec = default_priors("gev", "location-scale")
    names = list(spec)
    arrs = spec.arrays(names)
    theta = np.array([0.1, 3.0, 0.5, 0.0, 0.0, 1.0, 0.2, 0.3])
    assert kernels.log_prior_jit(theta, *arrs) == pytest.approx(kernels.log_prior_numpy(theta, *arrs))
    bad = theta.copy()
    bad[-1] = 1.5
    assert kernels.log_prior_jit(bad, *arrs) == -np.inf
    assert kernels.log_prior_numpy(bad, *arrs) == -np.inf


def test_backend_flag_selects_numpy():
    code = "from bayesevt import kernels; print(kernels.BACKEND, kernels.gpd_loglik is kernels.gpd_loglik_numpy)"
    env = dict(os.environ, BAYESEVT_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["numpy", "True"]
    if _accel.NUMBA_AVAILABLE:
        env["BAYESEVT_DISABLE_NUMBA"] = "0"
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        assert out.stdout.split() == ["numba", "False"]


def test_numpy_backend_fit_matches_numba_chain():
    """Same seed, either backend: identical chains up to floating-point summation order."""
    code = (
        "import numpy as np, sys\n"
        "from bayesevt import fit_gev, SamplerConfig, sample_gev, GevParams\n"
        "from bayesevt.simlab import _single_group\n"
        "y = sample_gev(GevParams(0.1, 2, 1), np.random.default_rng(5), 40)\n"
        "r = fit_gev(_single_group(y), cfg=SamplerConfig(burn_in=200, n_draws=500, thin=5, seed=9))\n"
        "np.savetxt(sys.stdout, r.chain.draws, fmt='%.12e')\n"
    )
    outs = []
    for flag in ("0", "1"):
        env = dict(os.environ, BAYESEVT_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        outs.append(np.loadtxt(res.stdout.splitlines()))
    np.testing.assert_allclose(outs[0], outs[1], rtol=1e-8)
