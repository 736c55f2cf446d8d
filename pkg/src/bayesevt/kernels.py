"""Hot log-density kernels.

Each kernel exists twice: an explicit loop compiled by numba (``*_jit``) and a
vectorised numpy twin (``*_numpy``). The public names bind to one of them at
import time according to ``_accel.USE_NUMBA``. Both paths must agree to
floating point round-off; ``tests/test_kernels.py`` checks that.

Conventions shared by all kernels:

* a point outside the support contributes ``-inf``;
* ``|xi| < XI_EPS`` switches to the xi = 0 limit;
* a nonpositive scale makes the whole (group) term ``-inf``.
"""
import math

import numpy as np

from . import _accel

XI_EPS = 1e-8
LOG_2PI = math.log(2.0 * math.pi)

UNIFORM, NORMAL, GAMMA, INV_GAMMA = 0, 1, 2, 3


# --------------------------------------------------------------------------
# GEV log-likelihood, summed per group
# --------------------------------------------------------------------------

def _gev_group_loglik_loop(y, gidx, n_groups, xi, mu_g, sigma_g):
    out = np.zeros(n_groups)
    for g in range(n_groups):
        if not sigma_g[g] > 0.0:
            out[g] = -np.inf
    gumbel = abs(xi) < XI_EPS
    for i in range(y.shape[0]):
        g = gidx[i]
        s = sigma_g[g]
        if not s > 0.0:
            continue
        z = (y[i] - mu_g[g]) / s
        if gumbel:
            lp = -math.log(s) - z - math.exp(-z)
        else:
            t = xi * z
            if t <= -1.0:
                out[g] = -np.inf
                continue
            lt = math.log1p(t)
            lp = -math.log(s) - (1.0 + 1.0 / xi) * lt - math.exp(-lt / xi)
        out[g] += lp
    return out


def _gev_logpdf_numpy(y, xi, mu, sigma):
    """Elementwise GEV log-density; ``mu``/``sigma`` broadcast against ``y``."""
    y, mu, sigma = np.broadcast_arrays(
        np.asarray(y, dtype=float), np.asarray(mu, dtype=float), np.asarray(sigma, dtype=float)
    )
    out = np.full(y.shape, -np.inf)
    ok = sigma > 0.0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        z = (y - mu) / np.where(ok, sigma, 1.0)
        logs = np.log(np.where(ok, sigma, 1.0))
        if abs(xi) < XI_EPS:
            val = -logs - z - np.exp(-z)
        else:
            t = xi * z
            ok &= t > -1.0
            lt = np.log1p(np.where(ok, t, 0.0))
            val = -logs - (1.0 + 1.0 / xi) * lt - np.exp(-lt / xi)
    out[ok] = val[ok]
    return out


def _gev_group_loglik_numpy(y, gidx, n_groups, xi, mu_g, sigma_g):
    lp = _gev_logpdf_numpy(y, xi, mu_g[gidx], sigma_g[gidx])
    out = np.bincount(gidx, weights=np.where(np.isfinite(lp), lp, 0.0), minlength=n_groups)
    bad = np.bincount(gidx, weights=~np.isfinite(lp), minlength=n_groups) > 0
    out[bad] = -np.inf
    out[~(sigma_g > 0.0)] = -np.inf
    return out


# --------------------------------------------------------------------------
# GEV log-likelihood on a quadrature grid of per-group (location, scale) shifts
# --------------------------------------------------------------------------

def _gev_grid_loglik_loop(y, gidx, n_groups, xi, mu, sigma, dmu, dsig):
    n_nodes = dmu.shape[1]
    out = np.zeros((n_groups, n_nodes))
    gumbel = abs(xi) < XI_EPS
    for g in range(n_groups):
        for k in range(n_nodes):
            if not sigma + dsig[g, k] > 0.0:
                out[g, k] = -np.inf
    for i in range(y.shape[0]):
        g = gidx[i]
        for k in range(n_nodes):
            s = sigma + dsig[g, k]
            if not s > 0.0:
                continue
            z = (y[i] - mu - dmu[g, k]) / s
            if gumbel:
                lp = -math.log(s) - z - math.exp(-z)
            else:
                t = xi * z
                if t <= -1.0:
                    out[g, k] = -np.inf
                    continue
                lt = math.log1p(t)
                lp = -math.log(s) - (1.0 + 1.0 / xi) * lt - math.exp(-lt / xi)
            out[g, k] += lp
    return out


def _gev_grid_loglik_numpy(y, gidx, n_groups, xi, mu, sigma, dmu, dsig):
    lp = _gev_logpdf_numpy(y[:, None], xi, mu + dmu[gidx], sigma + dsig[gidx])
    finite = np.isfinite(lp)
    out = np.zeros(dmu.shape)
    np.add.at(out, gidx, np.where(finite, lp, 0.0))
    bad = np.zeros(dmu.shape, dtype=bool)
    np.logical_or.at(bad, gidx, ~finite)
    out[bad] = -np.inf
    out[~(sigma + dsig > 0.0)] = -np.inf
    return out


# --------------------------------------------------------------------------
# GPD log-likelihood of threshold excesses (location pinned at 0)
# --------------------------------------------------------------------------

def _gpd_loglik_loop(x, xi, sigma):
    if not sigma > 0.0:
        return -np.inf
    total = 0.0
    logs = math.log(sigma)
    gumbel = abs(xi) < XI_EPS
    for i in range(x.shape[0]):
        z = x[i] / sigma
        if z < 0.0:
            return -np.inf
        if gumbel:
            total += -logs - z
        else:
            t = xi * z
            if t <= -1.0:
                return -np.inf
            total += -logs - (1.0 + 1.0 / xi) * math.log1p(t)
    return total


def _gpd_loglik_numpy(x, xi, sigma):
    if not sigma > 0.0:
        return -np.inf
    z = x / sigma
    if np.any(z < 0.0):
        return -np.inf
    if abs(xi) < XI_EPS:
        return float(-x.size * math.log(sigma) - z.sum())
    t = xi * z
    if np.any(t <= -1.0):
        return -np.inf
    return float(-x.size * math.log(sigma) - (1.0 + 1.0 / xi) * np.log1p(t).sum())


# --------------------------------------------------------------------------
# Independent priors, encoded as (family code, a, b, log-normaliser)
# --------------------------------------------------------------------------

def _log_prior_loop(theta, codes, a, b, c):
    total = 0.0
    for j in range(codes.shape[0]):
        x = theta[j]
        code = codes[j]
        if code == UNIFORM:
            if x < a[j] or x > b[j]:
                return -np.inf
            total += c[j]
        elif code == NORMAL:
            z = (x - a[j]) / b[j]
            total += c[j] - 0.5 * z * z
        elif code == GAMMA:
            if not x > 0.0:
                return -np.inf
            total += c[j] + (a[j] - 1.0) * math.log(x) - x / b[j]
        else:
            if not x > 0.0:
                return -np.inf
            total += c[j] - (a[j] + 1.0) * math.log(x) - b[j] / x
    return total


def _log_prior_numpy(theta, codes, a, b, c):
    theta = theta[: codes.shape[0]]
    uni = codes == UNIFORM
    pos = (codes == GAMMA) | (codes == INV_GAMMA)
    if np.any(uni & ((theta < a) | (theta > b))) or np.any(pos & ~(theta > 0.0)):
        return -np.inf
    safe = np.where(pos, theta, 1.0)
    with np.errstate(divide="ignore"):
        logx = np.log(safe)
    z = (theta - a) / np.where(codes == NORMAL, b, 1.0)
    terms = np.select(
        [uni, codes == NORMAL, codes == GAMMA],
        [c, c - 0.5 * z * z, c + (a - 1.0) * logx - safe / b],
        default=c - (a + 1.0) * logx - b / safe,
    )
    return float(terms.sum())


gev_group_loglik_jit = _accel.njit(_gev_group_loglik_loop)
gev_grid_loglik_jit = _accel.njit(_gev_grid_loglik_loop)
gpd_loglik_jit = _accel.njit(_gpd_loglik_loop)
log_prior_jit = _accel.njit(_log_prior_loop)

gev_group_loglik_numpy = _gev_group_loglik_numpy
gev_grid_loglik_numpy = _gev_grid_loglik_numpy
gpd_loglik_numpy = _gpd_loglik_numpy
log_prior_numpy = _log_prior_numpy

if _accel.USE_NUMBA:
    gev_group_loglik = gev_group_loglik_jit
    gev_grid_loglik = gev_grid_loglik_jit
    gpd_loglik = gpd_loglik_jit
    log_prior = log_prior_jit
else:
    gev_group_loglik = gev_group_loglik_numpy
    gev_grid_loglik = gev_grid_loglik_numpy
    gpd_loglik = gpd_loglik_numpy
    log_prior = log_prior_numpy

BACKEND = "numba" if _accel.USE_NUMBA else "numpy"
