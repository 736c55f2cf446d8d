"""GEV and GPD distribution kernels.

All functions accept scalar or array ``y``/``q`` and return the same shape
(a Python float for scalar input). Shape values with ``|xi| < XI_EPS`` use the
xi = 0 (Gumbel / exponential) formulas.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import XI_EPS, _gev_logpdf_numpy

EULER_GAMMA = float(np.euler_gamma)


@dataclass(frozen=True)
class GevParams:
    """Shape ``xi``, location ``mu`` and scale ``sigma`` of a GEV law."""

    xi: float
    mu: float
    sigma: float

    def __post_init__(self):
        if not (math.isfinite(self.xi) and math.isfinite(self.mu)):
            raise ValueError(f"GEV xi and mu must be finite, got xi={self.xi}, mu={self.mu}")
        if not self.sigma > 0 or not math.isfinite(self.sigma):
            raise ValueError(f"GEV scale must be positive and finite, got {self.sigma}")

    @property
    def endpoint(self) -> float:
        """Finite support bound ``mu - sigma/xi`` (lower if xi > 0, upper if xi < 0)."""
        if abs(self.xi) < XI_EPS:
            return math.nan
        return self.mu - self.sigma / self.xi


@dataclass(frozen=True)
class GpdParams:
    """Shape ``xi`` and scale ``sigma`` of a GPD with location pinned at ``u``."""

    xi: float
    sigma: float
    u: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.xi) and math.isfinite(self.u)):
            raise ValueError(f"GPD xi and u must be finite, got xi={self.xi}, u={self.u}")
        if not self.sigma > 0 or not math.isfinite(self.sigma):
            raise ValueError(f"GPD scale must be positive and finite, got {self.sigma}")


def _out(arr, scalar):
    return float(arr) if scalar else arr


def _check_prob(q):
    q = np.asarray(q, dtype=float)
    if np.any(~((q > 0.0) & (q < 1.0))):
        raise ValueError("probabilities must lie strictly inside (0, 1)")
    return q


# --------------------------------------------------------------------------- GEV

def gev_cdf(p: GevParams, y):
    scalar = np.ndim(y) == 0
    z = (np.asarray(y, dtype=float) - p.mu) / p.sigma
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if abs(p.xi) < XI_EPS:
            out = np.exp(-np.exp(-z))
        else:
            t = p.xi * z
            inside = t > -1.0
            lt = np.log1p(np.where(inside, t, 0.0))
            out = np.where(inside, np.exp(-np.exp(-lt / p.xi)), 0.0 if p.xi > 0 else 1.0)
    return _out(out, scalar)


def gev_logpdf(p: GevParams, y):
    """Log-density; ``-inf`` outside the support."""
    scalar = np.ndim(y) == 0
    return _out(_gev_logpdf_numpy(y, p.xi, p.mu, p.sigma), scalar)


def gev_quantile(p: GevParams, q):
    scalar = np.ndim(q) == 0
    q = _check_prob(q)
    w = np.log(-np.log(q))
    if abs(p.xi) < XI_EPS:
        out = p.mu - p.sigma * w
    else:
        out = p.mu + p.sigma * np.expm1(-p.xi * w) / p.xi
    return _out(out, scalar)


def gev_mean(p: GevParams) -> float:
    """Mean of the GEV law, ``math.inf`` when ``xi >= 1``."""
    if p.xi >= 1.0:
        return math.inf
    if abs(p.xi) < XI_EPS:
        return p.mu + p.sigma * EULER_GAMMA
    return p.mu + p.sigma * (math.gamma(1.0 - p.xi) - 1.0) / p.xi


def sample_gev(p: GevParams, rng: np.random.Generator, n: int) -> np.ndarray:
    """Draw ``n`` values by pushing uniforms through :func:`gev_quantile`."""
    return gev_quantile(p, _open_uniform(rng, n))


# --------------------------------------------------------------------------- GPD

def gpd_cdf(p: GpdParams, y):
    scalar = np.ndim(y) == 0
    z = (np.asarray(y, dtype=float) - p.u) / p.sigma
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        if abs(p.xi) < XI_EPS:
            out = -np.expm1(-z)
        else:
            t = p.xi * z
            inside = t > -1.0
            lt = np.log1p(np.where(inside, t, 0.0))
            out = np.where(inside, -np.expm1(-lt / p.xi), 1.0)
        out = np.where(z <= 0.0, 0.0, out)
    return _out(out, scalar)


def gpd_logpdf(p: GpdParams, y):
    scalar = np.ndim(y) == 0
    z = np.atleast_1d((np.asarray(y, dtype=float) - p.u) / p.sigma)
    out = np.full(z.shape, -np.inf)
    ok = z >= 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        if abs(p.xi) < XI_EPS:
            val = -math.log(p.sigma) - z
        else:
            t = p.xi * z
            ok &= t > -1.0
            val = -math.log(p.sigma) - (1.0 + 1.0 / p.xi) * np.log1p(np.where(ok, t, 0.0))
    out[ok] = val[ok]
    return _out(out[0] if scalar else out.reshape(np.shape(y)), scalar)


def gpd_quantile(p: GpdParams, q):
    scalar = np.ndim(q) == 0
    q = _check_prob(q)
    w = np.log1p(-q)
    if abs(p.xi) < XI_EPS:
        out = p.u - p.sigma * w
    else:
        out = p.u + p.sigma * np.expm1(-p.xi * w) / p.xi
    return _out(out, scalar)


def gpd_mean(p: GpdParams) -> float:
    if p.xi >= 1.0:
        return math.inf
    return p.u + p.sigma / (1.0 - p.xi)


def sample_gpd(p: GpdParams, rng: np.random.Generator, n: int) -> np.ndarray:
    return gpd_quantile(p, _open_uniform(rng, n))


def _open_uniform(rng, n):
    if n < 1:
        raise ValueError("n must be at least 1")
    u = np.asarray(rng.random(n), dtype=float)
    # Generator.random is on [0, 1); an exact 0 would map to the support edge.
    return np.where(u > 0.0, u, np.nextafter(0.0, 1.0))
