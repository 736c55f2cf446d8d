"""GEV/GPD log-likelihoods with fixed, location and location-scale random effects.

Groups come from ``ExtremesSample.group_ids``. Given the latent effects the
maxima are independent; the marginal likelihood integrates each group's
product of densities against the normal (or bivariate normal) effect law
with adaptive Gauss-Hermite quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .evd import GevParams, GpdParams
from .extract import ExceedanceSample, ExtremesSample

RE_KINDS = ("none", "location", "location-scale")


@dataclass(frozen=True)
class RandomEffectsSpec:
    kind: str = "none"
    group_key: str = "group"

    def __post_init__(self):
        if self.kind not in RE_KINDS:
            raise ValueError(f"random effects kind must be one of {RE_KINDS}, got {self.kind!r}")


@dataclass(frozen=True)
class LocationREParams:
    tau2: float

    def __post_init__(self):
        if not self.tau2 > 0:
            raise ValueError(f"tau2 must be positive, got {self.tau2}")


@dataclass(frozen=True)
class LocScaleREParams:
    theta1: float
    theta2: float
    tau1_2: float
    tau2_2: float
    rho: float

    def __post_init__(self):
        if not (self.tau1_2 > 0 and self.tau2_2 > 0):
            raise ValueError("random-effect variances must be positive")
        if not -1.0 < self.rho < 1.0:
            raise ValueError(f"rho must lie in (-1, 1), got {self.rho}")

    @property
    def mean(self) -> np.ndarray:
        return np.array([self.theta1, self.theta2])

    @property
    def cov(self) -> np.ndarray:
        c = self.rho * math.sqrt(self.tau1_2 * self.tau2_2)
        return np.array([[self.tau1_2, c], [c, self.tau2_2]])


@dataclass(frozen=True)
class LatentEffects:
    """Per-group location shifts and, for location-scale models, scale shifts."""

    delta1: np.ndarray
    delta2: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "delta1", np.asarray(self.delta1, dtype=float))
        if self.delta2 is not None:
            d2 = np.asarray(self.delta2, dtype=float)
            if d2.shape != self.delta1.shape:
                raise ValueError("delta1 and delta2 must have one entry per group")
            object.__setattr__(self, "delta2", d2)


def group_loglik(p: GevParams, sample: ExtremesSample, mu_g, sigma_g) -> np.ndarray:
    """Per-group GEV log-likelihood with group-specific location and scale."""
    return kernels.gev_group_loglik(
        sample.values, sample.group_ids, sample.n_groups, float(p.xi),
        np.ascontiguousarray(mu_g, dtype=float), np.ascontiguousarray(sigma_g, dtype=float),
    )


def gev_loglik_fixed(p: GevParams, sample: ExtremesSample) -> float:
    if len(sample) == 0:
        raise ValueError("empty sample")
    one = np.ones(1)
    return float(kernels.gev_group_loglik(
        sample.values, np.zeros(len(sample), dtype=np.int64), 1, float(p.xi),
        one * p.mu, one * p.sigma,
    )[0])


def gev_loglik_conditional(p: GevParams, re: LatentEffects, spec: RandomEffectsSpec,
                           sample: ExtremesSample) -> float:
    """Log-likelihood given the latent effects; ``-inf`` if any group scale is nonpositive."""
    if re.delta1.shape != (sample.n_groups,):
        raise ValueError(f"need one effect per group ({sample.n_groups}), got {re.delta1.shape}")
    mu_g = p.mu + re.delta1
    if spec.kind == "location-scale":
        if re.delta2 is None:
            raise ValueError("location-scale effects need delta2")
        sigma_g = p.sigma + re.delta2
    else:
        sigma_g = np.full(sample.n_groups, p.sigma)
    return float(group_loglik(p, sample, mu_g, sigma_g).sum())


def gpd_loglik(p: GpdParams, sample: ExceedanceSample) -> float:
    """GPD log-likelihood of the excesses (density evaluated with location 0)."""
    return float(kernels.gpd_loglik(sample.excesses, float(p.xi), float(p.sigma)))


# --------------------------------------------------------------------------
# Marginal likelihood
# --------------------------------------------------------------------------

_SQRT2 = math.sqrt(2.0)


def _logsumexp(a, axis):
    m = np.max(a, axis=axis, keepdims=True)
    m = np.where(np.isfinite(m), m, 0.0)
    with np.errstate(divide="ignore"):
        out = np.log(np.sum(np.exp(a - m), axis=axis)) + np.squeeze(m, axis=axis)
    return out


def _hermite_grid(order, dim):
    x, w = np.polynomial.hermite.hermgauss(order)
    logw = np.log(w) + x * x
    if dim == 1:
        return x[:, None], logw
    xx, yy = np.meshgrid(x, x, indexing="ij")
    lw = (logw[:, None] + logw[None, :]).ravel()
    return np.column_stack([xx.ravel(), yy.ravel()]), lw


def group_marginal_loglik(p: GevParams, sample: ExtremesSample, mean, cov,
                          quad_order: int = 30, max_iter: int = 12, tol: float = 1e-10) -> np.ndarray:
    """Per-group log of the integral of the conditional likelihood over the effects.

    The effects follow ``N(mean, cov)`` (1-D: location only; 2-D: location and
    scale). Nodes start on the effect law itself and are then re-centred and
    re-scaled on the moments of each group's integrand until the estimate is
    stable (iterative adaptive Gauss-Hermite). A group whose weights collapse
    onto one node has its node spread shrunk instead.
    """
    if quad_order < 5:
        raise ValueError("quad_order must be at least 5")
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    dim = mean.size
    G = sample.n_groups
    nodes, logw = _hermite_grid(quad_order, dim)
    prior_chol = np.linalg.cholesky(cov)
    prior_inv = np.linalg.inv(prior_chol)
    prior_logdet = float(np.log(np.diag(prior_chol)).sum())

    center = np.tile(mean, (G, 1))
    chol = np.tile(prior_chol, (G, 1, 1))
    prev = None
    for it in range(max_iter + 1):
        delta = center[:, None, :] + _SQRT2 * np.einsum("gij,kj->gki", chol, nodes)
        dmu = np.ascontiguousarray(delta[..., 0])
        dsig = np.ascontiguousarray(delta[..., 1]) if dim == 2 else np.zeros_like(dmu)
        ll = kernels.gev_grid_loglik(
            sample.values, sample.group_ids, G, float(p.xi), float(p.mu), float(p.sigma), dmu, dsig
        )
        z = np.einsum("ij,gkj->gki", prior_inv, delta - mean)
        log_prior = -0.5 * np.sum(z * z, axis=-1) - prior_logdet - 0.5 * dim * kernels.LOG_2PI
        log_jac = 0.5 * dim * math.log(2.0) + np.log(
            np.abs(np.diagonal(chol, axis1=1, axis2=2))).sum(axis=1)
        terms = logw[None, :] + ll + log_prior + log_jac[:, None]
        log_int = _logsumexp(terms, axis=1)
        with np.errstate(invalid="ignore"):
            done = prev is not None and bool(np.all(
                np.isneginf(log_int) | (np.abs(log_int - prev) < tol)))
        if done or it == max_iter:
            break
        prev = log_int
        for g in range(G):
            if not np.isfinite(log_int[g]):
                continue
            w = np.exp(terms[g] - log_int[g])
            ess = 1.0 / np.sum(w * w)
            if ess < 2.0:
                center[g] = delta[g, np.argmax(w)]
                chol[g] = chol[g] / 4.0
                continue
            m = w @ delta[g]
            d = delta[g] - m
            c = (w[:, None] * d).T @ d
            try:
                chol[g] = np.linalg.cholesky(c)
            except np.linalg.LinAlgError:
                chol[g] = chol[g] / 4.0
            center[g] = m
    return log_int


def gev_loglik_marginal(p: GevParams, hyper, sample: ExtremesSample, quad_order: int | None = None) -> float:
    """Marginal log-likelihood with the random effects integrated out.

    ``hyper`` is :class:`LocationREParams` (1-D quadrature, default 30 nodes)
    or :class:`LocScaleREParams` (tensor-product 2-D quadrature, default 20
    nodes per axis).
    """
    if isinstance(hyper, LocationREParams):
        order = 30 if quad_order is None else quad_order
        lg = group_marginal_loglik(p, sample, [0.0], [[hyper.tau2]], order)
    elif isinstance(hyper, LocScaleREParams):
        order = 20 if quad_order is None else quad_order
        lg = group_marginal_loglik(p, sample, hyper.mean, hyper.cov, order)
    else:
        raise TypeError(f"unsupported hyperparameters {type(hyper).__name__}")
    return float(lg.sum())
