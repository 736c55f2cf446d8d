"""Bayesian GEV/GPD fits: build the posterior for a model, run the sampler, summarise."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ConfigError, InfeasibleStartError
from .evd import GevParams
from .extract import ExceedanceSample, ExtremesSample
from .model import (
    RE_KINDS,
    LocationREParams,
    LocScaleREParams,
    gev_loglik_marginal,
)
from .sampler import (
    Chain,
    ParamSummary,
    PosteriorSummary,
    PriorSpec,
    SamplerConfig,
    default_priors,
    dic,
    metropolis_run,
)

TOP_NAMES = {
    "none": ("xi", "mu", "sigma"),
    "location": ("xi", "mu", "sigma", "tau2"),
    "location-scale": ("xi", "mu", "sigma", "theta1", "theta2", "tau1_2", "tau2_2", "rho"),
}


@dataclass(frozen=True)
class FitResult:
    chain: Chain
    summary: PosteriorSummary
    family: str
    re: str
    priors: PriorSpec

    @property
    def top_names(self) -> tuple[str, ...]:
        return TOP_NAMES[self.re] if self.family == "gev" else ("xi", "sigma")


@dataclass
class GevPosterior:
    """Coordinates, likelihood pieces and joint moves for one GEV model on one sample."""

    sample: ExtremesSample
    re: str = "none"

    def __post_init__(self):
        if self.re not in RE_KINDS:
            raise ConfigError(f"unknown random effects kind {self.re!r}")
        if len(self.sample) == 0:
            raise ConfigError("cannot fit an empty sample")
        G = self.sample.n_groups if self.re != "none" else 1
        self.n_groups = G
        top = TOP_NAMES[self.re]
        self.n_top = len(top)
        if self.re == "none":
            latent = ()
        elif self.re == "location":
            latent = tuple(f"delta[{g}]" for g in range(G))
        else:
            latent = tuple(f"delta1[{g}]" for g in range(G)) + tuple(f"delta2[{g}]" for g in range(G))
        self.names = top + latent
        self._y = self.sample.values
        self._gidx = self.sample.group_ids if self.re != "none" else np.zeros(len(self.sample), np.int64)
        self._ones = np.ones(G)

    # -- pieces handed to the sampler ------------------------------------

    def loglik(self, th) -> float:
        G, k = self.n_groups, self.n_top
        if self.re == "none":
            mu_g = self._ones * th[1]
            sigma_g = self._ones * th[2]
        elif self.re == "location":
            mu_g = th[1] + th[k:k + G]
            sigma_g = self._ones * th[2]
        else:
            mu_g = th[1] + th[k:k + G]
            sigma_g = th[2] + th[k + G:k + 2 * G]
        return float(kernels.gev_group_loglik(self._y, self._gidx, G, th[0], mu_g, sigma_g).sum())

    def latent_logdensity(self, th) -> float:
        G, k = self.n_groups, self.n_top
        if self.re == "location":
            tau2 = th[3]
            d = th[k:k + G]
            return float(-0.5 * (d @ d) / tau2 - 0.5 * G * math.log(2.0 * math.pi * tau2))
        theta1, theta2, v1, v2, rho = th[3:8]
        if not abs(rho) < 1.0:
            return -math.inf
        a = th[k:k + G] - theta1
        b = th[k + G:k + 2 * G] - theta2
        one_r2 = 1.0 - rho * rho
        q = (a @ a / v1 - 2.0 * rho * (a @ b) / math.sqrt(v1 * v2) + b @ b / v2) / one_r2
        return float(-0.5 * q - G * (math.log(2.0 * math.pi) + 0.5 * math.log(v1 * v2 * one_r2)))

    def directions(self):
        """Joint moves that shift a population parameter against all group effects."""
        G, k, d = self.n_groups, self.n_top, len(self.names)
        if self.re == "none":
            return []
        v = np.zeros(d)
        v[1] = 1.0
        v[k:k + G] = -1.0
        if self.re == "location":
            return [v]
        w = np.zeros(d)
        w[2] = 1.0
        w[k + G:k + 2 * G] = -1.0
        return [v, w]

    def marginal_loglik(self, top) -> float:
        """Marginal log-likelihood at the population-level parameters ``top``."""
        p = GevParams(top[0], top[1], top[2])
        if self.re == "none":
            return self.loglik(np.asarray(top, dtype=float))
        if self.re == "location":
            return gev_loglik_marginal(p, LocationREParams(top[3]), self.sample)
        return gev_loglik_marginal(p, LocScaleREParams(*top[3:8]), self.sample)

    # -- starting point ---------------------------------------------------

    def initial_values(self) -> np.ndarray:
        """Moment-based start: xi = 0.1, mu = mean, sigma = sd*sqrt(6)/pi.

        Group effects start at the group-mean deviations. Falls back to
        xi = 0 if that start lies outside the support.
        """
        y = self._y
        mu = float(y.mean())
        sd = float(y.std(ddof=1)) if y.size > 1 else 1.0
        sigma = max(sd, 1e-3) * math.sqrt(6.0) / math.pi
        G = self.n_groups
        if self.re != "none":
            gm = np.array([y[self._gidx == g].mean() for g in range(G)])
            dev = gm - mu
            v = max(float(dev.var()), 0.01 * sigma * sigma)
        for xi in (0.1, 0.0):
            if self.re == "none":
                th = np.array([xi, mu, sigma])
            elif self.re == "location":
                th = np.concatenate([[xi, mu, sigma, v], dev])
            else:
                th = np.concatenate([[xi, mu, sigma, 0.0, 0.0, v, (0.1 * sigma) ** 2, 0.0],
                                     dev, np.zeros(G)])
            if np.isfinite(self.loglik(th)):
                return th
        raise InfeasibleStartError("could not find a feasible starting point")


def _complete_priors(priors, family, re, names):
    defaults = default_priors(family, re)
    if priors is None:
        return defaults
    return PriorSpec(priors).completed(defaults, names)


def fit_gev(sample: ExtremesSample, re: str = "none", priors: PriorSpec | None = None,
            cfg: SamplerConfig = SamplerConfig(), rng: np.random.Generator | None = None,
            init=None, dic_mode: str = "conditional") -> FitResult:
    """Sample the GEV posterior with optional random effects.

    Parameters missing from ``priors`` get the vague defaults. The DIC uses
    the likelihood conditional on the sampled group effects unless
    ``dic_mode="marginal"``, which integrates them out. The reported
    log-likelihood at the posterior mean is always the marginal one.
    """
    if dic_mode not in ("conditional", "marginal"):
        raise ConfigError(f"dic_mode must be 'conditional' or 'marginal', got {dic_mode!r}")
    post = GevPosterior(sample, re)
    top = TOP_NAMES[re]
    spec = _complete_priors(priors, "gev", re, top)
    theta0 = post.initial_values() if init is None else np.asarray(init, dtype=float)
    chain = metropolis_run(
        post.loglik, spec, theta0, cfg, rng,
        names=post.names,
        latent_logdensity=post.latent_logdensity if re != "none" else None,
        directions=post.directions(),
    )
    if dic_mode == "conditional" or re == "none":
        d = dic(chain, post.loglik)
    else:
        d = dic(chain, post.marginal_loglik, columns=top)
    mean_top = chain.posterior_mean()[: len(top)]
    summary = PosteriorSummary(
        {n: ParamSummary.from_draws(chain.column(n)) for n in top},
        dic=d.dic, pd=d.pd, loglik_at_mean=post.marginal_loglik(mean_top),
        extra={
            "dic_mode": dic_mode,
            "n_groups": post.n_groups,
            "acceptance_rate": dict(zip(chain.names[: len(top)], chain.acceptance_rate[: len(top)].tolist())),
        },
    )
    return FitResult(chain, summary, "gev", re, spec)


def fit_gpd(sample: ExceedanceSample, priors: PriorSpec | None = None,
            cfg: SamplerConfig = SamplerConfig(), rng: np.random.Generator | None = None,
            init=None) -> FitResult:
    """Sample the posterior of ``(xi, sigma)`` for the threshold excesses."""
    names = ("xi", "sigma")
    spec = _complete_priors(priors, "gpd", "none", names)
    x = sample.excesses

    def loglik(th):
        return kernels.gpd_loglik(x, th[0], th[1])

    theta0 = (np.array([0.1, 0.9 * float(x.mean())]) if init is None
              else np.asarray(init, dtype=float))
    chain = metropolis_run(loglik, spec, theta0, cfg, rng, names=names)
    d = dic(chain, loglik)
    summary = PosteriorSummary(
        {n: ParamSummary.from_draws(chain.column(n)) for n in names},
        dic=d.dic, pd=d.pd, loglik_at_mean=float(loglik(chain.posterior_mean())),
        extra={"acceptance_rate": dict(zip(names, chain.acceptance_rate.tolist())),
               "u": sample.u, "n_total": sample.n_total, "n_exceed": sample.n_exceed},
    )
    return FitResult(chain, summary, "gpd", "none", spec)
