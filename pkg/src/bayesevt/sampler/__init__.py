from .mcmc import Chain, SamplerConfig, metropolis_run
from .priors import Prior, PriorSpec, default_priors, log_prior, posterior_to_prior
from .summary import (
    DIC,
    ParamSummary,
    PosteriorSummary,
    Verdict,
    dic,
    dic_verdict,
    hpd_interval,
    preferred,
)

__all__ = [
    "Chain", "SamplerConfig", "metropolis_run",
    "Prior", "PriorSpec", "default_priors", "log_prior", "posterior_to_prior",
    "DIC", "ParamSummary", "PosteriorSummary", "Verdict",
    "dic", "dic_verdict", "hpd_interval", "preferred",
]
