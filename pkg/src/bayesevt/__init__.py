"""Bayesian extreme-value analysis.

GEV block-maxima and GPD threshold models fitted by random-walk Metropolis,
optional random effects on the GEV location (and scale), informative prior
transfer between data sets, and posterior return levels, VaR and ES.

Set ``BAYESEVT_DISABLE_NUMBA=1`` before import to run the pure-numpy kernels.
"""
from importlib import resources as _resources

from .errors import (
    BayesEvtError,
    ConfigError,
    DataFormatError,
    DegeneratePriorError,
    EmptySampleError,
    InfeasibleStartError,
)
from .evd import (
    GevParams,
    GpdParams,
    gev_cdf,
    gev_logpdf,
    gev_mean,
    gev_quantile,
    gpd_cdf,
    gpd_logpdf,
    gpd_mean,
    gpd_quantile,
    sample_gev,
    sample_gpd,
)
from .extract import (
    ExceedanceSample,
    ExtremesSample,
    TimeSeries,
    block_maxima,
    bootstrap_return_level_ci,
    empirical_return_level,
    empirical_return_level_by_group,
    empirical_var_es,
    exceedances,
)
from .fit import FitResult, fit_gev, fit_gpd
from .ingest import ingest_csv
from .kernels import BACKEND
from .model import (
    LatentEffects,
    LocationREParams,
    LocScaleREParams,
    RandomEffectsSpec,
    gev_loglik_conditional,
    gev_loglik_fixed,
    gev_loglik_marginal,
    gpd_loglik,
)
from .risk import es_pot, posterior_transform, return_level, var_pot
from .sampler import (
    Chain,
    ParamSummary,
    PosteriorSummary,
    Prior,
    PriorSpec,
    SamplerConfig,
    Verdict,
    default_priors,
    dic,
    dic_verdict,
    hpd_interval,
    metropolis_run,
    posterior_to_prior,
)

__version__ = "0.1.0"


def data_path(name: str) -> str:
    """Filesystem path of a bundled data file (``scenario_daily.csv``, ``scenario_bm.json``)."""
    return str(_resources.files(__name__).joinpath("data", name))


__all__ = [n for n in dir() if not n.startswith("_")]
