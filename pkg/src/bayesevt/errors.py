class BayesEvtError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(BayesEvtError, ValueError):
    """Invalid block, group, prior or sampler configuration."""


class EmptySampleError(BayesEvtError, ValueError):
    """No extremes left to fit (e.g. no value above the threshold)."""


class DegeneratePriorError(BayesEvtError, ValueError):
    """Posterior draws with zero spread cannot be moment matched."""


class InfeasibleStartError(BayesEvtError, ValueError):
    """The MCMC starting point has zero posterior density."""


class DataFormatError(BayesEvtError, ValueError):
    """Malformed input file."""
