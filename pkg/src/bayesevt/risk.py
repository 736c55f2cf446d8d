"""Return levels, Value-at-Risk and Expected Shortfall, point-wise and per posterior draw."""
from __future__ import annotations

import logging
import math
import warnings
from typing import Callable, Mapping

import numpy as np

from .evd import GevParams, GpdParams
from .kernels import XI_EPS
from .sampler import Chain, ParamSummary

logger = logging.getLogger(__name__)


class NonFiniteTransformError(ValueError):
    pass


def return_level(p: GevParams, k: float) -> float:
    """Level exceeded on average once every ``k`` blocks."""
    if not k >= 2:
        raise ValueError(f"return period must be >= 2, got {k}")
    y = -math.log1p(-1.0 / k)
    if abs(p.xi) < XI_EPS:
        return p.mu - p.sigma * math.log(y)
    # 1 - y**(-xi), written to avoid cancellation for small xi
    return p.mu - (p.sigma / p.xi) * -math.expm1(-p.xi * math.log(y))


def var_pot(p: GpdParams, n_total: int, n_exceed: int, tail: float) -> float:
    """VaR at tail probability ``tail`` from a GPD fitted above ``p.u``."""
    if n_exceed < 1:
        raise ValueError("no exceedances: VaR is undefined")
    if not 0.0 < tail < 1.0:
        raise ValueError(f"tail probability must be in (0, 1), got {tail}")
    r = n_total / n_exceed * tail
    if r > 1.0:
        warnings.warn(
            f"(n/N_u)*p = {r:.3g} > 1: VaR lies below the threshold (extrapolation)",
            RuntimeWarning, stacklevel=2,
        )
    if abs(p.xi) < XI_EPS:
        return p.u - p.sigma * math.log(r)
    return p.u + (p.sigma / p.xi) * math.expm1(-p.xi * math.log(r))


def es_pot(var: float, p: GpdParams) -> float:
    """Expected Shortfall beyond ``var``; ``math.inf`` when ``xi >= 1``."""
    if p.xi >= 1.0:
        return math.inf
    return (var + p.sigma - p.xi * p.u) / (1.0 - p.xi)


# --------------------------------------------------------------------------
# per-draw maps
# --------------------------------------------------------------------------

Draw = Mapping[str, float]


def return_level_map(k: float) -> Callable[[Draw], float]:
    def f(d):
        return return_level(GevParams(d["xi"], d["mu"], d["sigma"]), k)
    return f


def var_map(u: float, n_total: int, n_exceed: int, tail: float) -> Callable[[Draw], float]:
    def f(d):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            return var_pot(GpdParams(d["xi"], d["sigma"], u), n_total, n_exceed, tail)
    return f


def es_map(u: float, n_total: int, n_exceed: int, tail: float) -> Callable[[Draw], float]:
    var = var_map(u, n_total, n_exceed, tail)

    def f(d):
        return es_pot(var(d), GpdParams(d["xi"], d["sigma"], u))
    return f


def transform_draws(chain: Chain, fn: Callable[[Draw], float]) -> np.ndarray:
    names = chain.names
    with np.errstate(all="ignore"):
        out = []
        for row in chain.draws:
            try:
                out.append(float(fn(dict(zip(names, row)))))
            except (OverflowError, ValueError):
                out.append(math.nan)
    return np.array(out)


def posterior_transform(chain: Chain, fn: Callable[[Draw], float], level: float = 0.95,
                        max_nonfinite: float = 0.01) -> ParamSummary:
    """Summarise ``fn`` applied to every retained draw (mean, SD, HPD).

    Non-finite values are dropped; more than ``max_nonfinite`` of them is an
    error.
    """
    vals = transform_draws(chain, fn)
    ok = np.isfinite(vals)
    bad = int((~ok).sum())
    if bad > max_nonfinite * vals.size:
        raise NonFiniteTransformError(
            f"derived quantity is not finite on {bad} of {vals.size} draws")
    if bad:
        logger.warning("dropped %d non-finite derived values", bad)
    return ParamSummary.from_draws(vals[ok], level)


def plug_in(chain: Chain, fn: Callable[[Draw], float]) -> float:
    """``fn`` evaluated at the posterior mean."""
    return float(fn(dict(zip(chain.names, chain.posterior_mean()))))
