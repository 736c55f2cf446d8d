"""Posterior summaries: HPD intervals, DIC and its verdict."""
from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .mcmc import Chain

logger = logging.getLogger(__name__)


def hpd_interval(draws, level: float = 0.95) -> tuple[float, float]:
    """Shortest interval holding ``ceil(level * n)`` of the sorted draws.

    Ties go to the first (lowest) minimal-width window.
    """
    if not 0.0 < level < 1.0:
        raise ValueError(f"level must be in (0, 1), got {level}")
    x = np.sort(np.asarray(draws, dtype=float).ravel())
    n = x.size
    m = math.ceil(level * n - 1e-9)
    if n < 100 or m > n:
        raise ValueError(f"need at least 100 draws for an HPD interval, got {n}")
    widths = x[m - 1:] - x[: n - m + 1]
    i = int(np.argmin(widths))
    return float(x[i]), float(x[i + m - 1])


@dataclass(frozen=True)
class ParamSummary:
    mean: float
    sd: float
    hpd_lo: float
    hpd_hi: float

    @classmethod
    def from_draws(cls, draws, level: float = 0.95) -> "ParamSummary":
        x = np.asarray(draws, dtype=float)
        lo, hi = hpd_interval(x, level)
        return cls(float(x.mean()), float(x.std(ddof=1)), lo, hi)

    def to_dict(self) -> dict:
        return {"mean": self.mean, "sd": self.sd, "hpd_lo": self.hpd_lo, "hpd_hi": self.hpd_hi}


@dataclass(frozen=True)
class PosteriorSummary:
    params: dict[str, ParamSummary]
    dic: float = math.nan
    pd: float = math.nan
    loglik_at_mean: float = math.nan
    extra: dict = field(default_factory=dict)

    def __getitem__(self, name) -> ParamSummary:
        return self.params[name]

    def to_dict(self) -> dict:
        return {
            "params": {k: v.to_dict() for k, v in self.params.items()},
            "dic": self.dic,
            "pD": self.pd,
            "loglik_at_mean": self.loglik_at_mean,
            **self.extra,
        }


class DIC(NamedTuple):
    dic: float
    pd: float


def dic(chain: Chain, loglik: Callable[[np.ndarray], float],
        columns: Sequence[str] | None = None) -> DIC:
    """Deviance information criterion ``Dbar + pD`` with ``pD = Dbar - D(mean)``.

    ``loglik`` receives the draw restricted to ``columns`` (all columns by
    default). Draws with ``-inf`` log-likelihood are dropped with a warning.
    """
    if len(chain) == 0:
        raise ValueError("empty chain")
    idx = [chain.index(c) for c in columns] if columns is not None else slice(None)
    draws = chain.draws[:, idx]
    dev = np.array([-2.0 * loglik(row) for row in draws])
    ok = np.isfinite(dev)
    if not ok.all():
        logger.warning("DIC: %d of %d draws have zero likelihood and were excluded",
                       int((~ok).sum()), dev.size)
    if not ok.any():
        return DIC(math.inf, math.nan)
    dbar = float(dev[ok].mean())
    d_hat = -2.0 * loglik(draws.mean(axis=0))
    pd = dbar - d_hat
    return DIC(dbar + pd, pd)


class Verdict(str, enum.Enum):
    NO_SERIOUS_DIFFERENCE = "no-serious-difference"
    PREFER_SMALLER = "prefer-smaller"
    STRONGLY_PREFER_SMALLER = "strongly-prefer-smaller"


def dic_verdict(dic_a: float, dic_b: float) -> Verdict:
    """Classify a DIC gap: below 5 no real difference, 5 to 10 mild, above 10 strong."""
    gap = abs(dic_a - dic_b)
    if gap < 5.0:
        return Verdict.NO_SERIOUS_DIFFERENCE
    if gap <= 10.0:
        return Verdict.PREFER_SMALLER
    return Verdict.STRONGLY_PREFER_SMALLER


def preferred(dic_a: float, dic_b: float) -> str:
    """``"a"`` or ``"b"``, whichever DIC is smaller (``"a"`` on ties)."""
    return "a" if dic_a <= dic_b else "b"
