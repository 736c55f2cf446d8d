"""Random-walk Metropolis sampler."""
from __future__ import annotations

import io
import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .. import kernels
from ..errors import ConfigError, InfeasibleStartError
from .priors import PriorSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SamplerConfig:
    """Run length and tuning.

    ``n_draws`` counts post-burn-in iterations; every ``thin``-th is kept,
    so the chain holds ``n_draws // thin`` draws (4000 with the defaults).
    Proposal scales adapt during burn-in towards ``target_accept`` and are
    frozen afterwards.
    """

    burn_in: int = 3000
    n_draws: int = 20000
    thin: int = 5
    seed: int = 0
    proposal_sd: Mapping[str, float] | None = None
    adapt: bool = True
    target_accept: float = 0.3
    adapt_batch: int = 50

    def __post_init__(self):
        if self.burn_in < 0:
            raise ConfigError("burn_in must be >= 0")
        if self.thin < 1 or self.n_draws < self.thin:
            raise ConfigError("need n_draws >= thin >= 1")
        if not 0.0 < self.target_accept < 1.0:
            raise ConfigError("target_accept must be in (0, 1)")
        if self.adapt_batch < 1:
            raise ConfigError("adapt_batch must be >= 1")

    @property
    def retained(self) -> int:
        return self.n_draws // self.thin

    def to_dict(self) -> dict:
        d = asdict(self)
        d["proposal_sd"] = None if self.proposal_sd is None else dict(self.proposal_sd)
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "SamplerConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown sampler options: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True)
class Chain:
    """Thinned posterior draws, one row per retained draw."""

    names: tuple[str, ...]
    draws: np.ndarray
    acceptance_rate: np.ndarray
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        draws = np.array(self.draws, dtype=float)
        if draws.ndim != 2 or draws.shape[1] != len(self.names):
            raise ValueError("draws must be (n_retained, n_parameters)")
        if not np.all(np.isfinite(draws)):
            raise ValueError("chain draws must be finite")
        draws.setflags(write=False)
        acc = np.array(self.acceptance_rate, dtype=float)
        acc.setflags(write=False)
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "draws", draws)
        object.__setattr__(self, "acceptance_rate", acc)

    def __len__(self):
        return self.draws.shape[0]

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"chain has no parameter {name!r}") from None

    def column(self, name: str) -> np.ndarray:
        return self.draws[:, self.index(name)]

    def columns(self) -> dict[str, np.ndarray]:
        return {n: self.draws[:, j] for j, n in enumerate(self.names)}

    def posterior_mean(self) -> np.ndarray:
        return self.draws.mean(axis=0)

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return (self.names == other.names and self.seed == other.seed
                and np.array_equal(self.draws, other.draws)
                and np.array_equal(self.acceptance_rate, other.acceptance_rate))

    __hash__ = None

    def to_csv(self, header: Mapping | None = None) -> str:
        """CSV text; a leading ``#`` line carries seed, acceptance and ``header``."""
        info = {"seed": self.seed, "acceptance_rate": self.acceptance_rate.tolist()}
        info.update(self.meta)
        if header:
            info.update(header)
        buf = io.StringIO()
        buf.write("# " + json.dumps(info, sort_keys=True) + "\n")
        buf.write(",".join(self.names) + "\n")
        for row in self.draws:
            buf.write(",".join(format(v, ".17g") for v in row) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "Chain":
        info = {}
        lines = text.splitlines()
        while lines and lines[0].startswith("#"):
            info.update(json.loads(lines.pop(0)[1:]))
        if not lines:
            raise ValueError("chain CSV has no header row")
        names = tuple(lines[0].split(","))
        rows = [[float(v) for v in ln.split(",")] for ln in lines[1:] if ln.strip()]
        draws = np.array(rows, dtype=float).reshape(len(rows), len(names))
        acc = info.pop("acceptance_rate", [np.nan] * len(names))
        seed = info.pop("seed", None)
        return cls(names, draws, acc, seed, info)


def _initial_scales(theta, names, cfg):
    given = dict(cfg.proposal_sd or {})
    unknown = set(given) - set(names)
    if unknown:
        raise ConfigError(f"proposal_sd for unknown parameters: {sorted(unknown)}")
    return np.array([
        float(given[n]) if n in given else max(0.1 * abs(t), 0.05)
        for n, t in zip(names, theta)
    ])


def metropolis_run(
    loglik: Callable[[np.ndarray], float],
    priors: PriorSpec,
    init,
    cfg: SamplerConfig = SamplerConfig(),
    rng: np.random.Generator | None = None,
    *,
    names: Sequence[str] | None = None,
    latent_logdensity: Callable[[np.ndarray], float] | None = None,
    directions: Sequence[np.ndarray] = (),
) -> Chain:
    """Component-wise Gaussian random-walk Metropolis.

    Parameters
    ----------
    loglik
        Log-likelihood of the full coordinate vector.
    priors
        Independent priors; every name in ``priors`` must be a coordinate.
    init
        Starting vector; must have finite posterior density.
    names
        Coordinate names, defaulting to the prior names. Coordinates without
        an entry in ``priors`` (latent effects) get their density from
        ``latent_logdensity``, which sees the whole vector.
    directions
        Extra joint moves ``theta + s * z * v`` along fixed vectors ``v``,
        tried after each sweep; each has its own adaptive step ``s``.

    Returns
    -------
    Chain
        ``cfg.retained`` draws; ``acceptance_rate`` is per coordinate over
        the post-burn-in sweeps.
    """
    names = tuple(priors) if names is None else tuple(names)
    if len(set(names)) != len(names):
        raise ConfigError("duplicate coordinate names")
    missing = set(priors) - set(names)
    if missing:
        raise ConfigError(f"priors for parameters that are not sampled: {sorted(missing)}")
    prior_names = [n for n in names if n in priors]
    if len(prior_names) < len(names) and latent_logdensity is None:
        raise ConfigError("coordinates without priors need latent_logdensity")
    prior_idx = np.array([names.index(n) for n in prior_names], dtype=np.int64)
    codes, pa, pb, pc = priors.arrays(prior_names)
    log_prior_kernel = kernels.log_prior

    def log_target(th):
        lp = log_prior_kernel(th[prior_idx], codes, pa, pb, pc)
        if lp == -np.inf:
            return lp
        if latent_logdensity is not None:
            lp += latent_logdensity(th)
            if lp == -np.inf:
                return lp
        return lp + loglik(th)

    theta = np.array(init, dtype=float)
    d = len(names)
    if theta.shape != (d,):
        raise ConfigError(f"init has shape {theta.shape}, expected ({d},)")
    lp = log_target(theta)
    if not np.isfinite(lp):
        raise InfeasibleStartError(f"log posterior at the starting point is {lp}")

    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    dirs = [np.asarray(v, dtype=float) for v in directions]
    n_moves = d + len(dirs)
    scale = np.concatenate([_initial_scales(theta, names, cfg), np.full(len(dirs), 0.05)])
    batch_acc = np.zeros(n_moves)
    post_acc = np.zeros(n_moves)
    out = np.empty((cfg.retained, d))
    kept = 0
    total = cfg.burn_in + cfg.n_draws

    for it in range(total):
        z = rng.standard_normal(n_moves)
        logu = np.log(rng.random(n_moves))
        for j in range(n_moves):
            prop = theta.copy()
            if j < d:
                prop[j] += scale[j] * z[j]
            else:
                prop += scale[j] * z[j] * dirs[j - d]
            lp_new = log_target(prop)
            # comparison in log space: no overflow, NaN rejects
            if logu[j] < lp_new - lp:
                theta, lp = prop, lp_new
                batch_acc[j] += 1
                if it >= cfg.burn_in:
                    post_acc[j] += 1
        if it < cfg.burn_in:
            if cfg.adapt and (it + 1) % cfg.adapt_batch == 0:
                rate = batch_acc / cfg.adapt_batch
                scale *= np.exp(2.0 * (rate - cfg.target_accept))
                batch_acc[:] = 0.0
        elif (it - cfg.burn_in + 1) % cfg.thin == 0 and kept < cfg.retained:
            out[kept] = theta
            kept += 1

    acc = post_acc[:d] / cfg.n_draws
    logger.debug("metropolis done: acceptance %s", dict(zip(names, np.round(acc, 3))))
    return Chain(names, out, acc, cfg.seed, {"proposal_sd": dict(zip(names, scale[:d].tolist()))})
