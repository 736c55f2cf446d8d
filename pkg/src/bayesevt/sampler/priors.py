"""Independent per-parameter priors, their JSON form and posterior-to-prior transfer."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import ConfigError, DegeneratePriorError

FAMILIES = {
    "uniform": (kernels.UNIFORM, ("lower", "upper")),
    "normal": (kernels.NORMAL, ("mean", "sd")),
    "gamma": (kernels.GAMMA, ("shape", "scale")),
    "inverse-gamma": (kernels.INV_GAMMA, ("shape", "scale")),
}

FLAT = 10000.0


@dataclass(frozen=True)
class Prior:
    """One prior density.

    ``gamma(shape, scale)`` has density ``x**(shape-1) exp(-x/scale)`` and
    ``inverse-gamma(shape, scale)`` has density ``x**(-shape-1) exp(-scale/x)``,
    both up to normalisation.
    """

    family: str
    a: float
    b: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown prior family {self.family!r}")
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ConfigError(f"{self.family} prior parameters must be finite")
        if self.family == "uniform":
            if not self.a < self.b:
                raise ConfigError(f"uniform prior needs lower < upper, got ({self.a}, {self.b})")
        elif self.family == "normal":
            if not self.b > 0:
                raise ConfigError(f"normal prior needs sd > 0, got {self.b}")
        elif not (self.a > 0 and self.b > 0):
            raise ConfigError(f"{self.family} prior needs shape > 0 and scale > 0")

    @classmethod
    def uniform(cls, lower, upper):
        return cls("uniform", float(lower), float(upper))

    @classmethod
    def normal(cls, mean, sd):
        return cls("normal", float(mean), float(sd))

    @classmethod
    def gamma(cls, shape, scale):
        return cls("gamma", float(shape), float(scale))

    @classmethod
    def inverse_gamma(cls, shape, scale):
        return cls("inverse-gamma", float(shape), float(scale))

    @property
    def code(self) -> int:
        return FAMILIES[self.family][0]

    @property
    def log_norm(self) -> float:
        a, b = self.a, self.b
        if self.family == "uniform":
            return -math.log(b - a)
        if self.family == "normal":
            return -math.log(b) - 0.5 * kernels.LOG_2PI
        if self.family == "gamma":
            return -math.lgamma(a) - a * math.log(b)
        return a * math.log(b) - math.lgamma(a)

    def logpdf(self, x: float) -> float:
        return float(kernels.log_prior_numpy(
            np.array([float(x)]), np.array([self.code]), np.array([self.a]),
            np.array([self.b]), np.array([self.log_norm]),
        ))

    def to_dict(self) -> dict:
        k1, k2 = FAMILIES[self.family][1]
        return {"family": self.family, k1: self.a, k2: self.b}

    @classmethod
    def from_dict(cls, d: dict) -> "Prior":
        fam = d.get("family")
        if fam not in FAMILIES:
            raise ConfigError(f"unknown prior family {fam!r}")
        k1, k2 = FAMILIES[fam][1]
        try:
            return cls(fam, float(d[k1]), float(d[k2]))
        except KeyError as e:
            raise ConfigError(f"{fam} prior is missing {e.args[0]!r}") from None


class PriorSpec(dict):
    """Ordered ``name -> Prior`` mapping.

    Serialises to ``{"xi": {"family": "normal", "mean": .., "sd": ..}, ...}``.
    """

    def arrays(self, names):
        """Encode the priors of ``names`` for :func:`kernels.log_prior`."""
        try:
            priors = [self[n] for n in names]
        except KeyError as e:
            raise ConfigError(f"no prior for parameter {e.args[0]!r}") from None
        return (
            np.array([q.code for q in priors], dtype=np.int64),
            np.array([q.a for q in priors]),
            np.array([q.b for q in priors]),
            np.array([q.log_norm for q in priors]),
        )

    def to_dict(self) -> dict:
        return {name: q.to_dict() for name, q in self.items()}

    @classmethod
    def from_dict(cls, d: dict) -> "PriorSpec":
        return cls((name, Prior.from_dict(v)) for name, v in d.items())

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "PriorSpec":
        return cls.from_dict(json.loads(text))

    def completed(self, defaults: "PriorSpec", names) -> "PriorSpec":
        """Priors for ``names``: own entries first, ``defaults`` for the rest."""
        extra = set(self) - set(names)
        if extra:
            raise ConfigError(f"prior given for unknown parameters: {sorted(extra)}")
        return PriorSpec((n, self[n] if n in self else defaults[n]) for n in names)


def default_priors(family: str = "gev", re: str = "none") -> PriorSpec:
    """Vague priors: flat uniforms for shape and location, near-1/x for scale and variances."""
    flat = Prior.uniform(-FLAT, FLAT)
    if family == "gpd":
        if re != "none":
            raise ConfigError("GPD models have no random effects")
        return PriorSpec(xi=flat, sigma=Prior.gamma(1e-4, FLAT))
    if family != "gev":
        raise ConfigError(f"unknown model family {family!r}")
    spec = PriorSpec(xi=flat, mu=flat, sigma=Prior.gamma(1e-4, FLAT))
    if re == "location":
        spec["tau2"] = Prior.inverse_gamma(1e-4, 1e-4)
    elif re == "location-scale":
        spec["theta1"] = flat
        spec["theta2"] = flat
        spec["tau1_2"] = Prior.inverse_gamma(1e-4, 1e-4)
        spec["tau2_2"] = Prior.inverse_gamma(1e-4, 1e-4)
        spec["rho"] = Prior.uniform(-1.0, 1.0)
    elif re != "none":
        raise ConfigError(f"unknown random effects kind {re!r}")
    return spec


def log_prior(spec: PriorSpec, theta, names=None) -> float:
    """Sum of the log prior densities; ``-inf`` outside any support."""
    names = list(spec) if names is None else list(names)
    theta = np.asarray(theta, dtype=float)
    if theta.size < len(names):
        raise ValueError(f"theta has {theta.size} entries, priors cover {len(names)}")
    return float(kernels.log_prior(theta, *spec.arrays(names)))


_NORMAL_PARAMS = ("xi", "mu", "theta1", "theta2")
_GAMMA_PARAMS = ("sigma",)
_IGAMMA_PARAMS = ("tau2", "tau1_2", "tau2_2")


def posterior_to_prior(chain) -> PriorSpec:
    """Moment-match a chain's draws to informative priors.

    Shape and location parameters become normals with the draws' mean and
    SD, the scale a gamma (``shape = m^2/v``, ``scale = v/m``) and effect
    variances an inverse gamma (``shape = m^2/v + 2``,
    ``scale = m (shape - 1)``). Latent effects and the correlation are not
    transferred.
    """
    spec = PriorSpec()
    for name in chain.names:
        if name not in _NORMAL_PARAMS + _GAMMA_PARAMS + _IGAMMA_PARAMS:
            continue
        x = chain.column(name)
        m, sd = float(x.mean()), float(x.std(ddof=1))
        if not sd > 0 or not math.isfinite(sd):
            raise DegeneratePriorError(f"draws of {name!r} have zero spread")
        v = sd * sd
        if name in _NORMAL_PARAMS:
            spec[name] = Prior.normal(m, sd)
        elif name in _GAMMA_PARAMS:
            spec[name] = Prior.gamma(m * m / v, v / m)
        else:
            shape = m * m / v + 2.0
            spec[name] = Prior.inverse_gamma(shape, m * (shape - 1.0))
    return spec
