"""Scripted simulation studies: heterogeneous block maxima, prior transfer, POT.

Every replication draws its data and MCMC seeds from
``SeedSequence([scenario.seed, replication, purpose...])``, so reports are
reproducible byte for byte and replications may run in worker processes.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BayesEvtError, EmptySampleError
from .evd import GevParams, sample_gev
from .extract import (
    ExtremesSample,
    TimeSeries,
    block_maxima,
    empirical_return_level,
    empirical_return_level_by_group,
    empirical_var_es,
    exceedances,
)
from .fit import FitResult, fit_gev, fit_gpd
from .risk import (
    NonFiniteTransformError,
    es_map,
    plug_in,
    posterior_transform,
    return_level,
    return_level_map,
    var_map,
)
from .sampler import SamplerConfig, posterior_to_prior

logger = logging.getLogger(__name__)

DESK_CONFIG = SamplerConfig(burn_in=3000, n_draws=5000, thin=5)
FULL_CONFIG = SamplerConfig(burn_in=3000, n_draws=20000, thin=5)

_Z975 = 1.959963984540054


@dataclass(frozen=True)
class ScenarioBM:
    """Daily normal returns whose mean shifts by ``N(0, tau^2)`` per period."""

    periods: int = 10
    years_per_period: int = 5
    obs_per_year: int = 3600
    base_mean: float = 0.02
    base_sd: float = 1.24
    tau: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if min(self.periods, self.years_per_period, self.obs_per_year) < 1:
            raise ValueError("period, year and observation counts must be >= 1")
        if not self.base_sd > 0 or self.tau < 0:
            raise ValueError("need base_sd > 0 and tau >= 0")


@dataclass(frozen=True)
class ScenarioGEVDirect:
    n: int = 58
    xi: float = 0.18
    mu: float = 2.41
    sigma: float = 1.01
    split: tuple[int, int] = (43, 15)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "split", tuple(int(v) for v in self.split))
        if sum(self.split) != self.n or min(self.split) < 0:
            raise ValueError(f"split {self.split} must be nonnegative and sum to n={self.n}")

    @property
    def params(self) -> GevParams:
        return GevParams(self.xi, self.mu, self.sigma)


@dataclass(frozen=True)
class ScenarioPOT:
    years: int = 65
    obs_per_year: int = 365
    mean: float = 2.0
    sd: float = 1.0
    u: float = 4.0
    split: tuple[int, int] = (60, 5)
    short_years: int = 1
    replications: int = 25
    p: float = 0.05
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "split", tuple(int(v) for v in self.split))
        if sum(self.split) != self.years or min(self.split) < 1:
            raise ValueError(f"split {self.split} must be positive and sum to years={self.years}")
        if not 1 <= self.short_years <= self.split[1]:
            raise ValueError("short_years must be between 1 and the second split")


@dataclass
class ReplicationReport:
    """Per-replication results, aggregated tables and the resolved configuration."""

    study: str
    config: dict
    replicates: list[dict]
    tables: dict[str, list[dict]] = field(default_factory=dict)
    summary: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"study": self.study, "config": self.config, "summary": self.summary,
                "tables": self.tables, "replicates": self.replicates}

    def to_json(self) -> str:
        return json.dumps(_clean(self.to_dict()), sort_keys=True, indent=1)

    def table_csv(self, name: str) -> str:
        rows = self.tables[name]
        buf = io.StringIO()
        buf.write("# " + json.dumps(_clean(self.config), sort_keys=True) + "\n")
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: _fmt(v) for k, v in r.items()})
        return buf.getvalue()

    def write(self, out_dir) -> list[str]:
        os.makedirs(out_dir, exist_ok=True)
        paths = [os.path.join(out_dir, "report.json")]
        with open(paths[0], "w") as fh:
            fh.write(self.to_json())
        for name in sorted(self.tables):
            path = os.path.join(out_dir, f"{name}.csv")
            with open(path, "w") as fh:
                fh.write(self.table_csv(name))
            paths.append(path)
        return paths


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".10g")
    return v


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings, tuples lists."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


# --------------------------------------------------------------------------
# seeding helpers
# --------------------------------------------------------------------------

def _seed(*keys) -> int:
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


def _rng(*keys) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(k) for k in keys]))


_PURPOSE = {"data": 0, "none": 1, "location": 2, "location-scale": 3, "gpd": 4}


def _fit_with_retry(fit_fn, cfg, keys):
    """Run ``fit_fn(cfg)`` with a derived seed; retry once with a fresh sub-seed."""
    last = None
    for attempt in range(2):
        c = dataclasses.replace(cfg, seed=_seed(*keys, attempt))
        try:
            return fit_fn(c), None
        except (BayesEvtError, FloatingPointError, np.linalg.LinAlgError) as e:
            last = e
            logger.warning("fit %s failed on attempt %d: %s", keys, attempt, e)
    return None, f"{type(last).__name__}: {last}"


def _summarise_fit(res: FitResult, k=None) -> dict:
    out = {
        "params": {n: ps.to_dict() for n, ps in res.summary.params.items()},
        "dic": res.summary.dic,
        "pD": res.summary.pd,
        "ll": res.summary.loglik_at_mean,
        "status": "ok",
    }
    if k is not None:
        out["rk"] = posterior_transform(res.chain, return_level_map(k)).to_dict()
        out["rk_plugin"] = plug_in(res.chain, return_level_map(k))
    return out


def _agg(values) -> dict:
    x = np.asarray([v for v in values if v is not None and np.isfinite(v)], dtype=float)
    n = x.size
    if n == 0:
        return {"n": 0, "mean": math.nan, "sd": math.nan, "lb": math.nan, "ub": math.nan}
    m = float(x.mean())
    sd = float(x.std(ddof=1)) if n > 1 else 0.0
    half = _Z975 * sd / math.sqrt(n)
    return {"n": n, "mean": m, "sd": sd, "lb": m - half, "ub": m + half}


def _map(fn, args, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, args))
    return [fn(a) for a in args]


# --------------------------------------------------------------------------
# block maxima with heterogeneous periods
# --------------------------------------------------------------------------

def generate_bm(s: ScenarioBM, rng: np.random.Generator) -> tuple[TimeSeries, ExtremesSample]:
    """Daily series with period labels and its yearly maxima grouped by period.

    Period ``i`` draws ``e_i ~ N(0, tau^2)`` and then
    ``x ~ N(base_mean + e_i, base_sd^2)`` for every observation.
    """
    n_per = s.years_per_period * s.obs_per_year
    e = rng.normal(0.0, s.tau, size=s.periods) if s.tau > 0 else np.zeros(s.periods)
    x = np.concatenate([rng.normal(s.base_mean + e[i], s.base_sd, size=n_per) for i in range(s.periods)])
    labels = np.repeat(np.array([str(i) for i in range(s.periods)]), n_per)
    times = np.tile(np.arange(n_per, dtype=np.int64), s.periods)
    series = TimeSeries(times, x, "simulated", labels)
    sample = block_maxima(series, block=s.obs_per_year, group="label")
    return series, sample


def _bm_empirical(sample: ExtremesSample, k) -> dict:
    per = empirical_return_level_by_group(sample, k)
    return {
        "period_mean": float(per.mean()),
        "pooled": empirical_return_level(sample, k),
        "per_period": per.tolist(),
        "mean_of_maxima": float(sample.values.mean()),
    }


def _bm_replicate(args):
    s, models, cfg, k, r = args
    _, sample = generate_bm(s, _rng(s.seed, r, _PURPOSE["data"]))
    out = {"replication": r, "tau": s.tau, "empirical": _bm_empirical(sample, k), "fits": {}}
    for m in models:
        res, err = _fit_with_retry(lambda c: fit_gev(sample, m, cfg=c), cfg, (s.seed, r, _PURPOSE[m]))
        out["fits"][m] = _summarise_fit(res, k) if res is not None else {"status": "failed", "error": err}
    return out


def _bm_tables(replicates, models, k):
    rows = []
    for m in models:
        ok = [rep["fits"][m] for rep in replicates if rep["fits"][m]["status"] == "ok"]
        if not ok:
            continue
        names = list(ok[0]["params"])
        for n in names:
            rows.append({"model": m, "parameter": n, **_agg([f["params"][n]["mean"] for f in ok])})
        rows.append({"model": m, "parameter": f"R^{k}", **_agg([f["rk"]["mean"] for f in ok])})
        rows.append({"model": m, "parameter": "ll", **_agg([f["ll"] for f in ok])})
        rows.append({"model": m, "parameter": "DIC", **_agg([f["dic"] for f in ok])})
    periods = len(replicates[0]["empirical"]["per_period"]) if replicates else 0
    per_period = [
        {"period": i + 1, **_agg([rep["empirical"]["per_period"][i] for rep in replicates])}
        for i in range(periods)
    ]
    empirical = [
        {"statistic": key, **_agg([rep["empirical"][key] for rep in replicates])}
        for key in ("period_mean", "pooled", "mean_of_maxima")
    ]
    return {"estimates": rows, "empirical_by_period": per_period, "empirical": empirical}


def run_bm_study(s: ScenarioBM, models=("none", "location"), replications: int = 5,
                 cfg: SamplerConfig = DESK_CONFIG, k: float = 10, workers: int = 1) -> ReplicationReport:
    """Replicate generate-and-fit for each random-effects model.

    The empirical benchmark ``period_mean`` is the within-period empirical
    return level averaged over periods; the pooled quantile of all maxima
    is reported alongside it.
    """
    if replications < 1:
        raise ValueError("need at least one replication")
    models = tuple(models)
    reps = _map(_bm_replicate, [(s, models, cfg, k, r) for r in range(replications)], workers)
    tables = _bm_tables(reps, models, k)
    summary = {}
    ok = [rep for rep in reps if all(rep["fits"][m]["status"] == "ok" for m in models)]
    if "none" in models and "location" in models and ok:
        summary["dic_gap_mean"] = float(np.mean(
            [rep["fits"]["none"]["dic"] - rep["fits"]["location"]["dic"] for rep in ok]))
        emp = [rep["empirical"]["period_mean"] for rep in ok]
        summary["abs_err_rk"] = {
            m: float(np.mean([abs(rep["fits"][m]["rk"]["mean"] - e) for rep, e in zip(ok, emp)]))
            for m in ("none", "location")
        }
        summary["tau2_hpd_lo_positive"] = int(sum(
            rep["fits"]["location"]["params"]["tau2"]["hpd_lo"] > 0 for rep in ok))
    summary["failed_fits"] = sum(
        rep["fits"][m]["status"] != "ok" for rep in reps for m in models)
    config = {"study": "bm", "scenario": dataclasses.asdict(s), "models": list(models),
              "replications": replications, "sampler": cfg.to_dict(), "k": k}
    return ReplicationReport("bm", config, reps, tables, summary)


def run_tau_sweep(s: ScenarioBM, taus=(0, 1, 2, 3, 4), models=("none", "location"),
                  replications: int = 5, cfg: SamplerConfig = DESK_CONFIG, k: float = 10,
                  workers: int = 1) -> ReplicationReport:
    """Empirical vs estimated return level across heterogeneity levels."""
    rows, reps = [], []
    for tau in taus:
        rep = run_bm_study(dataclasses.replace(s, tau=float(tau)), models, replications, cfg, k, workers)
        reps.extend(rep.replicates)
        emp = _agg([r["empirical"]["period_mean"] for r in rep.replicates])
        for m in models:
            est = _agg([r["fits"][m]["rk"]["mean"] for r in rep.replicates if r["fits"][m]["status"] == "ok"])
            rows.append({
                "tau": float(tau), "model": m,
                "empirical_mean": emp["mean"], "empirical_lb": emp["lb"], "empirical_ub": emp["ub"],
                "estimated_mean": est["mean"], "estimated_lb": est["lb"], "estimated_ub": est["ub"],
            })
    config = {"study": "tau-sweep", "scenario": dataclasses.asdict(s), "taus": [float(t) for t in taus],
              "models": list(models), "replications": replications, "sampler": cfg.to_dict(), "k": k}
    return ReplicationReport("tau-sweep", config, reps, {"tau_sweep": rows})


# --------------------------------------------------------------------------
# informative prior transfer, block maxima
# --------------------------------------------------------------------------

K_GRID = (2, 5, 10, 20, 50, 100)


def _single_group(values) -> ExtremesSample:
    n = len(values)
    return ExtremesSample(np.asarray(values, dtype=float), tuple(str(i) for i in range(n)),
                          np.zeros(n, dtype=np.int64), ("all",), "n:1", 1)


def _curve(res: FitResult, ks):
    out = []
    for kk in ks:
        ps = posterior_transform(res.chain, return_level_map(kk))
        out.append(ps.to_dict())
    return out


def _transfer_gev_replicate(args):
    s, cfg, k, ks, r = args
    y = sample_gev(s.params, _rng(s.seed, r, _PURPOSE["data"]), s.n)
    n1, n2 = s.split
    part1 = _single_group(y[:n1])
    first, err = _fit_with_retry(lambda c: fit_gev(part1, "none", cfg=c), cfg, (s.seed, r, 10))
    out = {"replication": r, "true_rk": return_level(s.params, k), "fits": {}, "notes": []}
    if first is None:
        out["fits"]["part1_flat"] = {"status": "failed", "error": err}
        return out
    out["fits"]["part1_flat"] = _summarise_fit(first, k)
    prior = posterior_to_prior(first.chain)
    out["prior"] = prior.to_dict()
    if n2 == 0:
        out["notes"].append("second part is empty; part-2 fits skipped")
        return out
    part2 = _single_group(y[n1:])
    for label, pri, purpose in (("part2_informative", prior, 11), ("part2_flat", None, 12)):
        res, err = _fit_with_retry(lambda c: fit_gev(part2, "none", priors=pri, cfg=c), cfg, (s.seed, r, purpose))
        if res is None:
            out["fits"][label] = {"status": "failed", "error": err}
            continue
        out["fits"][label] = _summarise_fit(res, k)
        out["fits"][label]["curve"] = _curve(res, ks)
    return out


def _transfer_bm_replicate(args):
    s, split, models, cfg, k, r = args
    _, sample = generate_bm(s, _rng(s.seed, r, _PURPOSE["data"]))
    part1 = sample.select_groups(range(split))
    part2 = sample.select_groups(range(split, s.periods))
    emp = empirical_return_level_by_group(part2, k)
    out = {"replication": r, "empirical_part2": float(emp.mean()), "fits": {}, "notes": []}
    for m in models:
        base = 20 + 10 * _PURPOSE[m]
        first, err = _fit_with_retry(lambda c: fit_gev(part1, m, cfg=c), cfg, (s.seed, r, base))
        if first is None:
            out["fits"][f"{m}/part1_flat"] = {"status": "failed", "error": err}
            continue
        out["fits"][f"{m}/part1_flat"] = _summarise_fit(first, k)
        prior = posterior_to_prior(first.chain)
        for label, pri, off in (("part2_informative", prior, 1), ("part2_flat", None, 2)):
            res, err = _fit_with_retry(lambda c: fit_gev(part2, m, priors=pri, cfg=c), cfg, (s.seed, r, base + off))
            key = f"{m}/{label}"
            out["fits"][key] = _summarise_fit(res, k) if res is not None else {"status": "failed", "error": err}
    return out


def run_prior_transfer_bm(scenario, cfg: SamplerConfig = DESK_CONFIG, replications: int = 1,
                          k: float = 10, k_grid=K_GRID, models=("none", "location"),
                          split_periods: int | None = None, workers: int = 1) -> ReplicationReport:
    """Fit the first part with vague priors, then the second part with and without
    the moment-matched posterior as prior.

    ``scenario`` is a :class:`ScenarioGEVDirect` (maxima drawn straight from a
    GEV, compared against the true return levels) or a :class:`ScenarioBM`
    split after ``split_periods`` periods (default: all but the last three),
    compared against the second part's empirical return level.
    """
    if isinstance(scenario, ScenarioGEVDirect):
        ks = tuple(k_grid)
        reps = _map(_transfer_gev_replicate, [(scenario, cfg, k, ks, r) for r in range(replications)], workers)
        true_curve = [return_level(scenario.params, kk) for kk in ks]
        rows, closer, compared = [], 0, 0
        for rep in reps:
            inf, flat = rep["fits"].get("part2_informative"), rep["fits"].get("part2_flat")
            if not (inf and flat and inf["status"] == flat["status"] == "ok"):
                continue
            compared += 1
            closer += abs(inf["rk"]["mean"] - rep["true_rk"]) < abs(flat["rk"]["mean"] - rep["true_rk"])
            for i, kk in enumerate(ks):
                rows.append({
                    "replication": rep["replication"], "k": kk, "true": true_curve[i],
                    "informative_mean": inf["curve"][i]["mean"], "informative_lo": inf["curve"][i]["hpd_lo"],
                    "informative_hi": inf["curve"][i]["hpd_hi"],
                    "flat_mean": flat["curve"][i]["mean"], "flat_lo": flat["curve"][i]["hpd_lo"],
                    "flat_hi": flat["curve"][i]["hpd_hi"],
                })
        summary = {"compared": compared, "informative_closer": int(closer),
                   "notes": sorted({n for rep in reps for n in rep["notes"]})}
        tables = {"return_level_curve": rows, "estimates": _transfer_table(reps, k)}
        config = {"study": "prior-transfer", "scenario_type": "gev-direct",
                  "scenario": dataclasses.asdict(scenario), "replications": replications,
                  "sampler": cfg.to_dict(), "k": k, "k_grid": list(ks)}
        return ReplicationReport("prior-transfer", config, reps, tables, summary)

    if isinstance(scenario, ScenarioBM):
        split = scenario.periods - 3 if split_periods is None else split_periods
        if not 1 <= split < scenario.periods:
            raise ValueError(f"split_periods must be in [1, {scenario.periods - 1}]")
        models = tuple(models)
        reps = _map(_transfer_bm_replicate,
                    [(scenario, split, models, cfg, k, r) for r in range(replications)], workers)
        emp = _agg([rep["empirical_part2"] for rep in reps])
        in_hpd = {}
        for rep in reps:
            for lab, f in rep["fits"].items():
                if "part2" in lab and f["status"] == "ok":
                    hit = f["rk"]["hpd_lo"] <= rep["empirical_part2"] <= f["rk"]["hpd_hi"]
                    in_hpd[lab] = in_hpd.get(lab, 0) + int(hit)
        summary = {"empirical_part2": emp, "empirical_in_hpd": in_hpd}
        table = _transfer_table(reps, k)
        config = {"study": "prior-transfer", "scenario_type": "bm", "scenario": dataclasses.asdict(scenario),
                  "split_periods": split, "models": list(models), "replications": replications,
                  "sampler": cfg.to_dict(), "k": k}
        return ReplicationReport("prior-transfer", config, reps, {"estimates": table}, summary)

    raise TypeError(f"unsupported scenario {type(scenario).__name__}")


def _transfer_table(reps, k):
    labels = list(dict.fromkeys(lab for rep in reps for lab in rep["fits"]))
    rows = []
    for lab in labels:
        ok = [rep["fits"][lab] for rep in reps if rep["fits"].get(lab, {}).get("status") == "ok"]
        if not ok:
            continue
        for n in ok[0]["params"]:
            rows.append({"fit": lab, "parameter": n, **_agg([f["params"][n]["mean"] for f in ok])})
        rows.append({"fit": lab, "parameter": f"R^{k}", **_agg([f["rk"]["mean"] for f in ok])})
        rows.append({"fit": lab, "parameter": "ll", **_agg([f["ll"] for f in ok])})
        rows.append({"fit": lab, "parameter": "DIC", **_agg([f["dic"] for f in ok])})
    return rows


# --------------------------------------------------------------------------
# peaks over threshold with prior transfer
# --------------------------------------------------------------------------

def generate_pot(s: ScenarioPOT, rng: np.random.Generator) -> TimeSeries:
    x = rng.normal(s.mean, s.sd, size=s.years * s.obs_per_year)
    return TimeSeries(np.arange(x.size, dtype=np.int64), x, "simulated-pot")


def _pot_fit_summary(res: FitResult, sample, p) -> dict:
    out = _summarise_fit(res)
    args = (sample.u, sample.n_total, sample.n_exceed, p)
    for key, fn in (("var", var_map(*args)), ("es", es_map(*args))):
        try:
            out[key] = posterior_transform(res.chain, fn).to_dict()
        except NonFiniteTransformError as e:
            out[key] = {"mean": math.nan, "sd": math.nan, "hpd_lo": math.nan, "hpd_hi": math.nan,
                        "error": str(e)}
        out[f"{key}_plugin"] = plug_in(res.chain, fn)
    out["n_exceed"] = sample.n_exceed
    return out


def _pot_replicate(args):
    s, cfg, r = args
    series = generate_pot(s, _rng(s.seed, r, _PURPOSE["data"]))
    year = np.arange(len(series)) // s.obs_per_year
    n1, n2 = s.split
    slices = {
        "train": year < n1,
        "test": year >= n1,
        "short": (year >= n1) & (year < n1 + s.short_years),
    }
    out = {"replication": r, "empirical": {}, "fits": {}, "failed_slices": []}
    samples = {}
    for name, mask in slices.items():
        sub = series.slice(mask)
        var, es = empirical_var_es(sub, s.p)
        out["empirical"][name] = {"var": var, "es": es}
        try:
            samples[name] = exceedances(sub, s.u)
        except EmptySampleError:
            out["failed_slices"].append(name)
    if "train" not in samples:
        return out
    first, err = _fit_with_retry(lambda c: fit_gpd(samples["train"], cfg=c), cfg, (s.seed, r, 40))
    if first is None:
        out["fits"]["train/flat"] = {"status": "failed", "error": err}
        return out
    out["fits"]["train/flat"] = _pot_fit_summary(first, samples["train"], s.p)
    prior = posterior_to_prior(first.chain)
    out["prior"] = prior.to_dict()
    for name, base in (("test", 41), ("short", 43)):
        if name not in samples:
            continue
        for label, pri, off in (("informative", prior, 0), ("flat", None, 1)):
            res, err = _fit_with_retry(lambda c: fit_gpd(samples[name], priors=pri, cfg=c), cfg,
                                       (s.seed, r, base + off))
            key = f"{name}/{label}"
            out["fits"][key] = (_pot_fit_summary(res, samples[name], s.p) if res is not None
                                else {"status": "failed", "error": err})
    return out


def run_pot_study(s: ScenarioPOT, cfg: SamplerConfig = DESK_CONFIG, workers: int = 1) -> ReplicationReport:
    """POT fits of the training years, then the test and short slices with and
    without the transferred prior, against empirical VaR/ES of each slice."""
    reps = _map(_pot_replicate, [(s, cfg, r) for r in range(s.replications)], workers)
    labels = list(dict.fromkeys(lab for rep in reps for lab in rep["fits"]))
    rows = []
    for lab in labels:
        ok = [rep["fits"][lab] for rep in reps if rep["fits"].get(lab, {}).get("status") == "ok"]
        for n in ("xi", "sigma"):
            rows.append({"fit": lab, "parameter": n, **_agg([f["params"][n]["mean"] for f in ok])})
        rows.append({"fit": lab, "parameter": "VaR", **_agg([f["var"]["mean"] for f in ok])})
        rows.append({"fit": lab, "parameter": "ES", **_agg([f["es"]["mean"] for f in ok])})
    emp_rows = []
    for name in ("train", "test", "short"):
        for stat in ("var", "es"):
            emp_rows.append({"slice": name, "statistic": stat,
                             **_agg([rep["empirical"][name][stat] for rep in reps])})

    def err(rep, sl, lab):
        f = rep["fits"].get(f"{sl}/{lab}", {})
        if f.get("status") != "ok":
            return math.nan
        return abs(f["var"]["mean"] - rep["empirical"][sl]["var"])

    short_better = [err(rep, "short", "informative") < err(rep, "short", "flat") for rep in reps
                    if np.isfinite(err(rep, "short", "informative")) and np.isfinite(err(rep, "short", "flat"))]
    test_gap = [abs(rep["fits"]["test/informative"]["var"]["mean"] - rep["fits"]["test/flat"]["var"]["mean"])
                for rep in reps
                if rep["fits"].get("test/informative", {}).get("status") == "ok"
                and rep["fits"].get("test/flat", {}).get("status") == "ok"]
    summary = {
        "short_informative_closer": int(sum(short_better)),
        "short_compared": len(short_better),
        "test_var_gap_mean": float(np.mean(test_gap)) if test_gap else math.nan,
        "failed_slices": sum(len(rep["failed_slices"]) for rep in reps),
    }
    config = {"study": "pot", "scenario": dataclasses.asdict(s), "sampler": cfg.to_dict()}
    return ReplicationReport("pot", config, reps, {"estimates": rows, "empirical": emp_rows}, summary)


# --------------------------------------------------------------------------
# JSON scenario files
# --------------------------------------------------------------------------

def run_from_config(conf: dict, workers: int = 1) -> ReplicationReport:
    """Dispatch a scenario file (see README for the schema)."""
    study = conf.get("study")
    sampler = SamplerConfig.from_dict(conf["sampler"]) if "sampler" in conf else DESK_CONFIG
    scen = conf.get("scenario", {})
    k = conf.get("k", 10)
    if study == "bm":
        return run_bm_study(ScenarioBM(**scen), conf.get("models", ("none", "location")),
                            conf.get("replications", 5), sampler, k, workers)
    if study == "tau-sweep":
        return run_tau_sweep(ScenarioBM(**scen), conf.get("taus", (0, 1, 2, 3, 4)),
                             conf.get("models", ("none", "location")), conf.get("replications", 5),
                             sampler, k, workers)
    if study == "prior-transfer":
        kind = conf.get("scenario_type", "gev-direct")
        if kind == "gev-direct":
            sc = ScenarioGEVDirect(**scen)
        elif kind == "bm":
            sc = ScenarioBM(**scen)
        else:
            raise ValueError(f"unknown scenario_type {kind!r}")
        return run_prior_transfer_bm(sc, sampler, conf.get("replications", 1), k,
                                     conf.get("k_grid", K_GRID), conf.get("models", ("none", "location")),
                                     conf.get("split_periods"), workers)
    if study == "pot":
        return run_pot_study(ScenarioPOT(**scen), sampler, workers)
    raise ValueError(f"unknown study {study!r}; expected bm, tau-sweep, prior-transfer or pot")
