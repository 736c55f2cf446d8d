"""``bayesevt`` command line: extract, fit, prior export, risk, report, simulate, rerun.

Every artifact embeds the resolved configuration (argument vector without
``--out``, seed and SHA-256 of each input file). ``bayesevt rerun ARTIFACT
--out DIR`` replays it and produces byte-identical files.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import os
import sys

import numpy as np

from .errors import BayesEvtError, ConfigError
from .evd import GevParams, GpdParams, gev_quantile, gpd_quantile
from .extract import (
    ExceedanceSample,
    ExtremesSample,
    block_maxima,
    empirical_return_level,
    exceedances,
)
from .fit import fit_gev, fit_gpd
from .ingest import ingest_csv
from .risk import es_map, plug_in, posterior_transform, return_level_map, var_map
from .sampler import Chain, PriorSpec, SamplerConfig, posterior_to_prior
from .simlab import run_from_config

logger = logging.getLogger("bayesevt")

RL_GRID = (2, 3, 5, 10, 20, 50, 100, 200, 500, 1000)
TAIL_GRID = (0.1, 0.05, 0.025, 0.01, 0.005, 0.001)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# --------------------------------------------------------------------------
# artifact helpers
# --------------------------------------------------------------------------

def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _strip_out(argv):
    out, skip = [], False
    for a in argv:
        if skip:
            skip = False
        elif a == "--out":
            skip = True
        elif not a.startswith("--out="):
            out.append(a)
    return out


def _config(args, argv) -> dict:
    resolved = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "func")}
    inputs = {}
    for key in ("input", "sample", "chain", "prior", "scenario"):
        path = getattr(args, key, None)
        if path and os.path.isfile(path):
            inputs[path] = _sha256(path)
    return {"argv": _strip_out(argv), "resolved": resolved, "inputs": inputs}


def _dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=1) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def _write(out_dir, name, text) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w") as fh:
        fh.write(text)
    print(path)
    return path


def _csv(rows, cols, config) -> str:
    lines = ["# " + json.dumps(_jsonable({"config": config}), sort_keys=True), ",".join(cols)]
    for r in rows:
        lines.append(",".join(v if isinstance(v, str) else format(float(v), ".10g") for v in r))
    return "\n".join(lines) + "\n"


def _read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _embedded_config(path) -> dict:
    with open(path) as fh:
        first = fh.readline()
        if first.startswith("# "):
            info = json.loads(first[2:])
        else:
            fh.seek(0)
            info = json.load(fh)
    if "config" not in info:
        raise ConfigError(f"{path} carries no embedded configuration")
    return info["config"]


# --------------------------------------------------------------------------
# loading inputs
# --------------------------------------------------------------------------

def _series(args):
    if not args.input:
        raise ConfigError("--input is required")
    ts = ingest_csv(args.input, args.value_col, args.date_col, args.group_col)
    if args.start or args.end:
        lo = np.datetime64(args.start or "0001-01-01", "D")
        hi = np.datetime64(args.end or "9999-12-31", "D")
        ts = ts.slice((ts.times >= lo) & (ts.times <= hi))
        if len(ts) == 0:
            raise ConfigError(f"no observations between {lo} and {hi}")
    return ts


def _extract(args, kind):
    ts = _series(args)
    if kind == "bm":
        return block_maxima(ts, block=args.block, group=args.group_by, sign=args.sign)
    if args.threshold is None:
        raise ConfigError("--threshold is required for POT extraction")
    return exceedances(ts, args.threshold)


def _load_sample(args, kind):
    if args.sample:
        d = _read_json(args.sample)
        d = d.get("sample", d)
        return ExtremesSample.from_dict(d) if kind == "bm" else ExceedanceSample.from_dict(d)
    return _extract(args, kind)


def _load_chain(path) -> Chain:
    with open(path) as fh:
        return Chain.from_csv(fh.read())


def _load_priors(arg):
    if arg in (None, "flat"):
        return None
    d = _read_json(arg)
    return PriorSpec.from_dict(d.get("priors", d))


def _sampler(args) -> SamplerConfig:
    return SamplerConfig(burn_in=args.burn_in, n_draws=args.draws, thin=args.thin, seed=args.seed)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_extract(args, argv):
    sample = _extract(args, args.kind)
    cfg = _config(args, argv)
    _write(args.out, "sample.json", _dump_json({"config": cfg, "sample": sample.to_dict()}))


def cmd_fit(args, argv):
    cfg = _config(args, argv)
    priors = _load_priors(args.prior)
    if args.family == "gev":
        sample = _load_sample(args, "bm")
        res = fit_gev(sample, args.re, priors, _sampler(args), dic_mode=args.dic_mode)
        header = {"family": "gev", "re": args.re}
    else:
        if args.re != "none":
            raise ConfigError("random effects are only available for GEV fits")
        sample = _load_sample(args, "pot")
        res = fit_gpd(sample, priors, _sampler(args))
        header = {"family": "gpd", "re": "none", "u": sample.u,
                  "n_total": sample.n_total, "n_exceed": sample.n_exceed}
    header["config"] = cfg
    _write(args.out, "chain.csv", res.chain.to_csv(_jsonable(header)))
    summary = {"config": cfg, **header, "summary": res.summary.to_dict(),
               "priors": res.priors.to_dict()}
    _write(args.out, "summary.json", _dump_json(summary))


def _chain_info(path) -> dict:
    with open(path) as fh:
        first = fh.readline()
    return json.loads(first[2:]) if first.startswith("# ") else {}


def cmd_prior_export(args, argv):
    chain = _load_chain(args.chain)
    spec = posterior_to_prior(chain)
    _write(args.out, "prior.json", _dump_json({"config": _config(args, argv), "priors": spec.to_dict()}))


def _pot_info(info, args):
    try:
        return float(info["u"]), int(info["n_total"]), int(info["n_exceed"])
    except KeyError:
        raise ConfigError("VaR/ES need a chain from `fit gpd` (threshold metadata missing)") from None


def cmd_risk(args, argv):
    chain = _load_chain(args.chain)
    info = _chain_info(args.chain)
    if args.quantity == "rl":
        fn, extra = return_level_map(args.k), {"k": args.k}
    else:
        u, n, nu = _pot_info(info, args)
        fn = (var_map if args.quantity == "var" else es_map)(u, n, nu, args.p)
        extra = {"p": args.p, "u": u, "n_total": n, "n_exceed": nu}
    ps = posterior_transform(chain, fn, args.level)
    out = {"config": _config(args, argv), "quantity": args.quantity, **extra,
           "posterior": ps.to_dict(), "plug_in": plug_in(chain, fn), "level": args.level}
    _write(args.out, f"risk_{args.quantity}.json", _dump_json(out))


def cmd_report(args, argv):
    cfg = _config(args, argv)
    chain = _load_chain(args.chain)
    info = _chain_info(args.chain)
    family = info.get("family", "gev")
    m = dict(zip(chain.names, chain.posterior_mean()))
    if family == "gev":
        sample = _load_sample(args, "bm")
        y = np.sort(sample.values)
        p = GevParams(m["xi"], m["mu"], m["sigma"])
        model_q = lambda q: gev_quantile(p, q)  # noqa: E731
    else:
        sample = _load_sample(args, "pot")
        y = np.sort(sample.excesses)
        p = GpdParams(m["xi"], m["sigma"])
        model_q = lambda q: gpd_quantile(p, q)  # noqa: E731
    n = y.size
    pos = np.arange(1, n + 1) / (n + 1.0)
    rows = [(i + 1, pos[i], y[i], model_q(pos[i])) for i in range(n)]
    _write(args.out, "quantile_plot.csv",
           _csv(rows, ("rank", "plotting_position", "empirical", "model"), cfg))
    if family == "gev":
        rows = []
        for k in RL_GRID:
            ps = posterior_transform(chain, return_level_map(k), args.level)
            emp = empirical_return_level(sample, k) if n >= k else "nan"
            rows.append((k, ps.mean, ps.hpd_lo, ps.hpd_hi, plug_in(chain, return_level_map(k)), emp))
        _write(args.out, "return_level_plot.csv",
               _csv(rows, ("k", "mean", "hpd_lo", "hpd_hi", "plug_in", "empirical"), cfg))
    else:
        u, nt, nu = _pot_info(info, args)
        rows = []
        for tail in TAIL_GRID:
            v = posterior_transform(chain, var_map(u, nt, nu, tail), args.level)
            rows.append((tail, v.mean, v.hpd_lo, v.hpd_hi, plug_in(chain, var_map(u, nt, nu, tail))))
        _write(args.out, "var_plot.csv", _csv(rows, ("p", "mean", "hpd_lo", "hpd_hi", "plug_in"), cfg))


def cmd_simulate(args, argv):
    conf = _read_json(args.scenario)
    report = run_from_config(conf, workers=args.workers)
    report.config["cli"] = _config(args, argv)
    for path in report.write(args.out):
        print(path)


def cmd_rerun(args, argv):
    cfg = _embedded_config(args.artifact)
    return main(list(cfg["argv"]) + ["--out", args.out])


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_input(p, extraction=True):
    g = p.add_argument_group("input")
    g.add_argument("--input", help="CSV with a header row")
    g.add_argument("--value-col", default="value")
    g.add_argument("--date-col", default="date")
    g.add_argument("--group-col", default=None, help="series label column, e.g. index name")
    g.add_argument("--start", default=None, help="first date kept (YYYY-MM-DD)")
    g.add_argument("--end", default=None, help="last date kept (YYYY-MM-DD)")
    if extraction:
        g.add_argument("--block", default="year", help="year | n:<int>")
        g.add_argument("--group-by", default="none", help="none | every:<M> | label | block")
        g.add_argument("--threshold", type=float, default=None)
        g.add_argument("--sign", type=int, choices=(1, -1), default=1,
                       help="-1 extracts minima (losses of a return series)")


def _add_sampler(p):
    g = p.add_argument_group("sampler")
    g.add_argument("--burn-in", type=int, default=3000)
    g.add_argument("--draws", type=int, default=20000)
    g.add_argument("--thin", type=int, default=5)
    g.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="bayesevt", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="block maxima or threshold excesses to sample JSON")
    p.add_argument("kind", choices=("bm", "pot"))
    _add_input(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("fit", help="MCMC fit; writes chain.csv and summary.json")
    p.add_argument("family", choices=("gev", "gpd"))
    p.add_argument("--sample", help="sample JSON from `extract` (instead of --input)")
    _add_input(p)
    p.add_argument("--re", choices=("none", "location", "location-scale"), default="none")
    p.add_argument("--prior", default="flat", help="flat or a prior JSON file")
    p.add_argument("--dic-mode", choices=("conditional", "marginal"), default="conditional")
    _add_sampler(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("prior", help="prior persistence")
    psub = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    pe = psub.add_parser("export", help="moment-matched prior JSON from a chain")
    pe.add_argument("--chain", required=True)
    pe.add_argument("--out", required=True)
    pe.set_defaults(func=cmd_prior_export)

    p = sub.add_parser("risk", help="posterior summaries of R^k, VaR or ES")
    p.add_argument("quantity", choices=("rl", "var", "es"))
    p.add_argument("--chain", required=True)
    p.add_argument("--k", type=float, default=10.0)
    p.add_argument("--p", type=float, default=0.05)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_risk)

    p = sub.add_parser("report", help="quantile-plot and return-level-plot CSVs")
    p.add_argument("--chain", required=True)
    p.add_argument("--sample", help="sample JSON the chain was fitted to")
    _add_input(p)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("simulate", help="run a scenario JSON through the simulation lab")
    p.add_argument("scenario")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("rerun", help="replay the configuration embedded in an artifact")
    p.add_argument("artifact")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rerun)
    return ap


def _fail(kind, message, code):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return _fail("usage", str(e), 2)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        rc = args.func(args, [a for a in argv if a not in ("-v", "--verbose")])
    except (BayesEvtError, ValueError, OSError, KeyError, TypeError) as e:
        return _fail(type(e).__name__, str(e), 1)
    return rc or 0


if __name__ == "__main__":
    sys.exit(main())
