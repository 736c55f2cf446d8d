"""Regenerate the bundled scenario data under src/bayesevt/data/.

Twenty calendar years of daily observations, 2000-01-01 to 2019-12-31.
Each five-year period has its own mean shift drawn from N(0, 1) on top of
N(0.02, 1.24^2) noise, so yearly maxima show between-period heterogeneity.
"""
import csv
import json
import os

import numpy as np

HERE = os.path.join(os.path.dirname(__file__), "..", "src", "bayesevt", "data")


def main(seed=20240601):
    rng = np.random.default_rng(seed)
    dates = np.arange(np.datetime64("2000-01-01"), np.datetime64("2020-01-01"))
    years = dates.astype("datetime64[Y]").astype(int) + 1970
    period = (years - 2000) // 5
    shift = rng.normal(0.0, 1.0, size=period.max() + 1)
    values = rng.normal(0.02 + shift[period], 1.24)
    with open(os.path.join(HERE, "scenario_daily.csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "value", "period"])
        for d, v, p in zip(dates, values, period):
            w.writerow([str(d), f"{v:.6f}", f"P{p + 1}"])
    scenario = {
        "study": "bm",
        "scenario": {"periods": 10, "years_per_period": 5, "obs_per_year": 360,
                     "base_mean": 0.02, "base_sd": 1.24, "tau": 1.0, "seed": 7},
        "models": ["none", "location"],
        "replications": 2,
        "k": 10,
        "sampler": {"burn_in": 1000, "n_draws": 2000, "thin": 5},
    }
    with open(os.path.join(HERE, "scenario_bm.json"), "w") as fh:
        json.dump(scenario, fh, indent=1, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main()
