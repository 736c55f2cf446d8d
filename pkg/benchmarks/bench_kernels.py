"""Time the compiled kernels against their numpy twins, plus one end-to-end fit per backend.

    python3 benchmarks/bench_kernels.py [--repeat 200]

The end-to-end rows spawn a subprocess with BAYESEVT_DISABLE_NUMBA set, since
the backend is fixed at import time.
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from bayesevt import kernels

FIT_SNIPPET = """
import time, numpy as np
from bayesevt import fit_gev, SamplerConfig
from bayesevt.simlab import ScenarioBM, generate_bm
_, s = generate_bm(ScenarioBM(obs_per_year=360, seed=1), np.random.default_rng(1))
cfg = SamplerConfig(burn_in=200, n_draws=500, thin=5)
fit_gev(s, "location", cfg=cfg)  # warm-up / compile
t = time.perf_counter(); fit_gev(s, "location", cfg=SamplerConfig(burn_in=1000, n_draws=2000, thin=5))
print(time.perf_counter() - t)
"""


def cases(rng):
    n, G, K = 50, 10, 30
    y = rng.gumbel(3.0, 0.5, n)
    gidx = np.repeat(np.arange(G), n // G).astype(np.int64)
    mu_g = np.full(G, 3.0) + rng.normal(0, 0.1, G)
    sig_g = np.full(G, 0.5)
    dmu = rng.normal(0, 0.3, (G, K))
    dsig = np.zeros((G, K))
    x = rng.exponential(0.4, 300)
    theta = np.array([0.1, 3.0, 0.5, 1.0])
    codes = np.array([0, 0, 2, 3], dtype=np.int64)
    a = np.array([-1e4, -1e4, 1e-4, 1e-4])
    b = np.array([1e4, 1e4, 1e4, 1e-4])
    c = np.zeros(4)
    return {
        "gev_group_loglik": (y, gidx, G, 0.1, mu_g, sig_g),
        "gev_grid_loglik": (y, gidx, G, 0.1, 3.0, 0.5, dmu, dsig),
        "gpd_loglik": (x, 0.1, 0.4),
        "log_prior": (theta, codes, a, b, c),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--no-fit", action="store_true")
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<20}{'numba us':>12}{'numpy us':>12}{'speedup':>10}")
    for name, call in cases(rng).items():
        jit = getattr(kernels, name + "_jit")
        npy = getattr(kernels, name + "_numpy")
        np.testing.assert_allclose(jit(*call), npy(*call), rtol=1e-10)
        jit(*call)
        tj = min(timeit.repeat(lambda: jit(*call), number=args.repeat, repeat=3)) / args.repeat
        tn = min(timeit.repeat(lambda: npy(*call), number=args.repeat, repeat=3)) / args.repeat
        print(f"{name:<20}{tj * 1e6:>12.2f}{tn * 1e6:>12.2f}{tn / tj:>10.1f}")
    if args.no_fit:
        return
    for label, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, BAYESEVT_DISABLE_NUMBA=flag)
        out = subprocess.run([sys.executable, "-c", FIT_SNIPPET], env=env,
                             capture_output=True, text=True, check=True)
        print(f"fit_gev location-RE, 3000 iterations, {label}: {float(out.stdout):.2f} s")


if __name__ == "__main__":
    main()
