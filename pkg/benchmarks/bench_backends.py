"""Time the sampling kernels under the numba and numpy backends.

The backend is fixed at import time, so each one runs in its own interpreter
with PTKL_BACKEND set. numba timings exclude the first (compiling) call.

    python3 benchmarks/bench_backends.py [--repeat 5]
"""
import argparse
import json
import os
import subprocess
import sys

CHILD = r"""
import json, sys, time
import numpy as np
from ptkl import kernels
from ptkl.sampling import RngStream

repeat = int(sys.argv[1])
shapes = np.array([1.0 * m * m for m in range(1, 11)])
conc = np.full(100, 1.0)
log_p = np.full(100, -np.log(100.0))
p = np.full(8, 1 / 8)

cases = {
    "pt_kl_batch M=10 x 5000": lambda g: kernels.pt_kl_batch(g, shapes, 5_000),
    "dirichlet_kl_batch n=100 x 20000": lambda g: kernels.dirichlet_kl_batch(g, conc, log_p, 20_000),
    "log_gamma_fill 1e6 shapes<1": lambda g: kernels.log_gamma_fill(g, np.full(1_000_000, 0.3)),
    "enumerate n=8": lambda g: kernels.enumerate_multinomial_reverse_mean(p, 8),
}
out = {}
for name, run in cases.items():
    run(RngStream(0).generator)  # warm-up / compile
    best = float("inf")
    for _ in range(repeat):
        g = RngStream(1).generator
        t = time.perf_counter()
        run(g)
        best = min(best, time.perf_counter() - t)
    out[name] = best
print(json.dumps(out))
"""


def run_backend(backend, repeat):
    env = dict(os.environ, PTKL_BACKEND=backend)
    res = subprocess.run([sys.executable, "-c", CHILD, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    fast = run_backend("numba", args.repeat)
    slow = run_backend("numpy", args.repeat)
    width = max(map(len, fast))
    print(f"{'kernel':<{width}}  {'numba s':>9}  {'numpy s':>9}  speedup")
    for name in fast:
        print(f"{name:<{width}}  {fast[name]:9.4f}  {slow[name]:9.4f}  {slow[name] / fast[name]:6.1f}x")


if __name__ == "__main__":
    main()
