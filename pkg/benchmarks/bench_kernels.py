"""Compare the compiled kernels with the numpy fallback.

Run with:
    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from relaylab import _fallback

try:
    from relaylab import _kernels
except ImportError:
    _kernels = None


def shot_noise_case(n_slots=2048, density=1e-3, radius=500.0, seed=0):
    g = np.random.default_rng(seed)
    counts = g.poisson(density * np.pi * radius ** 2, n_slots).astype(np.int64)
    tot = int(counts.sum())
    u, v = g.random(tot), g.random(tot)
    rx = np.array([[0.0, 0.0], [5.0, 0.0]])
    marks = g.standard_exponential((2, tot))
    return (u, v, counts, 2.5, 0.0, radius, rx, marks, 2e-3, 4.0)


def kl_case(n=2000, seed=1):
    g = np.random.default_rng(seed)
    return list(zip(g.random(n), g.exponential(0.5, n)))


def bench(fn, repeat):
    # best of several runs, in seconds
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the fallback is timed")
    sn = shot_noise_case()
    kl = kl_case()
    cases = {
        "polar_shot_noise (2048 slots, 2 receivers)":
            lambda mod: mod.polar_shot_noise(*sn),
        "kl_ucb_bound (2000 indices)":
            lambda mod: [mod.kl_ucb_bound(m, b) for m, b in kl],
    }
    print(f"{'kernel':45s} {'fallback':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, call in cases.items():
        t_py = bench(lambda: call(_fallback), args.repeat)
        if _kernels is None:
            print(f"{name:45s} {t_py:10.4f} {'-':>10s} {'-':>8s}")
            continue
        t_c = bench(lambda: call(_kernels), args.repeat)
        print(f"{name:45s} {t_py:10.4f} {t_c:10.4f} {t_py / t_c:8.1f}")


if __name__ == "__main__":
    main()
