"""Compare the compiled and numpy kernel backends on batched inputs.

Usage: python3 benchmarks/bench_kernels.py [--sizes 100 1000 10000] [--repeat 5]
"""
import argparse
import timeit

import numpy as np

from sympos import _kernels
from sympos.sampling import make_rng, random_symplectic


def _inputs(m, half_dim, rng):
    mats = np.array([random_symplectic(rng, half_dim, 0.8) for _ in range(m)])
    vel = rng.normal(size=mats.shape)
    P = rng.normal(size=mats.shape)
    P = P @ np.swapaxes(P, 1, 2)
    return mats, vel, P


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[100, 1000, 10000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = _kernels.available_backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the numpy backend is timed")
    rng = make_rng(1)
    print(f"{'kernel':<20}{'n':>3}{'batch':>8}" + "".join(f"{b + ' ms':>14}" for b in backends) + f"{'speedup':>10}")
    for half_dim in (1, 2):
        for m in args.sizes:
            mats, vel, P = _inputs(m, half_dim, rng)
            calls = {
                "symplectic_defects": lambda k: k.symplectic_defects(mats),
                "sigma_pairs": lambda k: k.sigma_pairs(mats),
                "reciprocal_spectra": lambda k: k.reciprocal_spectra(mats, 1e-10, 1e-9),
                "unitary_phases": lambda k: k.unitary_phases(mats),
                "generator_matrices": lambda k: k.generator_matrices(vel, mats),
                "pd_margins": lambda k: k.pd_margins(P),
            }
            for name, call in calls.items():
                times = {}
                for b in backends:
                    mod = _kernels.get_backend(b)
                    call(mod)
                    times[b] = 1e3 * min(timeit.repeat(lambda: call(mod), number=1, repeat=args.repeat))
                sp = times["python"] / times["cython"] if "cython" in times else float("nan")
                row = "".join(f"{times[b]:>14.3f}" for b in backends)
                print(f"{name:<20}{half_dim:>3}{m:>8}{row}{sp:>10.2f}")


if __name__ == "__main__":
    main()
