#!/usr/bin/env python3
"""Time the numba kernels against the numpy fallback.

Runs the ball-integral kernel, the cap fraction and a full Wolff potential
evaluation on both backends and reports the best of several repeats.  The
first numba call is timed separately since it includes JIT compilation.

    python benchmarks/bench_kernels.py --repeats 5
"""
import argparse
import time

import numpy as np

from wolfflab import kernels
from wolfflab.params import ProblemParams
from wolfflab.profiles import BubbleProfile, sample, source_arrays, sphere_area
from wolfflab.radgeom import QuadratureConfig
from wolfflab.wolff import wolff_potential


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(n_radii):
    n, p, a = 5, 1.5, -0.5
    prof = BubbleProfile(n, p, a)
    arrays = source_arrays(sample(prof), prof.q, a)
    quad = QuadratureConfig()
    gx, gw = quad.rule()
    ts = np.geomspace(1e-3, 1e3, n_radii)
    hs = np.linspace(0.0, 1.0, 100_000)
    params = ProblemParams(n=n, p=p, q=prof.q, a=a, beta=1.0)

    def ball(impl):
        lx, ly, s_in, s_out = arrays
        return lambda: impl.ball_integrals(lx, ly, float(s_in), float(s_out), n, sphere_area(n), 1.0,
                                           ts, gx, gw, quad.h_max, quad.n_grade, quad.sigma)

    def cap(impl):
        return lambda: impl.cap_fraction(hs, n)

    def wolff(impl):
        return lambda: [wolff_potential(prof, params, x, backend=impl) for x in (0.1, 1.0, 10.0)]

    return {"ball_integrals": ball, "cap_fraction": cap, "wolff_potential x3": wolff}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--radii", type=int, default=200, help="ball radii per kernel call")
    args = ap.parse_args(argv)

    if kernels.numba_impl is None:
        print("numba is not installed; only the numpy backend is available")
        return 1
    print(f"{'kernel':<22}{'numba jit':>12}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for name, make in cases(args.radii).items():
        fast, slow = make(kernels.numba_impl), make(kernels.numpy_impl)
        t0 = time.perf_counter()
        fast()
        first = time.perf_counter() - t0
        t_nb = best_of(fast, args.repeats)
        t_np = best_of(slow, args.repeats)
        print(f"{name:<22}{first:>11.3f}s{t_nb:>11.4f}s{t_np:>11.4f}s{t_np / t_nb:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
