"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--dims 256,2048,16384] [--repeat 5]

Prints one CSV row per (kernel, dimension, backend) with the best wall time
and the speedup of the compiled core over the fallback.
"""
import argparse
import sys
import time

import numpy as np

from ordsearch import kernels
from ordsearch.algorithms import random_rotations


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def cases(d, rng):
    n = d // 4  # w = 1
    amps = rng.normal(size=d) + 1j * rng.normal(size=d)
    rot = random_rotations(d, 4 * d, rng)
    return {
        "apply_rotations": lambda: kernels.apply_rotations(amps.copy(), rot.ia, rot.ib, *rot.coeffs),
        "flip_answer_bit": lambda: kernels.flip_answer_bit(amps, n, n // 3),
        "index_mass": lambda: kernels.index_mass(amps, n),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--dims", default="256,2048,16384")
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    backends = kernels.available_backends()
    if "cython" not in backends:
        print("compiled core not built; only the python backend is available", file=sys.stderr)
    rng = np.random.default_rng(args.seed)
    print("kernel,dimension,backend,seconds,speedup")
    for d in (int(x) for x in args.dims.split(",")):
        for name, fn in cases(d, rng).items():
            timings = {}
            for backend in backends:
                previous = kernels.use_backend(backend)
                try:
                    timings[backend] = best_time(fn, args.repeat)
                finally:
                    kernels.use_backend(previous)
            for backend, sec in timings.items():
                speedup = timings["python"] / sec
                print(f"{name},{d},{backend},{sec:.6g},{speedup:.3g}")


if __name__ == "__main__":
    main()
