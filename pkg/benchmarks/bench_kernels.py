"""Benchmark the compiled labeling kernel against the numpy fallback.

Generates a random binary image, labels it with every available backend
at 4- and 8-connectivity, checks the outputs agree, and prints a timing
table. Run from a checkout with the package installed:

    python3 benchmarks/bench_kernels.py --size 2048 --density 0.35 --repeats 5
"""

import argparse
import time

import numpy as np

from spatterkit.kernels import available_backends


def time_backend(fn, bits, connectivity, repeats):
    """Best-of-N wall time in seconds plus the result for verification."""
    result = fn(bits, connectivity)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(bits, connectivity)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="compare label_image backends on random images")
    parser.add_argument("--size", type=int, default=2048,
                        help="image side length in pixels (default 2048)")
    parser.add_argument("--density", type=float, default=0.35,
                        help="foreground fraction (default 0.35)")
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repeats, best is kept (default 5)")
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if not 0.0 < args.density < 1.0:
        parser.error("--density must be in (0, 1)")
    if args.size < 1 or args.repeats < 1:
        parser.error("--size and --repeats must be positive")

    rng = np.random.default_rng(args.seed)
    bits = (rng.random((args.size, args.size)) < args.density)
    bits = bits.astype(np.uint8)

    backends = available_backends()
    print(f"image {args.size}x{args.size}, density {args.density}, "
          f"best of {args.repeats}")
    print(f"{'backend':<10} {'conn':>4} {'time':>10} {'components':>12}")

    for connectivity in (8, 4):
        rows = []
        for name in sorted(backends):
            fn = backends[name].label_image
            best, (labels, count) = time_backend(
                fn, bits, connectivity, args.repeats)
            rows.append((name, best, labels, count))
            print(f"{name:<10} {connectivity:>4} {best:>9.4f}s {count:>12}")
        # all backends must produce identical labelings
        first = rows[0]
        for other in rows[1:]:
            if other[3] != first[3] or not np.array_equal(other[2], first[2]):
                raise SystemExit(
                    f"backend mismatch at connectivity {connectivity}: "
                    f"{first[0]} vs {other[0]}")
        if len(rows) == 2:
            slow = max(rows, key=lambda r: r[1])
            fast = min(rows, key=lambda r: r[1])
            if fast[1] > 0:
                print(f"{'':>15} {fast[0]} is {slow[1] / fast[1]:.1f}x "
                      f"faster than {slow[0]}")

    if len(backends) == 1:
        print("only the python backend is available; build the extension "
              "to compare")


if __name__ == "__main__":
    main()
