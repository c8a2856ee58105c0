"""Time the compiled probe kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel runs on the same inputs through both backends; the results must
agree before any timing is reported.
"""
import argparse
import timeit

import numpy as np

from setsize import _fallback

try:
    from setsize import _kernels
except ImportError:  # pragma: no cover
    _kernels = None


def cases(rng):
    n = 1 << 20
    bitmap = np.zeros(n + 1, dtype=np.uint8)
    bitmap[rng.choice(np.arange(1, n + 1), size=64, replace=False)] = 1
    elements = np.sort(rng.choice(np.arange(1, n + 1), size=256, replace=False)).astype(np.int64)
    key = int(rng.integers(0, 2**63))
    threshold = int(2.0**64 / 256)
    return [
        ("count_probe_hits (1e6 probes)", "count_probe_hits", (bitmap, n, key, 0, 1_000_000)),
        ("first_probe_hit (up to 1e6)", "first_probe_hit", (bitmap, n, key, 0, 1_000_000)),
        ("count_hashed_negatives (4000 x 256)", "count_hashed_negatives",
         (elements, key, 0, 4000, threshold)),
    ]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if _kernels is None:
        print("compiled backend not built; nothing to compare")
        return
    rng = np.random.default_rng(1)
    print(f"{'kernel':40s} {'python ms':>10s} {'compiled ms':>12s} {'speedup':>8s}")
    for label, name, argv in cases(rng):
        py, cy = getattr(_fallback, name), getattr(_kernels, name)
        assert int(py(*argv)) == int(cy(*argv)), f"{name}: backends disagree"
        t_py = min(timeit.repeat(lambda: py(*argv), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: cy(*argv), number=1, repeat=args.repeat))
        print(f"{label:40s} {t_py * 1e3:10.2f} {t_cy * 1e3:12.2f} {t_py / t_cy:7.1f}x")


if __name__ == "__main__":
    main()
