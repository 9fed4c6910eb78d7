"""Compare the compiled kernels with the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel is run on the same inputs through both backends; the script
checks that results agree and prints the best-of-N wall time per call.
"""

import argparse
import timeit

import numpy as np

from negolab import _pykernels

try:
    from negolab import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    pts = rng.uniform(-0.2, 1.2, (200_000, 2))
    A, b = np.array([[1.0, 1.0]]), np.array([1.0])
    lo, hi = np.zeros(2), np.ones(2)
    vals = np.round(rng.normal(size=200_000), 3)
    a, c = rng.uniform(size=(2_000, 2)), rng.uniform(size=(2_000, 2))
    U = rng.normal(size=(3, 200_000))
    thr = np.zeros(3)
    mask = rng.uniform(size=200_000) < 0.8
    return {
        "halfspace_mask": (pts, A, b, lo, hi, 1e-9),
        "argmax_lex": (vals, pts, 0.0),
        "hausdorff": (a, c),
        "count_dominating": (U, thr, mask),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    else:
        print("compiled extension not built; timing the fallback only")

    print(f"{'kernel':<18}" + "".join(f"{name:>14}" for name in backends) + f"{'speedup':>10}")
    for name, call_args in cases(rng).items():
        results, times = [], []
        for mod in backends.values():
            fn = getattr(mod, name)
            results.append(fn(*call_args))
            times.append(min(timeit.repeat(lambda: fn(*call_args), number=1, repeat=args.repeat)))
        for r in results[1:]:
            np.testing.assert_allclose(np.asarray(r, dtype=float), np.asarray(results[0], dtype=float))
        speed = f"{times[0] / times[1]:9.1f}x" if len(times) > 1 else ""
        print(f"{name:<18}" + "".join(f"{t * 1e3:12.2f}ms" for t in times) + f"{speed:>10}")


if __name__ == "__main__":
    main()
