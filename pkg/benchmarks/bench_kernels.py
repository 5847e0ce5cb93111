"""Compare the numba and numpy kernels on the Monte Carlo and incidence paths.

Run with ``python3 benchmarks/bench_kernels.py``. Timings exclude the first
call so numba compilation is not counted.
"""
import argparse
import timeit

import numpy as np

from quditcode import _kernels
from quditcode.coding import PROB_CUTOFF, CodingScheme, _incidence, _strings


def product_inputs(scheme, subset, trials, seed=0):
    rng = np.random.default_rng(seed)
    n, d = scheme.n, scheme.d
    g = rng.standard_normal((trials, n, d, 2))
    amps = g[..., 0] + 1j * g[..., 1]
    amps /= np.linalg.norm(amps, axis=2, keepdims=True)
    u = rng.random((trials, 2))
    strings = _strings(n, d)
    mask = np.zeros(n, dtype=np.bool_)
    mask[[t - 1 for t in subset]] = True
    ball = _incidence(n, d, scheme.k)
    agree = _kernels.ball_incidence_numpy(np.ascontiguousarray(strings[:, ~mask]), 0)
    return amps, u, strings, mask, ball, agree, float(scheme.dimension), PROB_CUTOFF


def best_of(fn, repeat):
    fn()
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=20000)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed")

    print(f"{'kernel':<16}{'scheme':<22}{'numpy (s)':>12}{'numba (s)':>12}{'speedup':>10}")
    cases = [CodingScheme(2, 2, 1), CodingScheme(3, 2, 2), CodingScheme(4, 3, 2), CodingScheme(6, 3, 3)]
    for s in cases:
        inputs = product_inputs(s, tuple(range(1, s.k + 1)), args.trials)
        a = _kernels.product_trials_numpy(*inputs)
        b = _kernels.product_trials_numba(*inputs)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])
        t_np = best_of(lambda: _kernels.product_trials_numpy(*inputs), args.repeat)
        t_nb = best_of(lambda: _kernels.product_trials_numba(*inputs), args.repeat)
        print(f"{'product_trials':<16}{str(s):<22}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}")
    for n, d in [(4, 3), (6, 3), (8, 2), (7, 3)]:
        strings = _strings(n, d)
        t_np = best_of(lambda: _kernels.ball_incidence_numpy(strings, 2), args.repeat)
        t_nb = best_of(lambda: _kernels.ball_incidence_numba(strings, 2), args.repeat)
        print(f"{'ball_incidence':<16}{f'n={n}, d={d}':<22}{t_np:>12.4f}{t_nb:>12.4f}{t_np / t_nb:>10.1f}")


if __name__ == "__main__":
    main()
