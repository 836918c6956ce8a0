"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N]

Each kernel runs once untimed (JIT warm-up), then the best of ``--repeat``
timings is reported for both variants, with a check that they agree.
"""

import argparse
import math
import time

import numpy as np

from fermiproc import _kernels


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def ladder_case():
    states = np.arange(1 << 18, dtype=np.int64)
    cre = np.array([3, 11], dtype=np.int64)
    ann = np.array([15, 7], dtype=np.int64)
    return (
        lambda: _kernels.ladder_image_numba(states, cre, ann),
        lambda: _kernels.ladder_image_numpy(states, cre, ann),
        lambda a, b: np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1]),
    )


def two_level_case():
    rng = np.random.default_rng(0)
    dim, cols = 200_000, 4
    amps = rng.normal(size=(dim, cols)) + 0j
    idx_a = np.arange(0, dim, 2, dtype=np.int64)
    idx_b = idx_a + 1
    signs = rng.choice([-1.0, 1.0], size=idx_a.size)
    u = np.array([[math.cos(0.3), -1j * math.sin(0.3)], [-1j * math.sin(0.3), math.cos(0.3)]])
    col_idx = np.arange(cols, dtype=np.int64)

    def run(kernel):
        def go():
            x = amps.copy()
            kernel(x, idx_a, idx_b, signs, u, col_idx)
            return x

        return go

    return run(_kernels.apply_two_level_numba), run(_kernels.apply_two_level_numpy), np.allclose


def floquet_case():
    L, N, rounds = 100, 20, 2000
    w0 = np.zeros((L, N), dtype=complex)
    w0[(np.arange(N) * L) // N, np.arange(N)] = 1
    h = np.random.default_rng(1).normal(0, 0.035 * 0.13, L)
    args = (w0, h, math.cos(0.13), math.sin(0.13), _kernels.STRATEGY_CYCLIC, rounds, 1000)
    return (
        lambda: _kernels.floquet_fidelities_numba(*args),
        lambda: _kernels.floquet_fidelities_numpy(*args),
        lambda a, b: np.allclose(a, b, atol=1e-10),
    )


CASES = {
    "ladder_image (2^18 states)": ladder_case,
    "apply_two_level (1e5 pairs x 4 cols)": two_level_case,
    "floquet_fidelities (L=100, N=20, 2000 rounds)": floquet_case,
}


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    print(f"{'kernel':48s} {'numba [ms]':>11s} {'numpy [ms]':>11s} {'speed-up':>9s}  agree")
    for name, build in CASES.items():
        fast, slow, same = build()
        t_fast = best_of(fast, args.repeat)
        t_slow = best_of(slow, max(1, args.repeat // 2))
        agree = same(fast(), slow())
        print(f"{name:48s} {t_fast * 1e3:11.2f} {t_slow * 1e3:11.2f} {t_slow / t_fast:8.1f}x  {agree}")


if __name__ == "__main__":
    main()
