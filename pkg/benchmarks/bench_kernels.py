"""Timing comparison of the numba and numpy kernel backends.

Run with ``python benchmarks/bench_kernels.py``. Both backends consume the
same pre-drawn randoms, so the max |difference| printed should be ~1e-16.
"""

import time

import numpy as np

from cfra.kernels import (HAVE_NUMBA, _accumulate_uplink_np,
                          _observe_downlink_np)

if HAVE_NUMBA:
    from cfra.kernels import _accumulate_uplink_nb, _observe_downlink_nb


def timeit(fn, *args, repeat=20):
    fn(*args)  # warm-up (JIT compile for the numba path)
    start = time.perf_counter()
    for _ in range(repeat):
        out = fn(*args)
    return (time.perf_counter() - start) / repeat, out


def main():
    rng = np.random.default_rng(0)
    K, L, T, N = 20, 64, 5, 8
    h = (rng.standard_normal((K, L, N)) + 1j * rng.standard_normal((K, L, N))) / np.sqrt(2)
    pilots = rng.integers(0, T, size=K)
    noise = (rng.standard_normal((L, T, N)) + 1j * rng.standard_normal((L, T, N))) * 0.01
    amp = 22.36
    scale = rng.random((L, T))
    dl_noise = (rng.standard_normal(K) + 1j * rng.standard_normal(K)) * 0.01

    t_np, y_np = timeit(_accumulate_uplink_np, h, pilots, amp, noise)
    print(f"accumulate_uplink numpy: {t_np * 1e6:9.1f} us")
    if HAVE_NUMBA:
        t_nb, y_nb = timeit(_accumulate_uplink_nb, h, pilots, amp, noise)
        print(f"accumulate_uplink numba: {t_nb * 1e6:9.1f} us "
              f"(x{t_np / t_nb:.1f}, max diff {np.abs(y_np - y_nb).max():.2e})")

    t_np, z_np = timeit(_observe_downlink_np, h, y_np, pilots, scale, dl_noise)
    print(f"observe_downlink  numpy: {t_np * 1e6:9.1f} us")
    if HAVE_NUMBA:
        t_nb, z_nb = timeit(_observe_downlink_nb, h, y_np, pilots, scale, dl_noise)
        print(f"observe_downlink  numba: {t_nb * 1e6:9.1f} us "
              f"(x{t_np / t_nb:.1f}, max diff {np.abs(z_np - z_nb).max():.2e})")

    if not HAVE_NUMBA:
        print("numba not available; numpy fallback only")


if __name__ == "__main__":
    main()
