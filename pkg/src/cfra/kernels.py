"""Hot numeric kernels with a numba fast path and a pure-numpy fallback.

Set the environment variable ``CFRA_DISABLE_NUMBA=1`` to force the numpy
implementations (useful for debugging and for the benchmark in
``benchmarks/bench_kernels.py``). Both implementations are bit-compatible:
they consume pre-drawn random arrays, so results do not depend on the
selected backend.
"""

from __future__ import annotations

import os

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

_DISABLED = os.environ.get("CFRA_DISABLE_NUMBA", "").lower() in ("1", "true", "yes")
USE_NUMBA = HAVE_NUMBA and not _DISABLED


def _accumulate_uplink_np(h, pilots, amp, noise):
    """Per-pilot matched-filter output at every AP.

    h: (K, L, N) complex channels, pilots: (K,) pilot index per UE,
    amp: scalar sqrt(p * tau_p), noise: (L, T, N) complex.
    Returns y with y[l, t] = amp * sum_{k: pilots[k]=t} h[k, l] + noise[l, t].
    """
    y = noise.copy()
    for k in range(h.shape[0]):
        y[:, pilots[k], :] += amp * h[k]
    return y


def _observe_downlink_np(h, y, pilots, scale, dl_noise):
    """Scalar downlink observation per UE after pilot correlation.

    scale: (L, T) real weights folding serving membership and precoder
    normalization; zero entries mean the AP does not serve that pilot.
    dl_noise: (K,) complex receiver noise. Returns z of shape (K,).
    """
    z = dl_noise.copy()
    for k in range(h.shape[0]):
        t = pilots[k]
        corr = (np.conj(h[k]) * y[:, t, :]).sum(axis=1)
        z[k] += (scale[:, t] * corr).sum()
    return z


if HAVE_NUMBA:

    @njit(cache=True)
    def _accumulate_uplink_nb(h, pilots, amp, noise):  # pragma: no cover
        K, L, N = h.shape
        y = noise.copy()
        for k in range(K):
            t = pilots[k]
            for l in range(L):
                for n in range(N):
                    y[l, t, n] += amp * h[k, l, n]
        return y

    @njit(cache=True)
    def _observe_downlink_nb(h, y, pilots, scale, dl_noise):  # pragma: no cover
        K, L, N = h.shape
        z = dl_noise.copy()
        for k in range(K):
            t = pilots[k]
            acc = 0.0 + 0.0j
            for l in range(L):
                if scale[l, t] != 0.0:
                    corr = 0.0 + 0.0j
                    for n in range(N):
                        corr += np.conj(h[k, l, n]) * y[l, t, n]
                    acc += scale[l, t] * corr
            z[k] += acc
        return z


if USE_NUMBA:
    accumulate_uplink = _accumulate_uplink_nb
    observe_downlink = _observe_downlink_nb
else:
    accumulate_uplink = _accumulate_uplink_np
    observe_downlink = _observe_downlink_np
