"""Hot numeric loops with numba acceleration and a pure-numpy fallback.

Set FRANSONSIM_NO_NUMBA=1 (or true/yes/on) to force the fallback path.
Both paths are bitwise-identical: the elementwise kernels use the same
per-element expression, the sliding extrema use only exact comparisons,
and the drift recurrence runs the same statement sequence either way.
"""

import os

import numpy as np

_FLAG = os.environ.get("FRANSONSIM_NO_NUMBA", "").strip().lower()
_DISABLED = _FLAG in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by FRANSONSIM_NO_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

USING_NUMBA = HAVE_NUMBA


def backend_name():
    """Return 'numba' or 'numpy' depending on the active kernel path."""
    return "numba" if USING_NUMBA else "numpy"


# triangle waveform, 0 at the start of each period, 1 at mid period


def _triangle_loop(t, period, out):
    for i in range(t.shape[0]):
        frac = (t[i] % period) / period
        out[i] = 1.0 - abs(2.0 * frac - 1.0)
    return out


def _triangle_numpy(t, period):
    frac = (t % period) / period
    return 1.0 - np.abs(2.0 * frac - 1.0)


# sliding window extrema via monotonic index wedges, O(n)


def _sliding_minmax_loop(x, window, mins, maxs):
    n = x.shape[0]
    qmin = np.empty(n, np.int64)
    qmax = np.empty(n, np.int64)
    min_head = min_tail = 0
    max_head = max_tail = 0
    for i in range(n):
        while min_tail > min_head and x[qmin[min_tail - 1]] >= x[i]:
            min_tail -= 1
        qmin[min_tail] = i
        min_tail += 1
        while max_tail > max_head and x[qmax[max_tail - 1]] <= x[i]:
            max_tail -= 1
        qmax[max_tail] = i
        max_tail += 1
        if qmin[min_head] <= i - window:
            min_head += 1
        if qmax[max_head] <= i - window:
            max_head += 1
        if i >= window - 1:
            mins[i - window + 1] = x[qmin[min_head]]
            maxs[i - window + 1] = x[qmax[max_head]]
    return mins, maxs


def _sliding_minmax_numpy(x, window):
    view = np.lib.stride_tricks.sliding_window_view(x, window)
    return view.min(axis=1), view.max(axis=1)


# mean-reverting drift recurrence
#   x[0] = mean + sigma * z[0]            (stationary start)
#   x[i] = mean + alpha * (x[i-1] - mean) + sigma*sqrt(1-alpha^2) * z[i]


def _ou_loop(z, alpha, sigma, mean, out):
    n = z.shape[0]
    if n == 0:
        return out
    scale = sigma * np.sqrt(1.0 - alpha * alpha)
    out[0] = mean + sigma * z[0]
    for i in range(1, n):
        out[i] = mean + alpha * (out[i - 1] - mean) + scale * z[i]
    return out


if HAVE_NUMBA:
    _triangle_loop_jit = njit(cache=True)(_triangle_loop)
    _sliding_minmax_jit = njit(cache=True)(_sliding_minmax_loop)
    _ou_loop_jit = njit(cache=True)(_ou_loop)


def triangle_wave(t, period):
    """Fractional triangle profile of t, in [0, 1], rising over the first half period."""
    t = np.ascontiguousarray(t, dtype=np.float64)
    if period <= 0.0:
        raise ValueError("period must be positive")
    if USING_NUMBA:
        out = np.empty_like(t)
        return _triangle_loop_jit(t.ravel(), float(period), out.ravel()).reshape(t.shape)
    return _triangle_numpy(t, float(period))


def sliding_min_max(x, window):
    """Per-position (min, max) over each length-`window` slice of a 1-d array."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    window = int(window)
    if x.ndim != 1:
        raise ValueError("expected a 1-d array")
    if not 1 <= window <= x.shape[0]:
        raise ValueError("window must be in [1, len(x)]")
    if USING_NUMBA:
        m = x.shape[0] - window + 1
        mins = np.empty(m)
        maxs = np.empty(m)
        return _sliding_minmax_jit(x, window, mins, maxs)
    return _sliding_minmax_numpy(x, window)


def ou_path(z, alpha, sigma, mean):
    """Mean-reverting path driven by unit normals z, stationary from the first sample."""
    z = np.ascontiguousarray(z, dtype=np.float64)
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must satisfy 0 <= alpha < 1")
    out = np.empty_like(z)
    if USING_NUMBA:
        return _ou_loop_jit(z, float(alpha), float(sigma), float(mean), out)
    return _ou_loop(z, float(alpha), float(sigma), float(mean), out)
