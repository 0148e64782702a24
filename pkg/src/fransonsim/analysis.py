"""Fringe analysis for detection traces.

Visibility is (max - min) / (max + min) over a sliding window; a window
whose trace sums to zero reports zero visibility rather than dividing by
zero. The fringe period estimator windows the trace, zero-pads the FFT
and refines the dominant bin with parabolic interpolation of the log
magnitude, which resolves the period far below one FFT bin.
"""

import numpy as np

from . import kernels

__all__ = [
    "AnalysisError",
    "windowed_visibility",
    "visibility_trace",
    "product_trace",
    "fringe_period",
    "phase_folded_visibility",
]


class AnalysisError(Exception):
    """A trace cannot support the requested analysis."""


def _as_trace(values):
    x = np.asarray(values, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("expected a one-dimensional trace")
    return x


def windowed_visibility(values, window):
    """Sliding-window visibility of a nonnegative trace.

    Returns one value per window position, length len(values) - window + 1.
    """
    x = _as_trace(values)
    lo, hi = kernels.sliding_min_max(x, int(window))
    num = hi - lo
    den = hi + lo
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den > 0)
    return out


def visibility_trace(t, values, window):
    """Windowed visibility with the center time of every window."""
    t = _as_trace(t)
    x = _as_trace(values)
    if t.size != x.size:
        raise ValueError("time and value traces differ in length")
    window = int(window)
    v = windowed_visibility(x, window)
    centers = (t[: t.size - window + 1] + t[window - 1 :]) / 2.0
    return centers, v


def product_trace(a, b):
    """Elementwise product of two singles traces."""
    a = _as_trace(a)
    b = _as_trace(b)
    if a.size != b.size:
        raise ValueError("traces differ in length")
    return a * b


def fringe_period(values, step=1.0):
    """Dominant oscillation period of a trace, in units of step per sample.

    The trace should hold at least a few full fringes. Raises
    AnalysisError when no dominant oscillation stands out (for example a
    constant trace).
    """
    x = _as_trace(values)
    if x.size < 8:
        raise AnalysisError("trace too short for a period estimate")
    if not np.all(np.isfinite(x)):
        raise AnalysisError("trace contains non-finite samples")
    x = x - x.mean()
    scale = float(np.max(np.abs(x)))
    if scale == 0.0:
        raise AnalysisError("no dominant fringe found in a flat trace")

    n = x.size
    padded = 1
    while padded < 8 * n:
        padded *= 2
    mag = np.abs(np.fft.rfft(x * np.hanning(n), padded))
    k = int(np.argmax(mag[1:])) + 1
    # Hann-windowed noise floor check: the peak must clear numerical dust.
    if mag[k] <= 1e-9 * n * scale:
        raise AnalysisError("no dominant fringe found")

    k_star = float(k)
    if 1 <= k < mag.size - 1 and mag[k - 1] > 0 and mag[k + 1] > 0:
        a, b, c = np.log(mag[k - 1]), np.log(mag[k]), np.log(mag[k + 1])
        den = a - 2.0 * b + c
        if den < 0:
            k_star = k + 0.5 * (a - c) / den
    return float(step) * padded / k_star


def phase_folded_visibility(phase, counts, fold_bins=36):
    """Visibility of counts folded onto phase modulo one turn.

    Bins the samples by phase into fold_bins equal sectors, averages the
    counts per sector and reports (max - min) / (max + min) over the
    sector means. Folding absorbs uneven phase coverage, so it suits
    scans where the phase sweeps back and forth.
    """
    phase = _as_trace(phase)
    counts = _as_trace(counts)
    if phase.size != counts.size:
        raise ValueError("phase and count traces differ in length")
    fold_bins = int(fold_bins)
    if fold_bins < 2:
        raise ValueError("need at least two fold bins")
    idx = np.floor(np.mod(phase, 2.0 * np.pi) / (2.0 * np.pi) * fold_bins)
    idx = np.clip(idx.astype(np.int64), 0, fold_bins - 1)
    totals = np.bincount(idx, weights=counts, minlength=fold_bins)
    hits = np.bincount(idx, minlength=fold_bins)
    occupied = hits > 0
    if np.count_nonzero(occupied) < 2:
        raise AnalysisError("phase coverage too sparse to fold")
    means = totals[occupied] / hits[occupied]
    hi = float(means.max())
    lo = float(means.min())
    if hi + lo <= 0:
        return 0.0
    return (hi - lo) / (hi + lo)
