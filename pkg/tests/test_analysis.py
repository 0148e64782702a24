import numpy as np
import pytest

from fransonsim.analysis import (
    AnalysisError,
    fringe_period,
    phase_folded_visibility,
    product_trace,
    visibility_trace,
    windowed_visibility,
)


def test_windowed_visibility_full_trace():
    phi = np.linspace(0.0, 2.0 * np.pi, 5001)
    trace = 1.0 + 0.5 * np.cos(phi)
    v = windowed_visibility(trace, trace.size)
    assert v.shape == (1,)
    assert v[0] == pytest.approx(0.5, abs=1e-9)


def test_windowed_visibility_sliding():
    x = np.array([1.0, 3.0, 1.0, 3.0, 1.0])
    v = windowed_visibility(x, 2)
    assert np.allclose(v, 0.5)


def test_windowed_visibility_zero_trace():
    v = windowed_visibility(np.zeros(10), 5)
    assert np.array_equal(v, np.zeros(6))


def test_visibility_trace_centers():
    t = np.arange(10.0)
    centers, v = visibility_trace(t, np.ones(10), 4)
    assert centers.shape == v.shape == (7,)
    assert centers[0] == pytest.approx(1.5)
    assert np.array_equal(v, np.zeros(7)) or np.allclose(v, 0.0)


def test_product_trace():
    a = np.array([1.0, 2.0])
    b = np.array([3.0, 4.0])
    assert np.array_equal(product_trace(a, b), np.array([3.0, 8.0]))
    with pytest.raises(ValueError):
        product_trace(a, np.ones(3))


def test_fringe_period_recovers_synthetic_period():
    # 4.55 fringes over 455 samples at 5.32 units per sample
    n = 455
    step = 5.32
    x = np.arange(n) * step
    trace = 2.0 + np.cos(2.0 * np.pi * x / 532.0)
    period = fringe_period(trace, step)
    assert period == pytest.approx(532.0, rel=2e-3)


def test_fringe_period_sub_bin_resolution():
    n = 1024
    true_period = 97.31
    trace = np.sin(2.0 * np.pi * np.arange(n) / true_period + 0.3)
    assert fringe_period(trace) == pytest.approx(true_period, rel=1e-3)


def test_fringe_period_flat_trace_raises():
    with pytest.raises(AnalysisError):
        fringe_period(np.full(256, 3.0))
    with pytest.raises(AnalysisError):
        fringe_period(np.ones(4))
    with pytest.raises(AnalysisError):
        fringe_period(np.r_[np.ones(100), np.nan])


def test_phase_folded_visibility_balanced():
    rng = np.random.Generator(np.random.Philox(key=23))
    phase = rng.uniform(0.0, 2.0 * np.pi, 20_000)
    counts = 1.0 + np.cos(phase)
    v = phase_folded_visibility(phase, counts, 72)
    assert v == pytest.approx(1.0, abs=5e-3)
    half = phase_folded_visibility(phase, 3.0 + np.cos(phase), 72)
    assert half == pytest.approx(1.0 / 3.0, abs=5e-3)


def test_phase_folded_visibility_handles_wrapping():
    # negative and multi-turn phases fold onto [0, 2pi); the sector
    # means average the fringe over a 10 deg width, costing ~0.5%
    phase = np.linspace(-20.0, 20.0, 10_000)
    counts = 1.0 + np.cos(phase)
    v = phase_folded_visibility(phase, counts, 36)
    assert v == pytest.approx(1.0, abs=1e-2)
    assert v > 0.98


def test_phase_folded_visibility_sparse_raises():
    with pytest.raises(AnalysisError):
        phase_folded_visibility(np.zeros(5), np.ones(5), 36)
    with pytest.raises(ValueError):
        phase_folded_visibility(np.zeros(5), np.ones(4), 36)
