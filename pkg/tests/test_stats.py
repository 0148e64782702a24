import numpy as np
import pytest

from fransonsim.stats import (
    CoincidenceModel,
    DetectorModel,
    SourceModel,
    accidentals,
    click_probability,
    counting_stream,
    expected_bin_counts,
    fano_for_pair_ratio,
    gate_pair_ratio,
    sample_bin,
    sample_counts,
    sample_photon_numbers,
)


def test_click_probability_values():
    assert click_probability(0.0) == 0.0
    assert click_probability(0.04) == pytest.approx(1.0 - np.exp(-0.04))
    assert click_probability(0.04, efficiency=0.5) == pytest.approx(1.0 - np.exp(-0.02))
    with pytest.raises(ValueError):
        click_probability(-0.1)
    with pytest.raises(ValueError):
        click_probability(0.1, efficiency=1.5)


def test_accidentals_worked_example():
    # 5000/s on both channels, 10 ns window, 1 s bins
    assert accidentals(5000.0, 5000.0, 10e-9, 1.0) == pytest.approx(0.5)


def test_expected_bin_counts_dark_fringe():
    src, det, coin = SourceModel(), DetectorModel(), CoincidenceModel()
    lam1, lam2, lam12 = expected_bin_counts(0.0, 2.0, 1.0, src, det, coin)
    assert lam1 == pytest.approx(det.dark_rate)
    assert lam2 == pytest.approx(src.singles_rate + det.dark_rate)
    # no light on channel 1: only accidentals remain
    assert lam12 == pytest.approx(accidentals(lam1, lam2, coin.window, 1.0))


def test_expected_bin_counts_symmetric_point():
    src = SourceModel()
    det = DetectorModel(dark_rate=0.0)
    coin = CoincidenceModel(accidental_correction=True)
    lam1, lam2, lam12 = expected_bin_counts(1.0, 1.0, 1.0, src, det, coin)
    assert lam1 == lam2 == pytest.approx(src.singles_rate / 2.0)
    assert lam12 == pytest.approx(src.pair_fraction * src.singles_rate)


def test_expected_bin_counts_efficiency_scaling():
    src = SourceModel()
    det = DetectorModel(efficiency=0.5, dark_rate=0.0)
    coin = CoincidenceModel(accidental_correction=True)
    lam1, _, lam12 = expected_bin_counts(1.0, 1.0, 1.0, src, det, coin)
    assert lam1 == pytest.approx(0.5 * src.singles_rate / 2.0)
    # pair term carries one efficiency factor per detector
    assert lam12 == pytest.approx(0.25 * src.pair_fraction * src.singles_rate)


def test_expected_bin_counts_zero_light():
    src, det, coin = SourceModel(), DetectorModel(), CoincidenceModel()
    lam1, lam2, lam12 = expected_bin_counts(0.0, 0.0, 0.0, src, det, coin)
    assert lam1 == pytest.approx(27.0)
    assert lam2 == pytest.approx(27.0)
    assert lam12 == pytest.approx(2.0 * 27.0 * 27.0 * 10e-9)


def test_expected_bin_counts_rejects_inconsistent_sum():
    src, det, coin = SourceModel(), DetectorModel(), CoincidenceModel()
    with pytest.raises(ValueError):
        expected_bin_counts(1.0, 1.5, 1.0, src, det, coin)


def test_counting_stream_is_keyed_not_sequential():
    a = counting_stream(42, 7, 1).poisson(100.0, 4)
    b = counting_stream(42, 7, 1).poisson(100.0, 4)
    c = counting_stream(42, 8, 1).poisson(100.0, 4)
    d = counting_stream(43, 7, 1).poisson(100.0, 4)
    e = counting_stream(42, 7, 2).poisson(100.0, 4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, d)
    assert not np.array_equal(a, e)


def test_sample_counts_order_independent():
    lam1 = np.array([3.0, 5.0, 7.0, 11.0])
    lam2 = np.full(4, 4.0)
    lam12 = np.full(4, 1.0)
    full = sample_counts(lam1, lam2, lam12, seed=9)
    subset = sample_counts(lam1[[3, 1]], lam2[[3, 1]], lam12[[3, 1]], seed=9,
                           bin_indices=[3, 1])
    assert subset[0][0] == full[0][3] and subset[0][1] == full[0][1]
    assert subset[1][0] == full[1][3] and subset[2][1] == full[2][1]


def test_sample_bin_zero_rates():
    assert sample_bin((0.0, 0.0, 0.0), seed=1, bin_index=0) == (0, 0, 0)


def test_sample_counts_poisson_mean():
    lam = np.full(100_000, 100.0)
    n1, _, _ = sample_counts(lam, lam, np.zeros_like(lam), seed=3)
    assert abs(n1.mean() - 100.0) < 3.0 * np.sqrt(100.0 / lam.size)


def test_sub_poisson_variance_shrinks():
    src = SourceModel(statistics="sub-poisson", fano_factor=0.5)
    lam = np.full(50_000, 200.0)
    n1, _, _ = sample_counts(lam, lam, np.zeros_like(lam), seed=4, source=src)
    fano = n1.var() / n1.mean()
    assert abs(n1.mean() - 200.0) < 0.3
    assert 0.4 < fano < 0.6


def test_gate_pair_ratio_poisson_and_tuned():
    assert gate_pair_ratio(SourceModel()) == pytest.approx(0.02)
    f = fano_for_pair_ratio(0.04, 0.01)
    sub = SourceModel(statistics="sub-poisson", fano_factor=f)
    assert gate_pair_ratio(sub) == pytest.approx(0.0102, abs=3e-4)


def test_sample_photon_numbers_ratio():
    n = sample_photon_numbers(2_000_000, seed=7)
    ratio = np.count_nonzero(n == 2) / np.count_nonzero(n == 1)
    assert ratio == pytest.approx(0.02, abs=0.002)
