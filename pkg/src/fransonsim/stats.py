"""Photon counting statistics for the detection channels.

Expected counts per acquisition bin are built from the two output
intensities. With singles rate R, efficiency e, dark rate d and bin
width T:

    lam1 = R*T*e * I_alpha/(2*I0) + d*T
    lam2 = R*T*e * I_beta /(2*I0) + d*T
    lam12 = r2*R*T*e^2 * I_alpha*I_beta/I0^2 + accidentals

so the pair term peaks at r2*R*T*e^2 where the intensity product peaks.
Accidental coincidences follow the usual two-rate window estimate
2*lam1*lam2*window/T (0.5 counts per second-long bin at 5000/s singles
in a 10 ns window).

Counts are drawn from counter-based streams keyed by (seed, bin index,
channel), so any bin of any channel can be sampled in isolation, in any
order, or in parallel, with identical results.
"""

from dataclasses import dataclass

import numpy as np

CHANNEL_SINGLES_1 = 1
CHANNEL_SINGLES_2 = 2
CHANNEL_PAIRS = 3
CHANNEL_THETA = 4
CHANNEL_GATES = 5

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SourceModel:
    """Source character: brightness and bunching of the photon stream.

    mean_photon_number is per detection gate. pair_fraction is the pair
    generation rate over the singles rate and triple_fraction the triple
    rate over the pair rate; the latter is carried for reporting only.
    statistics selects 'poisson' or 'sub-poisson' counting; fano_factor
    is the variance over mean ratio used by the sub-poisson mode.
    """

    mean_photon_number: float = 0.04
    singles_rate: float = 5000.0
    pair_fraction: float = 0.01
    triple_fraction: float = 0.01
    statistics: str = "poisson"
    fano_factor: float = 1.0


@dataclass(frozen=True)
class DetectorModel:
    """Single-photon counter: efficiency, dark rate, output pulse width."""

    efficiency: float = 1.0
    dark_rate: float = 27.0
    pulse_width: float = 10e-9


@dataclass(frozen=True)
class CoincidenceModel:
    """Pair counting: window width and optional accidental subtraction."""

    window: float = 10e-9
    accidental_correction: bool = False


def click_probability(mean_photons, efficiency=1.0):
    """Probability that a non-number-resolving counter fires on one gate.

    1 - exp(-efficiency * mean_photons); 0.0392 for 0.04 mean photons at
    unit efficiency.
    """
    mean_photons = np.asarray(mean_photons, dtype=np.float64)
    if np.any(mean_photons < 0):
        raise ValueError("mean photon number must be nonnegative")
    if not 0.0 <= efficiency <= 1.0:
        raise ValueError("efficiency must be in [0, 1]")
    return -np.expm1(-efficiency * mean_photons)


def accidentals(lam1, lam2, window, bin_width):
    """Expected accidental coincidences per bin for two singles channels."""
    lam1 = np.asarray(lam1, dtype=np.float64)
    lam2 = np.asarray(lam2, dtype=np.float64)
    return 2.0 * lam1 * lam2 * window / bin_width


def expected_bin_counts(i_alpha, i_beta, i0, source, detector, coincidence, bin_width=1.0):
    """Expected (lam1, lam2, lam12) counts for one bin or a vector of bins.

    The intensities must satisfy I_alpha + I_beta = 2*I0; a violation
    means the fields do not come from a lossless recombiner and is
    rejected. With accidental_correction set, lam12 keeps only the true
    pair term.
    """
    i_alpha = np.asarray(i_alpha, dtype=np.float64)
    i_beta = np.asarray(i_beta, dtype=np.float64)
    i0 = np.asarray(i0, dtype=np.float64)
    if np.any(i0 < 0):
        raise ValueError("reference intensity I0 must be nonnegative")
    if np.any(np.abs(i_alpha + i_beta - 2.0 * i0) > 1e-6 * np.maximum(1.0, 2.0 * i0)):
        raise ValueError("inconsistent intensities: I_alpha + I_beta != 2*I0")
    eff = detector.efficiency
    base = source.singles_rate * bin_width * eff
    dark = detector.dark_rate * bin_width
    # Dark-only where no light reaches the recombiner (I0 = 0 bins).
    denom = np.where(i0 > 0, 2.0 * i0, 1.0)
    lam1 = base * i_alpha / denom + dark
    lam2 = base * i_beta / denom + dark
    pair = source.pair_fraction * base * eff \
        * (i_alpha * i_beta) / np.where(i0 > 0, i0 * i0, 1.0)
    if coincidence.accidental_correction:
        lam12 = pair
    else:
        lam12 = pair + accidentals(lam1, lam2, coincidence.window, bin_width)
    return lam1, lam2, lam12


def counting_stream(seed, bin_index, channel):
    """Deterministic generator for one (seed, bin, channel) cell.

    Philox is a counter-based generator: the key holds (seed, channel)
    and the bin index sits in the high counter word, leaving 2**64 draws
    per cell. No cell's stream depends on any other, so evaluation order
    cannot change the results.
    """
    key = (int(seed) & _MASK64) | (int(channel) & _MASK64) << 64
    return np.random.Generator(np.random.Philox(key=key, counter=int(bin_index) << 64))


def _binomial_params(lam, fano):
    """Trial count and keep probability giving mean lam, variance near fano*lam."""
    trials = max(int(np.ceil(lam / (1.0 - fano))), 1)
    return trials, min(lam / trials, 1.0)


def _draw_counts(gen, lam, source):
    if lam <= 0.0:
        return 0
    if source.statistics == "poisson" or source.fano_factor >= 1.0:
        return int(gen.poisson(lam))
    trials, p = _binomial_params(lam, source.fano_factor)
    return int(gen.binomial(trials, p))


def sample_bin(expected, seed, bin_index, source=SourceModel()):
    """Draw (n1, n2, c12) for one bin from its three channel streams."""
    lam1, lam2, lam12 = expected
    n1 = _draw_counts(counting_stream(seed, bin_index, CHANNEL_SINGLES_1), lam1, source)
    n2 = _draw_counts(counting_stream(seed, bin_index, CHANNEL_SINGLES_2), lam2, source)
    c12 = _draw_counts(counting_stream(seed, bin_index, CHANNEL_PAIRS), lam12, source)
    return n1, n2, c12


def sample_counts(lam1, lam2, lam12, seed, source=SourceModel(), bin_indices=None):
    """Vector version of sample_bin over whole count arrays.

    bin_indices defaults to 0..n-1; pass the original bin indices when
    sampling a subset so the draws stay tied to absolute bin positions.
    """
    lam1 = np.atleast_1d(np.asarray(lam1, dtype=np.float64))
    lam2 = np.atleast_1d(np.asarray(lam2, dtype=np.float64))
    lam12 = np.atleast_1d(np.asarray(lam12, dtype=np.float64))
    n = lam1.shape[0]
    if bin_indices is None:
        bin_indices = np.arange(n)
    n1 = np.empty(n, dtype=np.int64)
    n2 = np.empty(n, dtype=np.int64)
    c12 = np.empty(n, dtype=np.int64)
    for j in range(n):
        n1[j], n2[j], c12[j] = sample_bin(
            (lam1[j], lam2[j], lam12[j]), seed, int(bin_indices[j]), source
        )
    return n1, n2, c12


def sample_photon_numbers(count, seed, source=SourceModel()):
    """Draw per-gate photon numbers for source characterization.

    Poisson mode draws Poisson(mean_photon_number); sub-poisson mode
    draws a binomial law with the same mean and variance reduced by the
    fano factor, which thins the multi-photon tail.
    """
    gen = counting_stream(seed, 0, CHANNEL_GATES)
    mu = source.mean_photon_number
    if source.statistics == "poisson" or source.fano_factor >= 1.0:
        return gen.poisson(mu, size=count)
    trials, p = _binomial_params(mu, source.fano_factor)
    return gen.binomial(trials, p, size=count)


def gate_pair_ratio(source=SourceModel()):
    """Closed-form P(2)/P(1) for the per-gate photon number law."""
    mu = source.mean_photon_number
    if source.statistics == "poisson" or source.fano_factor >= 1.0:
        return mu / 2.0
    trials, p = _binomial_params(mu, source.fano_factor)
    if trials < 2:
        return 0.0
    return 0.5 * (trials - 1) * p / (1.0 - p)


def fano_for_pair_ratio(mean_photon_number, target_ratio):
    """Fano factor whose binomial gate law best hits P(2)/P(1) = target_ratio.

    Searches the integer trial counts near the mean; with 0.04 mean
    photons and a 0.01 target this lands on two trials at 0.02 keep
    probability (ratio 0.0102, fano 0.98).
    """
    best = None
    for trials in range(2, 64):
        p = mean_photon_number / trials
        ratio = 0.5 * (trials - 1) * p / (1.0 - p)
        err = abs(ratio - target_ratio)
        if best is None or err < best[0]:
            best = (err, 1.0 - p)
    return best[1]
