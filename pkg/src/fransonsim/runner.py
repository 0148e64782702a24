"""Timed interferometer scans producing binned detection time series.

A piezo sweeps one receiver phase back and forth as a triangle wave while
the inter-receiver phase follows a configurable model. Detector
expectations come from the compiled circuit; counts are either those
expectations (analytic mode) or reproducible random draws (monte-carlo
mode). Bins too close to a turning point of the scan are dropped, the
same way a lock-in stage blanks the seam where the piezo reverses.
"""

import dataclasses
import hashlib
from dataclasses import dataclass

import numpy as np

from . import kernels
from .circuit import compile_plan, counting_channels, evaluate
from .optics import intensity
from .seriesio import format_number, read_table, read_table_path, write_table, write_table_path
from .stats import (
    CHANNEL_THETA,
    CoincidenceModel,
    DetectorModel,
    SourceModel,
    counting_stream,
    expected_bin_counts,
    sample_counts,
)

SERIES_COLUMNS = ("t", "phi", "theta", "I_alpha", "I_beta", "D1", "D2", "C12")

MODES = ("analytic", "monte-carlo")


@dataclass(frozen=True)
class ScanProfile:
    """Triangle-wave piezo scan of one receiver phase."""

    period: float = 1000.0
    voltage_low: float = 0.0
    voltage_high: float = 100.0
    displacement: float = 2660.0
    wavelength: float = 532.0
    seam_halfwidth: float = 22.5

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("scan period must be positive")
        if self.displacement < 0:
            raise ValueError("scan displacement must be nonnegative")
        if self.wavelength <= 0:
            raise ValueError("scan wavelength must be positive")
        if self.seam_halfwidth < 0:
            raise ValueError("seam halfwidth must be nonnegative")


@dataclass(frozen=True)
class ThetaModel:
    """Inter-receiver phase versus time.

    constant: theta(t) = value
    linear:   theta(t) = rate * t
    drift:    mean-reverting random walk around value with stationary
              standard deviation sigma and correlation time tau
    """

    mode: str = "constant"
    value: float = 0.0
    rate: float = 0.0
    sigma: float = 0.0
    tau: float = 300.0

    def __post_init__(self):
        if self.mode not in ("constant", "linear", "drift"):
            raise ValueError(f"unknown theta mode '{self.mode}'")
        if self.mode == "drift":
            if self.sigma < 0:
                raise ValueError("drift sigma must be nonnegative")
            if self.tau <= 0:
                raise ValueError("drift tau must be positive")

    @classmethod
    def constant(cls, value=0.0):
        return cls(mode="constant", value=value)

    @classmethod
    def linear(cls, rate):
        return cls(mode="linear", rate=rate)

    @classmethod
    def drift(cls, sigma, tau=300.0, value=0.0):
        return cls(mode="drift", value=value, sigma=sigma, tau=tau)


@dataclass(frozen=True)
class Schedule:
    """Total scan duration and counting bin width, both in seconds."""

    duration: float = 4000.0
    bin_width: float = 1.0

    def __post_init__(self):
        # Zero duration is legal and yields a header-only record.
        if self.duration < 0:
            raise ValueError("duration must be nonnegative")
        if self.bin_width <= 0:
            raise ValueError("bin width must be positive")

    def bin_times(self):
        n = int(np.floor(self.duration / self.bin_width + 1e-9))
        return np.arange(n, dtype=np.float64) * self.bin_width


def displacement_at(t, scan):
    """Piezo displacement in nm at time t."""
    return scan.displacement * kernels.triangle_wave(np.asarray(t, np.float64), scan.period)


def voltage_at(t, scan):
    """Piezo drive voltage at time t."""
    tri = kernels.triangle_wave(np.asarray(t, np.float64), scan.period)
    return scan.voltage_low + (scan.voltage_high - scan.voltage_low) * tri


def phi_at(t, scan):
    """Scanned receiver phase in radians at time t."""
    return 2.0 * np.pi * displacement_at(t, scan) / scan.wavelength


def seam_mask(t, scan):
    """True for bins far enough from every turning point to keep."""
    t = np.asarray(t, np.float64)
    half = scan.period / 2.0
    r = np.mod(t, half)
    dist = np.minimum(r, half - r)
    return dist >= scan.seam_halfwidth


def drift_path(n_bins, bin_width, theta, seed):
    """Mean-reverting theta path over the full bin grid."""
    if seed is None:
        raise ValueError("a seed is required for a drifting theta")
    if n_bins == 0:
        return np.empty(0, dtype=np.float64)
    alpha = float(np.exp(-bin_width / theta.tau))
    z = counting_stream(seed, 0, CHANNEL_THETA).standard_normal(n_bins)
    return kernels.ou_path(z, alpha, theta.sigma, theta.value)


def theta_path(t, theta, seed=None, bin_width=1.0):
    """Inter-receiver phase over the full bin grid t."""
    t = np.asarray(t, np.float64)
    if theta.mode == "constant":
        return np.full(t.shape, theta.value, dtype=np.float64)
    if theta.mode == "linear":
        return theta.value + theta.rate * t
    return drift_path(t.size, bin_width, theta, seed)


def theta_at(t, theta, seed=None, bin_width=1.0):
    """Inter-receiver phase at a single time t."""
    if theta.mode == "constant":
        return theta.value
    if theta.mode == "linear":
        return theta.value + theta.rate * float(t)
    index = int(np.floor(float(t) / bin_width + 1e-9))
    return float(drift_path(index + 1, bin_width, theta, seed)[index])


@dataclass
class DetectionTimeSeries:
    """Binned scan record: times, phases, intensities and counts."""

    t: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    i_alpha: np.ndarray
    i_beta: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    c12: np.ndarray
    meta: dict

    def __len__(self):
        return self.t.size

    def columns(self):
        return [self.t, self.phi, self.theta, self.i_alpha, self.i_beta,
                self.d1, self.d2, self.c12]

    def column(self, name):
        try:
            index = SERIES_COLUMNS.index(name)
        except ValueError:
            raise KeyError(f"unknown series column '{name}'") from None
        return self.columns()[index]


def _config_text(schedule, scan, theta, source, detector, coincidence, psi, mode, label):
    parts = [f"circuit={label}", f"mode={mode}", f"psi={psi!r}"]
    for obj in (schedule, scan, theta, source, detector, coincidence):
        parts.append(repr(obj))
    return ";".join(parts)


def run(plan, schedule=None, scan=None, theta=None, source=None, detector=None,
        coincidence=None, seed=None, mode="monte-carlo", psi=0.0, label="circuit",
        extra_meta=None):
    """Simulate one scan and return the binned detection record.

    plan may be an EvaluationPlan or a parsed circuit. In monte-carlo
    mode a seed is required and counts are reproducible draws keyed by
    (seed, absolute bin index); in analytic mode the expected counts are
    written unrounded.
    """
    if mode not in MODES:
        raise ValueError(f"unknown run mode '{mode}' (expected one of {MODES})")
    if mode == "monte-carlo" and seed is None:
        raise ValueError("a seed is required in monte-carlo mode")
    if not hasattr(plan, "steps"):
        plan = compile_plan(plan)
    schedule = schedule or Schedule()
    scan = scan or ScanProfile()
    theta = theta or ThetaModel()
    source = source or SourceModel()
    detector = detector or DetectorModel()
    coincidence = coincidence or CoincidenceModel()

    t_all = schedule.bin_times()
    keep = seam_mask(t_all, scan)
    theta_all = theta_path(t_all, theta, seed=seed, bin_width=schedule.bin_width)
    bin_indices = np.nonzero(keep)[0]
    t = t_all[keep]
    phi = phi_at(t, scan)
    theta_values = theta_all[keep]

    name1, name2 = counting_channels(plan)
    fields = evaluate(plan, {"phi": phi, "psi": psi, "theta": theta_values})
    i_alpha = np.atleast_1d(intensity(fields[name1]))
    i_beta = np.atleast_1d(intensity(fields[name2]))
    # Per-bin normalization keeps every bin's rates independent of which
    # other bins survive the seam cut, so draws are subset-stable.
    i0 = (i_alpha + i_beta) / 2.0

    lam1, lam2, lam12 = expected_bin_counts(
        i_alpha, i_beta, i0, source=source, detector=detector,
        coincidence=coincidence, bin_width=schedule.bin_width)

    if mode == "analytic":
        d1, d2, c12 = lam1, lam2, lam12
    else:
        d1, d2, c12 = sample_counts(lam1, lam2, lam12, seed, source=source,
                                    bin_indices=bin_indices)

    config = _config_text(schedule, scan, theta, source, detector, coincidence,
                          psi, mode, label)
    meta = {
        "circuit": label,
        "mode": mode,
        "seed": "none" if seed is None else int(seed),
        "psi": format_number(psi),
        "bin_width": format_number(schedule.bin_width),
        "nm_per_bin": format_number(
            2.0 * scan.displacement * schedule.bin_width / scan.period),
        "config_hash": hashlib.sha256(config.encode("utf-8")).hexdigest()[:16],
    }
    if extra_meta:
        meta.update(extra_meta)
    return DetectionTimeSeries(t, phi, theta_values, i_alpha, i_beta,
                               d1, d2, c12, meta)


def write_series(path_or_fh, series):
    """Write a detection record as CSV with its metadata comments."""
    if hasattr(path_or_fh, "write"):
        write_table(path_or_fh, SERIES_COLUMNS, series.columns(), series.meta)
    else:
        write_table_path(path_or_fh, SERIES_COLUMNS, series.columns(), series.meta)


def read_series(path_or_fh):
    """Read a detection record back from CSV."""
    if hasattr(path_or_fh, "read"):
        meta, columns = read_table(path_or_fh)
    else:
        meta, columns = read_table_path(path_or_fh)
    missing = [name for name in SERIES_COLUMNS if name not in columns]
    if missing:
        raise ValueError(f"series file is missing columns: {', '.join(missing)}")
    return DetectionTimeSeries(*(columns[name] for name in SERIES_COLUMNS), meta)


def resolve_counts(series, mode=None):
    """Pick the (d1, d2, c12) triple, as integers for monte-carlo data."""
    mode = mode or series.meta.get("mode", "monte-carlo")
    if mode == "analytic":
        return series.d1, series.d2, series.c12
    return (series.d1.astype(np.int64), series.d2.astype(np.int64),
            series.c12.astype(np.int64))
