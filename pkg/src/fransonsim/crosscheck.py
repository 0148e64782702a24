"""Numerical cross-check of a compiled circuit against the closed forms.

The check draws random phase triples, evaluates the circuit, picks the
observable the circuit actually exposes and fits the few calibration
offsets the netlist is allowed to hide (each mirror or path stub shifts
a phase by a constant). A circuit passes when, after that calibration,
every sampled point matches the closed-form model to the tolerance.

Two observables are supported. Circuits whose singles respond to the
scanned phase are matched against the two output-intensity laws.
Circuits whose singles are flat (delayed arm rotated into the
orthogonal polarization) are matched against the pair-overlap fringe,
which must also be independent of the inter-receiver phase.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .analytic import coincidence_fringe, output_intensities
from .circuit import compile_plan, counting_channels, evaluate
from .optics import coincidence_overlap, intensity

OBSERVABLE_INTENSITIES = "output-intensities"
OBSERVABLE_OVERLAP = "pair-overlap"

# Reuse the counting-stream key layout so compare draws never collide
# with simulation draws on the same seed.
CHANNEL_COMPARE = 6


@dataclass
class CompareReport:
    """Outcome of one circuit-versus-model comparison."""

    label: str
    observable: str
    samples: int
    i0: float
    offsets: dict
    max_rel_error: float
    tolerance: float
    passed: bool
    theta_spread: float = 0.0
    notes: tuple = field(default_factory=tuple)

    def lines(self):
        yield f"circuit = {self.label}"
        yield f"observable = {self.observable}"
        yield f"samples = {self.samples}"
        yield f"i0 = {self.i0:.9g}"
        for key, value in self.offsets.items():
            yield f"offset_{key} = {value:.9g}"
        yield f"max_rel_error = {self.max_rel_error:.3e}"
        if self.observable == OBSERVABLE_OVERLAP:
            yield f"theta_spread = {self.theta_spread:.3e}"
        yield f"tolerance = {self.tolerance:.3e}"
        for note in self.notes:
            yield f"note = {note}"
        yield f"result = {'pass' if self.passed else 'fail'}"

    def as_text(self):
        return "\n".join(self.lines()) + "\n"


def _sample_phases(seed, samples):
    rng = np.random.Generator(np.random.Philox(
        key=(int(seed) & 0xFFFFFFFFFFFFFFFF) | (CHANNEL_COMPARE << 64)))
    return rng.uniform(0.0, 2.0 * np.pi, size=(3, samples))


def _detector_fields(plan, phi, psi, theta):
    name1, name2 = counting_channels(plan)
    fields = evaluate(plan, {"phi": phi, "psi": psi, "theta": theta})
    return fields[name1], fields[name2]


def _singles_respond_to_scan(plan):
    """True when the singles rates move with the scanned phase."""
    phi = np.linspace(0.0, 2.0 * np.pi, 32, endpoint=False)
    f1, f2 = _detector_fields(plan, phi, 0.3, 0.7)
    ia = intensity(f1)
    ib = intensity(f2)
    level = float(np.mean(ia + ib) / 2.0)
    if level <= 0:
        raise ValueError("circuit delivers no light to its counting detectors")
    swing = max(float(ia.max() - ia.min()), float(ib.max() - ib.min()))
    return swing > 1e-6 * level


def _coarse_then_polish(loss, n_params):
    """Minimize loss over phase offsets: eighth-turn grid, then simplex."""
    grid = np.arange(8) * (np.pi / 4.0)
    best = None
    for combo in np.stack(np.meshgrid(*([grid] * n_params), indexing="ij"),
                          axis=-1).reshape(-1, n_params):
        value = loss(combo)
        if best is None or value < best[0]:
            best = (value, combo)
    result = minimize(loss, best[1], method="Nelder-Mead",
                      options={"xatol": 1e-12, "fatol": 1e-24, "maxiter": 4000})
    if result.fun <= best[0]:
        return np.asarray(result.x, dtype=np.float64)
    return np.asarray(best[1], dtype=np.float64)


def compare_circuit(circuit, samples=2000, seed=0, tolerance=1e-9, label="circuit"):
    """Compare one circuit with the matching closed-form model."""
    plan = compile_plan(circuit) if not hasattr(circuit, "steps") else circuit
    samples = int(samples)
    if samples < 16:
        raise ValueError("need at least 16 comparison samples")
    phi, psi, theta = _sample_phases(seed, samples)
    fit = slice(0, min(samples, 256))

    if _singles_respond_to_scan(plan):
        f1, f2 = _detector_fields(plan, phi, psi, theta)
        ia = intensity(f1)
        ib = intensity(f2)
        i0 = float(np.mean(ia + ib) / 2.0)

        def loss(offsets):
            a, b, c = offsets
            ma, mb = output_intensities(phi[fit] + a, psi[fit] + b,
                                        theta[fit] + c, i0)
            return float(np.mean((ia[fit] - ma) ** 2 + (ib[fit] - mb) ** 2))

        a, b, c = _coarse_then_polish(loss, 3)
        ma, mb = output_intensities(phi + a, psi + b, theta + c, i0)
        err = max(float(np.max(np.abs(ia - ma))), float(np.max(np.abs(ib - mb))))
        rel = err / i0
        return CompareReport(
            label=label, observable=OBSERVABLE_INTENSITIES, samples=samples,
            i0=i0, offsets={"phi": float(a), "psi": float(b), "theta": float(c)},
            max_rel_error=rel, tolerance=tolerance, passed=rel <= tolerance)

    # Flat singles: the delayed arms carry orthogonal polarization, so
    # the only fringe lives in the squared overlap of the two outputs.
    f1, f2 = _detector_fields(plan, phi, psi, theta)
    ia = intensity(f1)
    ib = intensity(f2)
    i0 = float(np.mean(ia + ib) / 2.0)
    overlap = coincidence_overlap(f1, f2)
    norm = i0 * i0

    # Both output fields scale with sqrt(i0), so the squared overlap is
    # i0 times the per-unit coincidence fringe.
    def loss(offsets):
        model = i0 * coincidence_fringe(phi[fit] + offsets[0], psi[fit], i0)
        return float(np.mean((overlap[fit] - model) ** 2))

    (d,) = _coarse_then_polish(loss, 1)
    model = i0 * coincidence_fringe(phi + d, psi, i0)
    rel = float(np.max(np.abs(overlap - model))) / norm

    # The fringe must ignore the inter-receiver phase entirely.
    theta_grid = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    g1, g2 = _detector_fields(plan, 1.1, 0.4, theta_grid)
    spread_trace = coincidence_overlap(g1, g2)
    spread = float(spread_trace.max() - spread_trace.min()) / norm

    passed = rel <= tolerance and spread <= tolerance
    return CompareReport(
        label=label, observable=OBSERVABLE_OVERLAP, samples=samples, i0=i0,
        offsets={"phi_minus_psi": float(d)}, max_rel_error=rel,
        tolerance=tolerance, passed=passed, theta_spread=spread)
