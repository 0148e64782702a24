"""Closed-form intensity and visibility models for the two-party bench.

phi is the scanned path phase on one receiver, psi the fixed path phase
on the other, theta the relative propagation phase between the two
receivers at the recombining splitter. i0 is the per-receiver intensity
arriving at that splitter, so the two outputs always sum to 2*i0.

Output intensities of the recombined bench:

    I_alpha = (i0/2) * (2 - cos(theta) - cos(phi - psi - theta))
    I_beta  = (i0/2) * (2 + cos(theta) + cos(phi - psi - theta))

Without the recombiner the pair-detection fringe depends only on the
phase difference:

    R_AB = (i0/2) * (1 + cos(phi - psi))
"""

from dataclasses import dataclass

import numpy as np

SWEEP_COLUMNS = ("phi", "psi", "theta", "I_alpha", "I_beta", "R_AB", "product")


def coincidence_fringe(phi, psi, i0=1.0):
    """Pair-detection rate for two non-recombined outputs, flat in theta."""
    phi = np.asarray(phi, dtype=np.float64)
    psi = np.asarray(psi, dtype=np.float64)
    return 0.5 * i0 * (1.0 + np.cos(phi - psi))


def output_intensities(phi, psi, theta, i0=1.0):
    """Intensities (I_alpha, I_beta) at the two recombined outputs."""
    phi = np.asarray(phi, dtype=np.float64)
    psi = np.asarray(psi, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    ct = np.cos(theta)
    cx = np.cos(phi - psi - theta)
    i_alpha = 0.5 * i0 * (2.0 - ct - cx)
    i_beta = 0.5 * i0 * (2.0 + ct + cx)
    return i_alpha, i_beta


def singles_visibility(theta):
    """Visibility of either single-output fringe swept in phi: 1/(2 - cos theta)."""
    theta = np.asarray(theta, dtype=np.float64)
    return 1.0 / (2.0 - np.cos(theta))


def product_visibility(theta):
    """Visibility of the output-intensity product swept in phi.

    With c = |cos theta| the product extremes over a full phi period are
    i0^2 and i0^2 * (4 - (1 + c)^2) / 4, giving

        V = (1 + c)^2 / (8 - (1 + c)^2)

    which is 1 at theta = 0 or pi and drops to 1/7 at theta = pi/2.
    """
    theta = np.asarray(theta, dtype=np.float64)
    peak = (1.0 + np.abs(np.cos(theta))) ** 2
    return peak / (8.0 - peak)


@dataclass(frozen=True)
class AnalyticPoint:
    """Closed-form observables at a single (phi, psi, theta) working point."""

    phi: float
    psi: float
    theta: float
    i_alpha: float
    i_beta: float
    r_ab: float
    product: float


def analytic_point(phi, psi, theta, i0=1.0):
    """Evaluate every closed-form observable at one working point."""
    i_alpha, i_beta = output_intensities(phi, psi, theta, i0)
    r_ab = coincidence_fringe(phi, psi, i0)
    return AnalyticPoint(
        phi=float(phi),
        psi=float(psi),
        theta=float(theta),
        i_alpha=float(i_alpha),
        i_beta=float(i_beta),
        r_ab=float(r_ab),
        product=float(i_alpha * i_beta),
    )


def sweep(phi_values, psi_values, theta_values, i0=1.0):
    """Tabulate the closed forms over a grid, one row per grid point.

    The grid is the Cartesian product of the three value arrays with phi
    varying fastest and theta slowest. Returns a structured array with
    the SWEEP_COLUMNS fields; empty inputs give an empty table.
    """
    phi_values = np.atleast_1d(np.asarray(phi_values, dtype=np.float64))
    psi_values = np.atleast_1d(np.asarray(psi_values, dtype=np.float64))
    theta_values = np.atleast_1d(np.asarray(theta_values, dtype=np.float64))
    theta, psi, phi = np.meshgrid(theta_values, psi_values, phi_values, indexing="ij")
    phi = phi.ravel()
    psi = psi.ravel()
    theta = theta.ravel()
    i_alpha, i_beta = output_intensities(phi, psi, theta, i0)
    r_ab = coincidence_fringe(phi, psi, i0)
    table = np.empty(phi.shape[0], dtype=[(name, np.float64) for name in SWEEP_COLUMNS])
    table["phi"] = phi
    table["psi"] = psi
    table["theta"] = theta
    table["I_alpha"] = i_alpha
    table["I_beta"] = i_beta
    table["R_AB"] = r_ab
    table["product"] = i_alpha * i_beta
    return table
