import numpy as np
import pytest

from fransonsim import analytic


def test_coincidence_fringe_pinned_points():
    assert analytic.coincidence_fringe(0.0, 0.0) == pytest.approx(1.0)
    assert analytic.coincidence_fringe(np.pi, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert analytic.coincidence_fringe(1.3, 1.3) == pytest.approx(1.0)
    # depends only on phi - psi
    r1 = analytic.coincidence_fringe(2.1, 0.4)
    r2 = analytic.coincidence_fringe(2.1 + 5.0, 0.4 + 5.0)
    assert r1 == pytest.approx(r2, abs=1e-12)


def test_output_intensities_dark_fringe():
    ia, ib = analytic.output_intensities(0.0, 0.0, 0.0)
    assert ia == pytest.approx(0.0, abs=1e-15)
    assert ib == pytest.approx(2.0)


def test_output_intensities_sum_rule():
    rng = np.random.Generator(np.random.Philox(key=2))
    phi, psi, theta = rng.uniform(0, 2 * np.pi, (3, 10_000))
    ia, ib = analytic.output_intensities(phi, psi, theta, i0=1.0)
    assert np.max(np.abs(ia + ib - 2.0)) < 1e-12
    ia3, ib3 = analytic.output_intensities(phi, psi, theta, i0=3.0)
    assert np.allclose(ia3, 3.0 * ia, atol=1e-12)


def test_singles_visibility_matches_brute_force():
    phi = np.linspace(0.0, 2.0 * np.pi, 400_001)
    for theta in (0.0, 0.7, np.pi / 2, 2.5, np.pi):
        ia, _ = analytic.output_intensities(phi, 0.0, theta)
        v = (ia.max() - ia.min()) / (ia.max() + ia.min())
        assert analytic.singles_visibility(theta) == pytest.approx(v, abs=1e-9)
    assert analytic.singles_visibility(0.0) == pytest.approx(1.0)
    assert analytic.singles_visibility(np.pi / 2) == pytest.approx(0.5)
    assert analytic.singles_visibility(np.pi) == pytest.approx(1.0 / 3.0)


def test_product_visibility_matches_brute_force():
    phi = np.linspace(0.0, 2.0 * np.pi, 400_001)
    for theta in (0.0, 0.9, np.pi / 2, np.pi):
        ia, ib = analytic.output_intensities(phi, 0.0, theta)
        prod = ia * ib
        v = (prod.max() - prod.min()) / (prod.max() + prod.min())
        assert analytic.product_visibility(theta) == pytest.approx(v, abs=1e-8)


def test_product_visibility_extremes():
    assert analytic.product_visibility(0.0) == pytest.approx(1.0)
    assert analytic.product_visibility(np.pi) == pytest.approx(1.0)
    assert analytic.product_visibility(np.pi / 2) == pytest.approx(1.0 / 7.0, abs=1e-12)
    # visibility floor sits at the quarter-turn inter-receiver phase
    thetas = np.linspace(0.0, np.pi, 2001)
    vals = np.array([analytic.product_visibility(t) for t in thetas])
    assert thetas[np.argmin(vals)] == pytest.approx(np.pi / 2, abs=2e-3)


def test_analytic_point_record():
    p = analytic.analytic_point(0.4, 0.1, 0.2, i0=2.0)
    ia, ib = analytic.output_intensities(0.4, 0.1, 0.2, i0=2.0)
    assert p.i_alpha == pytest.approx(float(ia))
    assert p.i_beta == pytest.approx(float(ib))
    assert p.product == pytest.approx(float(ia * ib))
    assert p.r_ab == pytest.approx(float(analytic.coincidence_fringe(0.4, 0.1, i0=2.0)))


def test_sweep_table_layout():
    phi = np.array([0.0, 0.1, 0.2])
    psi = np.array([0.0, 1.0])
    theta = np.array([0.5])
    table = analytic.sweep(phi, psi, theta)
    assert table.dtype.names == analytic.SWEEP_COLUMNS
    assert table.shape == (6,)
    # phi varies fastest
    assert np.allclose(table["phi"][:3], phi)
    assert np.allclose(table["psi"][:3], 0.0)
    ia, ib = analytic.output_intensities(0.2, 1.0, 0.5)
    row = table[-1]
    assert row["I_alpha"] == pytest.approx(float(ia))
    assert row["I_beta"] == pytest.approx(float(ib))


def test_sweep_empty_grid():
    table = analytic.sweep(np.empty(0), np.array([0.0]), np.array([0.0]))
    assert table.shape == (0,)


def test_product_correlates_with_pair_fringe_at_aligned_phase():
    """At zero inter-receiver phase the intensity product tracks the pair
    fringe shape closely but not perfectly: the best linear correlation
    over all relative shifts is 1/sqrt(1.0625)."""
    phi = np.linspace(0.0, 2.0 * np.pi, 20_000, endpoint=False)
    ia, ib = analytic.output_intensities(phi, 0.0, 0.0)
    prod = ia * ib
    best = 0.0
    for shift in np.linspace(0.0, 2.0 * np.pi, 721):
        fringe = analytic.coincidence_fringe(phi + shift, 0.0)
        r = np.corrcoef(prod, fringe)[0, 1]
        best = max(best, abs(r))
    assert best == pytest.approx(0.9701425, abs=1e-4)
    assert best < 0.999
