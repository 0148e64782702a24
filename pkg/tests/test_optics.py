import numpy as np
import pytest

from fransonsim import optics


def _rand_field(rng, shape=()):
    return rng.normal(size=shape + (2,)) + 1j * rng.normal(size=shape + (2,))


def test_jones_and_intensity():
    f = optics.jones(3.0 + 4.0j, 1.0 - 2.0j)
    assert f.shape == (2,)
    assert optics.intensity(f) == pytest.approx(25.0 + 5.0)


def test_bs_is_unitary():
    rng = np.random.Generator(np.random.Philox(key=3))
    a = _rand_field(rng, (64,))
    b = _rand_field(rng, (64,))
    o1, o2 = optics.bs_apply(a, b)
    before = optics.intensity(a) + optics.intensity(b)
    after = optics.intensity(o1) + optics.intensity(o2)
    assert np.allclose(before, after, rtol=0, atol=1e-12)


def test_bs_reflection_phase_is_quarter_turn():
    one = optics.jones(0.0, 1.0)
    zero = optics.jones(0.0, 0.0)
    o1, o2 = optics.bs_apply(one, zero)
    # transmitted amplitude real, reflected amplitude i/sqrt(2)
    assert o1[1] == pytest.approx(1.0 / np.sqrt(2.0))
    assert o2[1] == pytest.approx(1j / np.sqrt(2.0))


def test_fresnel_arago_no_fringe_on_bs():
    """Orthogonal polarizations through a BS give phase-independent outputs."""
    phis = np.linspace(0.0, 2.0 * np.pi, 37)
    in1 = np.broadcast_to(optics.jones(1.0, 0.0), (37, 2))
    in2 = optics.jones(np.zeros(37), np.exp(1j * phis))
    o1, o2 = optics.bs_apply(in1, in2)
    i1 = optics.intensity(o1)
    i2 = optics.intensity(o2)
    assert np.ptp(i1) < 1e-14 and np.ptp(i2) < 1e-14


def test_bs_linear():
    rng = np.random.Generator(np.random.Philox(key=9))
    a, b = _rand_field(rng), _rand_field(rng)
    c, d = _rand_field(rng), _rand_field(rng)
    s, t = 0.7 - 0.2j, -1.3 + 0.5j
    lhs = optics.bs_apply(s * a + t * c, s * b + t * d)
    rhs_a = optics.bs_apply(a, b)
    rhs_c = optics.bs_apply(c, d)
    for L, Ra, Rc in zip(lhs, rhs_a, rhs_c):
        assert np.allclose(L, s * Ra + t * Rc, atol=1e-12)


def test_pbs_routes_h_and_reflects_v_with_i():
    h_in = optics.jones(1.0, 0.0)
    v_in = optics.jones(0.0, 1.0)
    zero = optics.jones(0.0, 0.0)
    o1, o2 = optics.pbs_apply(h_in, zero)
    assert np.allclose(o1, h_in) and np.allclose(o2, zero)
    o1, o2 = optics.pbs_apply(v_in, zero)
    assert np.allclose(o1, zero)
    assert np.allclose(o2, optics.jones(0.0, 1j))


def test_pbs_energy_conserving():
    rng = np.random.Generator(np.random.Philox(key=13))
    a, b = _rand_field(rng, (32,)), _rand_field(rng, (32,))
    o1, o2 = optics.pbs_apply(a, b)
    assert np.allclose(optics.intensity(a) + optics.intensity(b),
                       optics.intensity(o1) + optics.intensity(o2), atol=1e-12)


def test_hwp_at_22_5_maps_v_to_diagonal():
    v = optics.jones(0.0, 1.0)
    out = optics.hwp_apply(v, np.deg2rad(22.5))
    assert out[0] == pytest.approx(np.sqrt(0.5))
    assert out[1] == pytest.approx(-np.sqrt(0.5))
    assert optics.intensity(out) == pytest.approx(1.0)


def test_hwp_is_an_involution_at_zero():
    rng = np.random.Generator(np.random.Philox(key=17))
    f = _rand_field(rng, (8,))
    twice = optics.hwp_apply(optics.hwp_apply(f, 0.3), 0.3)
    assert np.allclose(twice, f, atol=1e-12)


def test_phase_factor_snaps_quarter_turns():
    # exact multiples of pi/2 must give exact unit-circle points, so a
    # half-turn phase flips a field with no rounding residue
    assert optics.phase_factor(0.0) == 1.0 + 0.0j
    assert optics.phase_factor(np.pi / 2) == 1j
    assert optics.phase_factor(np.pi) == -1.0 + 0.0j
    assert optics.phase_factor(3 * np.pi / 2) == -1j
    assert optics.phase_factor(2 * np.pi) == 1.0 + 0.0j
    assert optics.phase_factor(-np.pi) == -1.0 + 0.0j
    general = optics.phase_factor(0.3)
    assert complex(general) == pytest.approx(np.exp(0.3j))


def test_phase_apply_scopes():
    f = optics.jones(1.0, 1.0)
    both = optics.phase_apply(f, np.pi, "both")
    assert np.array_equal(both, -f)
    h_only = optics.phase_apply(f, np.pi, "h_only")
    assert h_only[0] == -1.0 and h_only[1] == 1.0
    v_only = optics.phase_apply(f, np.pi, "v_only")
    assert v_only[0] == 1.0 and v_only[1] == -1.0
    with pytest.raises(ValueError):
        optics.phase_apply(f, 0.1, "diagonal")


def test_mirror_is_global_sign():
    f = optics.jones(0.2 + 0.1j, -0.4j)
    assert np.array_equal(optics.mirror_apply(f), -f)
    assert optics.intensity(optics.mirror_apply(f)) == optics.intensity(f)


def test_coincidence_overlap():
    a = optics.jones(1.0, 0.0)
    b = optics.jones(0.0, 1.0)
    assert optics.coincidence_overlap(a, a) == pytest.approx(1.0)
    assert optics.coincidence_overlap(a, b) == pytest.approx(0.0)
    # phase-sensitive interference of the two terms
    c = optics.jones(np.sqrt(0.5), np.sqrt(0.5))
    d = optics.jones(np.sqrt(0.5), -np.sqrt(0.5))
    assert optics.coincidence_overlap(c, d) == pytest.approx(0.0)
