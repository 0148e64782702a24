import os
import subprocess
import sys

import numpy as np
import pytest

from fransonsim import kernels


def test_backend_flag_reports():
    assert kernels.backend_name() in ("numba", "numpy")
    assert kernels.USING_NUMBA == (kernels.backend_name() == "numba")


def test_triangle_wave_turning_points():
    t = np.array([0.0, 250.0, 500.0, 750.0, 1000.0, 1250.0])
    out = kernels.triangle_wave(t, 1000.0)
    assert np.array_equal(out, np.array([0.0, 0.5, 1.0, 0.5, 0.0, 0.5]))


def test_triangle_wave_periodic_and_bounded():
    t = np.linspace(0.0, 5000.0, 2001)
    out = kernels.triangle_wave(t, 1000.0)
    assert np.all(out >= 0.0) and np.all(out <= 1.0)
    assert np.array_equal(out, kernels.triangle_wave(t + 3000.0, 1000.0))


def test_triangle_wave_rejects_bad_period():
    with pytest.raises(ValueError):
        kernels.triangle_wave(np.arange(4.0), 0.0)


def test_sliding_min_max_matches_brute_force():
    rng = np.random.Generator(np.random.Philox(key=11))
    x = rng.normal(size=257)
    for window in (1, 2, 5, 64, 257):
        lo, hi = kernels.sliding_min_max(x, window)
        n = x.size - window + 1
        assert lo.shape == (n,) and hi.shape == (n,)
        for i in range(n):
            assert lo[i] == x[i:i + window].min()
            assert hi[i] == x[i:i + window].max()


def test_sliding_min_max_window_bounds():
    x = np.arange(8.0)
    with pytest.raises(ValueError):
        kernels.sliding_min_max(x, 0)
    with pytest.raises(ValueError):
        kernels.sliding_min_max(x, 9)


def test_ou_path_mean_reversion():
    rng = np.random.Generator(np.random.Philox(key=5))
    z = rng.standard_normal(200_000)
    path = kernels.ou_path(z, 0.99, 0.5, 2.0)
    assert abs(path.mean() - 2.0) < 0.05
    # stationary init: marginal std stays sigma throughout
    assert abs(path.std() - 0.5) < 0.02
    assert abs(path[:100].std() - 0.5) < 0.2


def test_ou_path_zero_sigma_is_constant():
    z = np.ones(50)
    path = kernels.ou_path(z, 0.9, 0.0, 1.5)
    assert np.array_equal(path, np.full(50, 1.5))


def test_ou_path_rejects_bad_alpha():
    with pytest.raises(ValueError):
        kernels.ou_path(np.zeros(4), 1.0, 0.1, 0.0)
    with pytest.raises(ValueError):
        kernels.ou_path(np.zeros(4), -0.1, 0.1, 0.0)


_CROSS_BACKEND_CODE = """
import numpy as np
from fransonsim import kernels
rng = np.random.Generator(np.random.Philox(key=7))
t = rng.uniform(0, 4000, 2000)
x = rng.normal(1000, 50, 2000)
z = rng.standard_normal(2000)
tri = kernels.triangle_wave(t, 1000.0)
mn, mx = kernels.sliding_min_max(x, 101)
ou = kernels.ou_path(z, 0.9967, 0.3, 0.1)
out = np.concatenate([tri, mn, mx, ou])
np.save(r"%s", out)
print(kernels.backend_name())
"""


def test_backends_bitwise_identical(tmp_path):
    """The numba path and the numpy fallback must agree to the last bit."""
    outputs = {}
    names = []
    for tag, extra in (("jit", {}), ("plain", {"FRANSONSIM_NO_NUMBA": "1"})):
        target = tmp_path / f"{tag}.npy"
        env = dict(os.environ)
        env.pop("FRANSONSIM_NO_NUMBA", None)
        env.update(extra)
        proc = subprocess.run(
            [sys.executable, "-c", _CROSS_BACKEND_CODE % target],
            env=env, capture_output=True, text=True, check=True)
        outputs[tag] = np.load(target)
        names.append(proc.stdout.strip())
    assert np.array_equal(outputs["jit"], outputs["plain"])
    assert names[1] == "numpy"
