"""The numba kernels and their numpy fallbacks must agree."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from fermiproc import _kernels

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


@needs_numba
def test_ladder_image_agrees(rng):
    states = np.arange(1 << 7, dtype=np.int64)
    for cre, ann in [((), (3,)), ((2,), ()), ((0, 5), (6, 1)), ((4, 1), (1, 4)), ((2,), (2,))]:
        a = _kernels.ladder_image_numba(states, np.array(cre, dtype=np.int64), np.array(ann, dtype=np.int64))
        b = _kernels.ladder_image_numpy(states, np.array(cre, dtype=np.int64), np.array(ann, dtype=np.int64))
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])


@needs_numba
def test_apply_two_level_agrees(rng):
    amps = rng.normal(size=(40, 4)) + 1j * rng.normal(size=(40, 4))
    idx_a = np.arange(0, 20, dtype=np.int64)
    idx_b = np.arange(20, 40, dtype=np.int64)
    signs = rng.choice([-1.0, 1.0], size=20)
    u = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))[0]
    cols = np.array([0, 2, 3], dtype=np.int64)
    x, y = amps.copy(), amps.copy()
    _kernels.apply_two_level_numba(x, idx_a, idx_b, signs, u, cols)
    _kernels.apply_two_level_numpy(y, idx_a, idx_b, signs, u, cols)
    np.testing.assert_allclose(x, y, atol=1e-15)
    np.testing.assert_array_equal(x[:, 1], amps[:, 1])


@needs_numba
@pytest.mark.parametrize("strategy", [0, 1, 2])
@pytest.mark.parametrize("L", [8, 9])
def test_floquet_agrees(strategy, L, rng):
    N = 3
    w0 = np.zeros((L, N), dtype=complex)
    w0[[0, 3, 6], np.arange(N)] = 1
    h = rng.normal(scale=0.1, size=L)
    a = _kernels.floquet_fidelities_numba(w0, h, math.cos(0.2), math.sin(0.2), strategy, 300, 50)
    b = _kernels.floquet_fidelities_numpy(w0, h, math.cos(0.2), math.sin(0.2), strategy, 300, 50)
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_environment_flag_selects_numpy():
    code = "from fermiproc import _kernels as k; print(k.USE_NUMBA, k.floquet_fidelities.__name__)"
    env = dict(os.environ, FERMIPROC_NUMBA="0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == ["False", "floquet_fidelities_numpy"]
