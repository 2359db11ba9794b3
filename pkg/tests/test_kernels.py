import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sympos import _kernels
from sympos.sampling import random_symplectic

pytestmark = pytest.mark.skipif("cython" not in _kernels.available_backends(), reason="extension not built")


def _batch(seed, m, half_dim):
    rng = np.random.Generator(np.random.PCG64(seed))
    mats = np.array([random_symplectic(rng, half_dim, 0.9) for _ in range(m)])
    return rng, mats


@given(st.integers(0, 10 ** 6), st.sampled_from([1, 2]))
def test_backends_agree(seed, half_dim):
    rng, mats = _batch(seed, 8, half_dim)
    py, cy = _kernels.get_backend("python"), _kernels.get_backend("cython")
    scale = max(1.0, np.abs(mats).max() ** 2)
    assert np.allclose(py.symplectic_defects(mats), cy.symplectic_defects(mats), atol=1e-12 * scale)
    assert np.allclose(py.sigma_pairs(mats), cy.sigma_pairs(mats), rtol=1e-12, atol=1e-12 * scale)
    sp, lp = py.reciprocal_spectra(mats, 1e-10, 1e-9)
    sc, lc = cy.reciprocal_spectra(mats, 1e-10, 1e-9)
    assert np.allclose(sp, sc, rtol=1e-9, atol=1e-9)
    assert np.allclose(lp, lc, rtol=1e-7, atol=1e-7)
    assert np.allclose(py.unitary_phases(mats), cy.unitary_phases(mats), atol=1e-9)
    vel = rng.normal(size=mats.shape)
    assert np.allclose(py.generator_matrices(vel, mats), cy.generator_matrices(vel, mats), rtol=1e-10, atol=1e-10 * scale)
    P = rng.normal(size=mats.shape)
    P = P @ np.swapaxes(P, 1, 2)
    for a, b in zip(py.pd_margins(P), cy.pd_margins(P)):
        assert np.allclose(a, b, atol=1e-10)


def test_unitary_phase_is_unit(rng):
    _, mats = _batch(5, 20, 2)
    r = _kernels.unitary_phases(mats)
    assert np.allclose(np.abs(r), 1.0)


def test_read_only_input():
    a = np.eye(4)
    a.setflags(write=False)
    assert _kernels.symplectic_defects(a)[0] == 0.0


def test_unknown_backend():
    with pytest.raises(ValueError):
        _kernels.get_backend("fortran")


def test_pure_python_fallback_selected_by_env():
    env = dict(os.environ, SYMPOS_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "from sympos import _kernels; print(_kernels.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "python"
