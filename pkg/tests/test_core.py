import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from sympos.core import (
    MatrixParseError,
    NotSymplecticError,
    SymplecticMatrix,
    UnsupportedDimensionError,
    block_diag2,
    is_symplectic,
    krein_form,
    krein_gram,
    matrix_exponential,
    parse_matrix,
    rotation,
    spectrum,
    splitting_number,
    standard_j,
    symmetric_functions,
    symplectic_defect,
    symplectic_inverse,
)
from sympos.sampling import random_symplectic

sym4 = arrays(np.float64, (4, 4), elements=st.floats(-1.5, 1.5))
sym2 = arrays(np.float64, (2, 2), elements=st.floats(-2, 2))


def _expm_js(a):
    import scipy.linalg

    n = a.shape[0] // 2
    return scipy.linalg.expm(standard_j(n) @ (a + a.T) / 2)


def test_standard_j_convention():
    J = standard_j(2)
    assert np.array_equal(J[:2, :2], [[0, -1], [1, 0]])
    assert np.array_equal(J[2:, 2:], [[0, -1], [1, 0]])
    assert np.array_equal(J @ J, -np.eye(4))
    with pytest.raises(UnsupportedDimensionError):
        standard_j(3)


def test_symplectic_matrix_validation():
    sm = SymplecticMatrix.from_array(rotation(0.3))
    assert sm.half_dim == 1 and sm.symplectic_defect < 1e-15
    assert not sm.entries.flags.writeable
    with pytest.raises(NotSymplecticError):
        SymplecticMatrix.from_array([[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(UnsupportedDimensionError):
        SymplecticMatrix.from_array(np.eye(6))
    with pytest.raises(ValueError):
        SymplecticMatrix.from_array(np.eye(3))


@given(sym4)
def test_random_symplectic_inverse(a):
    m = _expm_js(a)
    assert symplectic_defect(m) < 1e-9 * max(1.0, np.abs(m).max() ** 2)
    assert np.allclose(symplectic_inverse(m) @ m, np.eye(4), atol=1e-8 * np.abs(m).max() ** 2)


def test_is_symplectic_tolerance():
    m = rotation(0.7)
    ok, d = is_symplectic(m + 1e-6)
    assert not ok and d > 1e-10
    assert is_symplectic(m + 1e-12, tol=1e-9)[0]


def test_symmetric_functions_diag():
    sf = symmetric_functions(np.diag([2.0, 0.5, 3.0, 1 / 3]))
    assert sf.sigma1 == pytest.approx(2 + 0.5 + 3 + 1 / 3)
    lam = [2.0, 0.5, 3.0, 1 / 3]
    s2 = sum(lam[i] * lam[j] for i in range(4) for j in range(i + 1, 4))
    assert sf.sigma2 == pytest.approx(s2)


def test_krein_form_of_j():
    v = np.array([1.0, -1j]) / np.sqrt(2)  # eigenvector of j for i
    assert np.allclose(rotation(np.pi / 2) @ v, 1j * v)
    assert krein_form(v, v).real == pytest.approx(1.0)
    assert np.allclose(krein_gram(v[:, None]), [[1.0]])


def test_spectrum_and_splitting_of_j():
    j = rotation(np.pi / 2)
    assert splitting_number(j, 1j) == 1
    assert splitting_number(j, -1j) == -1
    sp = spectrum(j)
    assert sorted(c.krein_signature for c in sp.clusters) == [-1, 1]
    with pytest.raises(ValueError):
        splitting_number(j, 1.0)


def test_spectrum_double_circle_signature():
    m = block_diag2(rotation(0.4), rotation(0.4))
    c = spectrum(m).find(np.exp(0.4j))
    assert c.algebraic_multiplicity == 2 and c.geometric_multiplicity == 2 and c.krein_signature == 2
    m = block_diag2(rotation(0.4), rotation(-0.4))
    assert spectrum(m).find(np.exp(0.4j)).krein_signature == 0


@given(sym4)
def test_spectrum_reciprocal_and_conjugate(a):
    m = _expm_js(a)
    vals = spectrum(m).values()
    assert vals.size == 4
    for x in vals:
        assert np.min(np.abs(vals - 1 / x)) < 1e-5 * max(1, abs(x))
        assert np.min(np.abs(vals - np.conj(x))) < 1e-5 * max(1, abs(x))


@given(sym2, st.floats(-3, 3))
def test_matrix_exponential_closed_form(a, t):
    import scipy.linalg

    g = standard_j(1) @ (a + a.T) / 2
    assert np.allclose(matrix_exponential(g, t), scipy.linalg.expm(g * t), rtol=1e-9, atol=1e-9)


def test_matrix_exponential_4x4(rng):
    import scipy.linalg

    g = rng.normal(size=(4, 4))
    assert np.allclose(matrix_exponential(g, 0.3), scipy.linalg.expm(0.3 * g))


def test_parse_matrix():
    assert parse_matrix("[[1, 0], [0, 1]]").shape == (2, 2)
    for bad in ("[[1, 2], [3]]", "[]", "[[1, \"a\"], [0, 1]]", "{", "[[true, 0], [0, 1]]"):
        with pytest.raises(MatrixParseError):
            parse_matrix(bad)


def test_random_symplectic(rng):
    m = random_symplectic(np.random.Generator(np.random.PCG64(3)), 2)
    assert symplectic_defect(m) < 1e-12
