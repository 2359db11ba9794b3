import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sympos import constructions as C
from sympos.core import block_diag2, rotation, symplectic_inverse
from sympos.sampling import random_sp4_mixed, random_symplectic
from sympos.strata import (
    NormalFormError,
    Stratum4,
    StratumTag2,
    boundary_defect,
    classify,
    classify2,
    classify4,
    normal_form_sign,
    project_conj2,
)

N1P = np.array([[1.0, -1.0], [0.0, 1.0]])
N1M = np.array([[1.0, 1.0], [0.0, 1.0]])


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


def test_classify2_examples():
    assert classify2(rotation(np.pi / 2)) is StratumTag2.O_U_plus
    assert classify2(rotation(-np.pi / 2)) is StratumTag2.O_U_minus
    assert classify2(np.diag([2.0, 0.5])) is StratumTag2.O_R_plus
    assert classify2(np.diag([-2.0, -0.5])) is StratumTag2.O_R_minus
    assert classify2(N1P) is StratumTag2.N1_plus
    assert classify2(N1M) is StratumTag2.N1_minus
    assert classify2(-N1P) is StratumTag2.Nminus1_plus
    assert classify2(-N1M) is StratumTag2.Nminus1_minus
    assert classify2(np.eye(2)) is StratumTag2.Id
    assert classify2(-np.eye(2)) is StratumTag2.MinusId


def test_normal_form_sign_examples():
    assert normal_form_sign(N1P, 1.0) == "+"
    assert normal_form_sign(N1M, 1.0) == "-"
    with pytest.raises(NormalFormError):
        normal_form_sign(np.eye(2), 1.0)
    with pytest.raises((NormalFormError, ValueError)):
        normal_form_sign(np.diag([2.0, 0.5]), 2.0)


def test_project_conj2_examples():
    assert project_conj2(np.diag([3.0, 1 / 3])).coordinate == pytest.approx(3.0)
    assert project_conj2(rotation(np.pi / 2)).coordinate == pytest.approx(1j)
    for th in (0.3, 1.2, 2.9):
        assert project_conj2(rotation(th)).coordinate == pytest.approx(np.exp(1j * th))
        # the eigenvalue with splitting number +1 of e^{-j th} is e^{-i th}
        neg = project_conj2(rotation(-th))
        assert neg.coordinate == pytest.approx(np.exp(-1j * th))
        assert neg.tag is StratumTag2.O_U_minus


@given(st.integers(0, 10 ** 6))
def test_conj2_invariance(seed):
    rng = _rng(seed)
    m = random_symplectic(rng, 1, 1.0)
    x = random_symplectic(rng, 1, 0.5)
    n = x @ m @ symplectic_inverse(x)
    assert classify2(m) is classify2(n)
    assert abs(project_conj2(m).coordinate - project_conj2(n).coordinate) < 1e-8


@given(st.integers(0, 10 ** 6))
def test_normal_form_sign_conjugation(seed):
    rng = _rng(seed)
    x = random_symplectic(rng, 1, 0.6)
    xi = symplectic_inverse(x)
    assert normal_form_sign(x @ N1P @ xi, 1.0) == "+"
    assert normal_form_sign(x @ N1M @ xi, 1.0) == "-"
    assert normal_form_sign(x @ -N1P @ xi, -1.0) == "+"


def test_classify2_partition_is_generic():
    rng = _rng(1)
    tags = [classify2(random_symplectic(rng, 1, 1.0)) for _ in range(500)]
    generic = {StratumTag2.O_U_plus, StratumTag2.O_U_minus, StratumTag2.O_R_plus, StratumTag2.O_R_minus}
    assert set(tags) <= generic


def test_classify4_examples():
    assert classify4(C.gamma_k(2.0, 0.0)).stratum is Stratum4.O_C
    assert classify4(block_diag2(rotation(0.5), rotation(-1.1))).stratum is Stratum4.O_U
    assert classify4(np.diag([2.0, 0.5, 3.0, 1 / 3])).stratum is Stratum4.O_R
    assert classify4(block_diag2(rotation(0.5), np.diag([2.0, 0.5]))).stratum is Stratum4.O_UR
    tag = classify4(C.n_minus_minus(0.0))
    assert tag.stratum is Stratum4.OTHER and "quadruple" in tag.detail
    assert classify4(np.eye(4)).stratum is Stratum4.OTHER
    assert classify4(C.gamma_k(1.0, 0.0, allow_degenerate=True)).stratum is Stratum4.B_UD
    assert classify4(block_diag2(rotation(0.5), rotation(0.5))).stratum is Stratum4.O_U


def test_classify4_one_edge_pair():
    m = block_diag2(N1P, rotation(0.7))
    assert classify4(m).stratum is Stratum4.B_U1_plus
    assert classify4(block_diag2(N1M, rotation(0.7))).stratum is Stratum4.B_U1_minus
    assert classify4(block_diag2(N1P, np.diag([2.0, 0.5]))).stratum is Stratum4.B_R1_plus
    assert classify4(block_diag2(N1M, np.diag([2.0, 0.5]))).stratum is Stratum4.B_R1_minus


def test_classify4_real_double():
    assert classify4(np.diag([2.0, 0.5, 2.0, 0.5])).stratum is Stratum4.B_RD
    spec = C.DeltaPathSpec()
    assert classify4(C.delta_path(spec, 0.05)).stratum is Stratum4.B_R


def test_delta_itinerary():
    spec = C.DeltaPathSpec()
    tags = {s: classify4(C.delta_path(spec, s)).stratum for s in (0.2, 0.3, 0.45, 0.5, 0.6, 0.9, 1.0)}
    assert all(tags[s] is Stratum4.B_RD for s in (0.2, 0.3, 0.45))
    assert tags[0.5] is Stratum4.OTHER
    assert all(tags[s] is Stratum4.B_U_minus for s in (0.6, 0.9, 1.0))


def test_gamma_k_exit_through_b_u_minus():
    k = 2.0
    rs = C.gamma_k_exit(k)
    assert classify4(C.gamma_k(k, -rs)).stratum is Stratum4.B_U_minus
    assert classify4(C.gamma_k(k, rs)).stratum is Stratum4.B_U_plus


def test_boundary_defect_examples():
    assert boundary_defect(C.n_minus_minus(0.0)) == pytest.approx(0.0, abs=1e-14)
    assert boundary_defect(C.gamma_k(2.0, 0.0)) == pytest.approx(2.25)
    assert boundary_defect(np.diag([2.0, 0.5, 3.0, 1 / 3])) < 0


def test_conjugation_invariance_random():
    rng = _rng(7)
    for _ in range(200):
        m = random_sp4_mixed(rng)
        x = random_symplectic(rng, 2, 0.3)
        a, b = classify4(m), classify4(x @ m @ symplectic_inverse(x))
        assert a.key == b.key
        d = boundary_defect(m)
        if a.stratum is Stratum4.O_C:
            assert d > 0
        if a.stratum is Stratum4.O_R:
            assert d < 0


def test_classify_dispatch():
    assert classify(rotation(1.0)) is StratumTag2.O_U_plus
    assert str(classify(np.diag([2.0, 0.5, 3.0, 1 / 3]))) == "O_R"
