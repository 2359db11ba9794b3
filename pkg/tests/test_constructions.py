import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from sympos import constructions as C
from sympos.core import is_symplectic, rotation, standard_j, symplectic_inverse
from sympos.paths import certify_positive, maslov_index
from sympos.sampling import make_rng, random_symplectic
from sympos.strata import boundary_defect

TOL = 1e-9


def _symp(m):
    return is_symplectic(m, TOL)[0]


def test_simple_real_trace_law():
    beta = 2.0
    t = np.linspace(0, 2 * np.pi, 50)
    tr = np.trace(C.rotated_diag(t, beta), axis1=1, axis2=2)
    assert np.allclose(tr, (beta + 1 / beta) * np.cos(t))
    B = np.diag([beta, 1 / beta])
    assert np.allclose(C.rotated_diag(np.pi, beta), -B)


@pytest.mark.parametrize("alpha,beta", [(2.0, 3.0), (3.0, 2.0), (1.5, 5.0)])
def test_simple_real_projection(alpha, beta):
    p = C.simple_real_path(alpha, beta, 300)
    tr = np.trace(p.mats, axis1=1, axis2=2)
    x = 0.5 * (tr + np.sqrt(tr * tr - 4))
    assert x[0] == pytest.approx(alpha) and x[-1] == pytest.approx(beta)
    d = np.diff(x)
    assert np.all(d > 0) if beta > alpha else np.all(d < 0)
    assert certify_positive(p).verdict == "positive"


def test_simple_real_errors():
    with pytest.raises(ValueError):
        C.simple_real_path(0.5, 2.0)
    with pytest.raises(ValueError):
        C.simple_real_path(2.0, 2.0)


def test_conj_class_flow():
    A = np.diag([2.0, 0.5])
    p = C.conj_class_flow(A, [[0, 1], [1, 0]], 1.0, 100)
    ev = np.sort(np.linalg.eigvals(p.mats).real, axis=1)
    assert np.abs(ev - [0.5, 2.0]).max() < 1e-10
    assert certify_positive(p).verdict == "positive"
    with pytest.raises(ValueError):
        C.conj_class_flow(A, [[0, 1], [-1, 0]])
    with pytest.raises(ValueError):
        C.conj_class_flow(rotation(0.3), [[0, 1], [1, 0]])


def test_cone_in_class():
    v = C.cone_in_class(np.eye(2), 2.0, 1.0, 1.0)
    assert np.allclose(v, [[0, -2], [0.5, 0]])
    assert np.allclose(C.cone_in_class(np.eye(2), 2.0, 3.0, 3.0), 3 * v)
    rng = make_rng(5)
    J = standard_j(1)
    for _ in range(100):
        B = random_symplectic(rng, 1, 0.7)
        lam = rng.uniform(1.2, 4) * rng.choice([-1, 1])
        x, z = rng.uniform(0.1, 3, size=2)
        V = C.cone_in_class(B, lam, x, z)
        A = B @ np.diag([lam, 1 / lam]) @ symplectic_inverse(B)
        P = -J @ V @ symplectic_inverse(A)
        assert np.allclose(P, P.T, atol=1e-9)
        assert np.linalg.eigvalsh(0.5 * (P + P.T)).min() > 0
    with pytest.raises(ValueError):
        C.cone_in_class(np.eye(2), 2.0, -1.0, 1.0)


def test_trace_growth_leg_formulas():
    lam = 2.0
    t = np.linspace(0, 1, 200)
    E = np.array([C.matrix_exponential(C.GROWTH_G, x) for x in t]) @ np.diag([lam, 1 / lam])
    tr = np.trace(E, axis1=1, axis2=2)
    dtr = np.gradient(tr, t, edge_order=2)
    closed = lam * (np.cos(t) - np.sin(t)) - (np.sin(t) + np.cos(t)) / lam
    assert np.abs(dtr - closed)[5:-5].max() < 1e-3
    S = -standard_j(1) @ C.GROWTH_G
    assert np.allclose(S, S.T) and np.linalg.eigvalsh(S).min() > 0
    tg = C.trace_growth_path(lam, 1)
    r = tg.reports[0]
    assert r.t_max == pytest.approx(np.arctan((lam ** 2 - 1) / (lam ** 2 + 1)))
    assert r.max_trace == pytest.approx(np.sqrt(8.5), abs=1e-10)
    assert r.printed_max == pytest.approx(17.0)


def test_trace_growth_path():
    tg = C.trace_growth_path(2.0, 5, 100)
    maxima = np.array([r.max_trace for r in tg.reports])
    assert np.all(np.diff(maxima) > 0)
    factors = maxima[1:] / maxima[:-1]
    # per-leg factor is sqrt(2 - 4 / T^2), below 1.3 for the first legs and tending to sqrt(2)
    assert np.allclose(factors, np.sqrt(2 - 4 / maxima[:-1] ** 2), atol=1e-10)
    assert factors[0] < 1.3 < factors[-1]
    assert certify_positive(tg.path).verdict == "positive"
    # legs join continuously
    for a, b in zip(tg.legs[:-1], tg.legs[1:]):
        assert np.abs(a.mats[-1] - b.mats[0]).max() < 1e-12


def test_gamma_k():
    m = C.gamma_k(2.0, 0.0)
    assert _symp(m)
    ev = np.sort_complex(np.linalg.eigvals(m))
    assert np.allclose(ev, np.sort_complex(np.array([2j, -2j, 0.5j, -0.5j])))
    with pytest.raises(ValueError):
        C.gamma_k(1.0, 0.0)
    ev1 = np.linalg.eigvals(C.gamma_k(1.0, 0.0, allow_degenerate=True))
    assert np.allclose(np.sort_complex(ev1), [-1j, -1j, 1j, 1j])
    k = 3.0
    assert np.cos(C.gamma_k_exit(k)) ** 2 == pytest.approx(4 * k * k / (1 + k * k) ** 2)


def test_delta_spec():
    spec = C.DeltaPathSpec()
    assert spec.mu(0.5) == pytest.approx(1.0)
    assert spec.x(0.5) == pytest.approx(1.0)
    assert spec.x(1.0) == pytest.approx(spec.a)
    assert spec.mu(spec.eps) == pytest.approx(spec.lam)
    with pytest.raises(ValueError):
        C.DeltaPathSpec(a=0.6, b=0.7)
    with pytest.raises(ValueError):
        C.DeltaPathSpec(eps=0.7)


def test_delta_path_values():
    spec = C.DeltaPathSpec()
    assert np.array_equal(C.delta_path(spec, 0.5), C.n_minus_minus(0.0))
    for s in np.linspace(0, 1, 41):
        assert _symp(C.delta_path(spec, s))
    with pytest.raises(ValueError):
        C.delta_path(spec, 1.5)
    # continuous at s = eps
    assert np.abs(C.delta_path(spec, spec.eps - 1e-9) - C.delta_path(spec, spec.eps)).max() < 1e-7


def test_delta_continuity_at_half():
    spec = C.DeltaPathSpec()
    N = C.n_minus_minus(0.0)
    hs = np.array([1e-2, 1e-3, 1e-4])
    left = np.array([np.abs(C.delta_path(spec, 0.5 - h) - N).max() for h in hs])
    right = np.array([np.abs(C.delta_path(spec, 0.5 + h) - N).max() for h in hs])
    # linear from the left; square-root rate from the right since x(s) = cos of an angle ~ sqrt(h)
    assert np.allclose(left[:-1] / left[1:], 10.0, rtol=0.05)
    assert np.allclose(right[:-1] / right[1:], np.sqrt(10.0), rtol=0.05)


def test_delta_fields():
    P = C.DELTA_P
    assert np.allclose(np.sort(np.linalg.eigvalsh(P)), np.sort([10, 10, 11 - np.sqrt(2), 11 + np.sqrt(2)]))
    q = {1: P[0, 0], 3: P[0, 2], 4: P[0, 3], 6: P[1, 2], 8: P[2, 2]}
    assert q[1] > 0 and q[3] == 0 and q[4] != q[6] and q[1] == q[8]
    spec = C.DeltaPathSpec()
    J = standard_j(2)
    assert np.allclose(C.delta_forward_field(0.3), J @ P @ C.delta_path(spec, 0.3))
    with pytest.raises(ValueError):
        C.delta_backward_field(0.3, np.eye(2))


def _flow_derivative(fun, X, A, h=1e-5):
    return (fun(scipy.linalg.expm(h * X) @ A) - fun(scipy.linalg.expm(-h * X) @ A)) / (2 * h)


def test_delta_backward_directions():
    spec = C.DeltaPathSpec()
    J = standard_j(2)
    X = J @ C.block_diag2(-np.eye(2), -np.eye(2))
    for s in (0.2, 0.3, 0.45):
        A = C.delta_path(spec, s)
        assert np.allclose(C.delta_backward_field(s), X @ A)
        assert _flow_derivative(np.trace, X, A) < 0
    A = C.delta_path(spec, 0.55)
    assert _flow_derivative(boundary_defect, X, A) < 0


def test_p_theta():
    assert np.allclose(C.p_theta(0.0), np.eye(4))
    for a, b in ((0.3, 0.5), (1.0, -2.0)):
        assert np.allclose(C.p_theta(a) @ C.p_theta(b), C.p_theta(a + b))
        assert np.allclose(np.linalg.inv(C.p_theta(a)), C.p_theta(-a))
        assert _symp(C.p_theta(a))
    S = C.p_theta(np.pi / 2)
    assert np.allclose(S, [[0, 0, -1, 0], [0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0]])


@pytest.mark.parametrize("k,l,n", [(1, 1, 3), (2, 1, 5), (2, 2, 4), (3, 2, 7)])
def test_homotopy_H(k, l, n):
    t = np.linspace(0, 2 * np.pi, 33)
    assert np.allclose(C.homotopy_H(0.0, t, k, l, n), C.block_diag2(rotation(k * t), rotation((n - k) * t)))
    assert np.allclose(C.homotopy_H(np.pi / 2, t, k, l, n), C.block_diag2(rotation(l * t), rotation((n - l) * t)))
    for th in (0.0, 0.7, 1.3):
        H = C.homotopy_H(th, t, k, l, n)
        assert np.allclose(H[0], np.eye(4)) and np.allclose(H[-1], np.eye(4))
        assert all(_symp(m) for m in H)


def test_homotopy_R_values():
    R, l1, l2 = C.homotopy_R(0.0, 0.0, 2, 1, 5)
    assert np.allclose(R, np.diag([2, 2, 3, 3]))
    assert (l1, l2) == (3.0, 2.0)
    for th in np.linspace(0, np.pi / 2, 9):
        _, a, b = C.homotopy_R(th, 1.0, 2, 2, 4)
        assert a == pytest.approx(2.0) and b == pytest.approx(2.0)
    with pytest.raises(ValueError):
        C.homotopy_R(0.0, 0.0, 3, 1, 3)
    with pytest.raises(ValueError):
        C.homotopy_H(0.0, 0.0, 0, 1, 5)


def test_homotopy_R_lambda2_minimum():
    # lambda2(theta) = (5 - sqrt(5 - 4 cos 2 theta)) / 2 for (2, 1, 5): largest at 0, smallest at pi/2
    th = np.linspace(0, np.pi / 2, 101)
    l2 = np.array([C.homotopy_R(x, 0.0, 2, 1, 5)[2] for x in th])
    assert np.allclose(l2, 0.5 * (5 - np.sqrt(5 - 4 * np.cos(2 * th))))
    assert l2[0] == pytest.approx(2.0) and l2.min() == pytest.approx(1.0) and np.argmin(l2) == len(th) - 1


def test_homotopy_G():
    t = np.linspace(0, 2 * np.pi, 17)
    assert np.allclose(C.homotopy_G(np.pi / 2, t, 2, 1), C.block_diag2(rotation(t), rotation(2 * t)))
    assert certify_positive(C.homotopy_G_path(np.pi / 3, 2, 1, 200)).verdict == "positive"
    for th in np.linspace(0, np.pi / 2, 5):
        assert maslov_index(C.homotopy_G_path(th, 2, 1, 200)) == 3


@given(st.floats(-3, 3), st.floats(0, 6.3))
def test_outputs_symplectic(theta, t):
    assert _symp(C.homotopy_H(theta, t, 2, 1, 5))
    assert _symp(C.homotopy_G(theta, t, 3, 1))
    assert _symp(C.gamma_k(1.7, t))
    assert _symp(C.rotated_diag(t, 3.0))
    assert _symp(C.p_theta(theta))
