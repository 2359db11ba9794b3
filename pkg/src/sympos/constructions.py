"""Explicit positive paths, vector fields and homotopies in Sp(2) and Sp(4).

Matrix-valued functions accept a scalar or an array of times and return a
single matrix or a stack accordingly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .core import (
    as_array,
    block_diag2,
    matrix_exponential,
    rotation,
    standard_j,
    symplectic_inverse,
)
from .paths import SampledPath, _as_times, integrate_field

TWO_PI = 2.0 * np.pi

# positive definite matrix of the B_U / B_R field along Delta^s
DELTA_P = np.array(
    [
        [10.0, 0.0, 0.0, 1.0],
        [0.0, 10.0, 0.0, 0.0],
        [0.0, 0.0, 10.0, 0.0],
        [1.0, 0.0, 0.0, 12.0],
    ]
)
DELTA_P.setflags(write=False)

# generator of the trace-growth legs: G = J S with S = [[2, -1], [-1, 1]]
GROWTH_G = np.array([[1.0, -1.0], [2.0, -1.0]])
GROWTH_G.setflags(write=False)


def _squeeze(out, t):
    return out[0] if np.ndim(t) == 0 else out


def n_minus_minus(y: float = 0.0) -> np.ndarray:
    """``diag(B, B)`` with ``B = [[1+y, 1], [0, 1/(1+y)]]``; ``y = 0`` gives N1^{-,-}."""
    b = np.array([[1.0 + y, 1.0], [0.0, 1.0 / (1.0 + y)]])
    return block_diag2(b, b)


# ----------------------------------------------------------------- Sp(2n)


def rotation_matrix(t, k: float = 1.0, half_dim: int = 1):
    """``exp(J k t)`` for ``J = diag(j, ..., j)``."""
    r = rotation(k * np.asarray(t, dtype=float))
    return r if half_dim == 1 else block_diag2(r, r)


def rotation_loop(k: int = 1, K=None, samples: int = 200, half_dim: int | None = None) -> SampledPath:
    """Loop ``t -> exp(J k t) K`` on ``[0, 2 pi]``; its generator is ``P = k I``."""
    if k < 1 or int(k) != k:
        raise ValueError("k must be a positive integer")
    if K is None:
        K = np.eye(2 * (half_dim or 1))
    K = as_array(K)
    n = K.shape[0] // 2
    J = standard_j(n)

    def func(t):
        return rotation_matrix(_as_times(t), k, n) @ K

    def gen(t):
        return np.broadcast_to(k * J, (_as_times(t).size, 2 * n, 2 * n)).copy()

    return SampledPath.from_function(func, 0.0, TWO_PI, samples, generator=gen, is_loop=True)


def diag_rotation_loop(k: int, l: int, samples: int = 400) -> SampledPath:
    """``diag(exp(j k t), exp(j l t))`` on ``[0, 2 pi]``."""
    J2 = standard_j(1)

    def func(t):
        t = _as_times(t)
        return block_diag2(rotation(k * t), rotation(l * t))

    def gen(t):
        g = block_diag2(k * J2, l * J2)
        return np.broadcast_to(g, (_as_times(t).size, 4, 4)).copy()

    return SampledPath.from_function(func, 0.0, TWO_PI, samples, generator=gen, is_loop=True)


def rotated_diag(t, beta: float):
    """``exp(j t) diag(beta, 1/beta)``."""
    return rotation(t) @ np.diag([beta, 1.0 / beta])


def simple_real_path(alpha: float, beta: float, samples: int = 200) -> SampledPath:
    """Reparametrized piece of ``exp(j t) diag(b, 1/b)`` moving along the real axis.

    With ``b = max(alpha, beta)`` the trace ``(b + 1/b) cos t`` decreases
    on ``[0, pi]``, so the segment where the large eigenvalue runs from
    ``b`` down to ``min(alpha, beta)`` embeds ``[0, 1]`` monotonically.
    The reparametrization ``u -> t(u)`` is affine and increasing, so the
    path is positive in both directions: for ``alpha < beta`` it uses the
    segment ``t in [-t_end, 0]`` where the coordinate increases.
    """
    for v in (alpha, beta):
        if v <= 1.0:
            raise ValueError("alpha and beta must exceed 1")
    if alpha == beta:
        raise ValueError("alpha and beta must differ")
    big, small = max(alpha, beta), min(alpha, beta)
    t_end = float(np.arccos((small + 1.0 / small) / (big + 1.0 / big)))
    J = standard_j(1)

    def tau(u):
        u = _as_times(u)
        return t_end * u if alpha > beta else -t_end * (1.0 - u)

    def func(u):
        return rotated_diag(tau(u), big)

    def gen(u):
        return np.broadcast_to(t_end * J, (_as_times(u).size, 2, 2)).copy()

    return SampledPath.from_function(func, 0.0, 1.0, samples, generator=gen)


def eigenbasis2(a) -> tuple[np.ndarray, float]:
    """``B`` with ``det B = 1`` and ``a = B diag(lam, 1/lam) B^{-1}``, ``|lam| > 1``."""
    a = as_array(a)
    tr = a[0, 0] + a[1, 1]
    if abs(tr) <= 2.0:
        raise ValueError("matrix is not hyperbolic")
    w = np.sqrt(tr * tr - 4.0)
    lam = 0.5 * (tr + np.sign(tr) * w)
    cols = []
    for x in (lam, 1.0 / lam):
        b = a - x * np.eye(2)
        r = b[0] if np.abs(b[0]).sum() >= np.abs(b[1]).sum() else b[1]
        v = np.array([-r[1], r[0]])
        cols.append(v / np.linalg.norm(v))
    B = np.column_stack(cols)
    det = np.linalg.det(B)
    if det < 0:
        B[:, 1] = -B[:, 1]
        det = -det
    B = B / np.sqrt(det)
    return B, float(lam)


def eigenline_gap(a) -> float:
    """Counterclockwise angle in ``(0, pi)`` from the ``lam`` line to the ``1/lam`` line.

    Along any positive path inside a hyperbolic conjugacy class this
    angle strictly decreases (the ``lam`` line turns counterclockwise and
    the ``1/lam`` line clockwise), so it is a monotone quantity for such
    flows.
    """
    B, _ = eigenbasis2(a)
    p1 = np.arctan2(B[1, 0], B[0, 0])
    p2 = np.arctan2(B[1, 1], B[0, 1])
    return float(np.mod(p2 - p1, np.pi))


def conj_class_flow(A, M, T: float = 1.0, samples: int = 200, check_cone: bool = True) -> SampledPath:
    """Path ``exp(M t) A exp(-M t)`` on ``[0, T]``.

    For diagonal ``A`` the path is positive exactly when ``b, c > 0`` in
    ``M = [[a, b], [c, -a]]``; in general the condition applies to
    ``B^{-1} M B`` with ``B`` the eigenbasis of ``A``.
    """
    A = as_array(A)
    M = np.asarray(M, dtype=float)
    if A.shape != (2, 2) or abs(A[0, 0] + A[1, 1]) <= 2.0:
        raise ValueError("A must be a hyperbolic element of Sp(2)")
    if abs(M[0, 0] + M[1, 1]) > 1e-14:
        raise ValueError("M must be traceless")
    if check_cone:
        B, _ = eigenbasis2(A)
        Mb = np.linalg.solve(B, M @ B)
        if Mb[0, 1] <= 0 or Mb[1, 0] <= 0:
            raise ValueError("off-diagonal entries of M (in the eigenbasis of A) must be positive")

    def func(t):
        t = _as_times(t)
        E = np.array([matrix_exponential(M, x) for x in t])
        Ei = np.array([matrix_exponential(M, -x) for x in t])
        return E @ A @ Ei

    def gen(t):
        # X = M - exp(Mt) A M A^{-1} exp(-Mt)
        t = _as_times(t)
        Ai = symplectic_inverse(A)
        E = np.array([matrix_exponential(M, x) for x in t])
        Ei = np.array([matrix_exponential(M, -x) for x in t])
        return M - E @ (A @ M @ Ai) @ Ei

    return SampledPath.from_function(func, 0.0, T, samples, generator=gen)


def cone_in_class(B, lam: float, x: float, z: float) -> np.ndarray:
    """Tangent vector ``B [[0, -z lam], [x / lam, 0]] B^{-1}`` at ``B diag(lam, 1/lam) B^{-1}``."""
    if x <= 0 or z <= 0:
        raise ValueError("x and z must be positive")
    if abs(lam) <= 1:
        raise ValueError("|lam| must exceed 1")
    B = as_array(B)
    return B @ np.array([[0.0, -z * lam], [x / lam, 0.0]]) @ symplectic_inverse(B)


def tangent_generator(vector, point) -> np.ndarray:
    """``P = -J V A^{-1}`` for a tangent vector ``V`` at ``A``."""
    point = as_array(point)
    J = standard_j(point.shape[0] // 2)
    return -J @ np.asarray(vector, dtype=float) @ symplectic_inverse(point)


# ------------------------------------------------------------ trace growth


@dataclass
class LegReport:
    index: int
    lam: float
    t_max: float
    max_trace: float
    derived_max: float
    printed_max: float
    end_gap: float


@dataclass
class TraceGrowth:
    path: SampledPath
    legs: list = field(default_factory=list)
    reports: list = field(default_factory=list)


def growth_leg_max(lam: float) -> float:
    """Amplitude ``sqrt(2 (lam^2 + lam^-2))`` of the trace along ``exp(G t) diag(lam, 1/lam)``."""
    return float(np.sqrt(2.0 * (lam * lam + lam ** -2)))


def trace_growth_path(lam0: float = 2.0, legs: int = 3, samples_per_leg: int = 200) -> TraceGrowth:
    """Concatenated positive legs along which the trace keeps increasing.

    Leg ``i`` is ``C_i exp(G t) diag(lam_i, 1/lam_i) C_i^{-1}`` on
    ``[0, t_i]`` with ``t_i = arctan((lam_i^2 - 1) / (lam_i^2 + 1))``, the
    point of maximal trace.  ``C_i`` is the eigenbasis of the previous
    leg's endpoint, so the legs join continuously; conjugating the leg
    keeps it positive and leaves the trace unchanged.  The returned path
    has a piecewise-constant generator.
    """
    if lam0 <= 1.0:
        raise ValueError("lam0 must exceed 1")
    if legs < 1:
        raise ValueError("legs must be at least 1")
    C = np.eye(2)
    lam = float(lam0)
    t_off = 0.0
    out = TraceGrowth(path=None)
    pieces = []
    for i in range(legs):
        D = np.diag([lam, 1.0 / lam])
        t_max = float(np.arctan((lam * lam - 1.0) / (lam * lam + 1.0)))
        Ci = symplectic_inverse(C)
        X = C @ GROWTH_G @ Ci

        def func(t, C=C, Ci=Ci, D=D, t0=t_off):
            t = _as_times(t) - t0
            E = np.array([matrix_exponential(GROWTH_G, x) for x in t])
            return C @ E @ D @ Ci

        def gen(t, X=X):
            return np.broadcast_to(X, (_as_times(t).size, 2, 2)).copy()

        leg = SampledPath.from_function(func, t_off, t_off + t_max, samples_per_leg, generator=gen)
        # measured on the constructed leg, continued past its end
        res = minimize_scalar(
            lambda x, f=func: -np.trace(f(x)[0]),
            bounds=(t_off, t_off + 2.0 * t_max),
            method="bounded",
            options={"xatol": 1e-12},
        )
        end = leg.mats[-1]
        out.reports.append(
            LegReport(
                index=i,
                lam=lam,
                t_max=t_max,
                max_trace=float(-res.fun),
                derived_max=growth_leg_max(lam),
                printed_max=2.0 * lam ** 3 + 2.0 / lam,
                end_gap=eigenline_gap(end),
            )
        )
        out.legs.append(leg)
        pieces.append(leg)
        C, lam = eigenbasis2(end)
        t_off += t_max
    times = np.concatenate([pieces[0].times] + [p.times[1:] for p in pieces[1:]])
    mats = np.concatenate([pieces[0].mats] + [p.mats[1:] for p in pieces[1:]])
    bounds = np.array([p.times[-1] for p in pieces[:-1]])
    gens = [p.generator for p in pieces]
    funcs = [p.func for p in pieces]

    def which(t):
        return np.clip(np.searchsorted(bounds, t, side="right"), 0, len(pieces) - 1)

    def gen_all(t):
        t = _as_times(t)
        k = which(t)
        return np.array([gens[j](x)[0] for j, x in zip(k, t)])

    def func_all(t):
        t = _as_times(t)
        k = which(t)
        return np.array([funcs[j](x)[0] for j, x in zip(k, t)])

    out.path = SampledPath(times, mats, generator=gen_all, func=func_all)
    return out


# -------------------------------------------------------------------- gamma_k


def gamma_k(k: float, r, allow_degenerate: bool = False):
    """``exp(J r) X_k`` with ``X_k`` the anti-diagonal block matrix of ``k``, ``1/k``."""
    if k <= 1.0 and not (allow_degenerate and k > 0):
        raise ValueError("k must exceed 1 (pass allow_degenerate for k <= 1)")
    X = np.array(
        [
            [0.0, 0.0, k, 0.0],
            [0.0, 0.0, 0.0, 1.0 / k],
            [-k, 0.0, 0.0, 0.0],
            [0.0, -1.0 / k, 0.0, 0.0],
        ]
    )
    return _squeeze(rotation_matrix(_as_times(r), 1.0, 2) @ X, r)


def gamma_k_exit(k: float) -> float:
    """``r* = arccos(2k / (1 + k^2))``, so ``cos^2 r* = 4k^2 / (1 + k^2)^2``."""
    return float(np.arccos(2.0 * k / (1.0 + k * k)))


def gamma_k_path(k: float, r0: float, r1: float, samples: int = 200) -> SampledPath:
    J = standard_j(2)

    def gen(t):
        return np.broadcast_to(J, (_as_times(t).size, 4, 4)).copy()

    return SampledPath.from_function(lambda r: gamma_k(k, _as_times(r)), r0, r1, samples, generator=gen)


# --------------------------------------------------------------------- Delta


@dataclass(frozen=True)
class DeltaPathSpec:
    """Parameters of the boundary path Delta^s.

    ``lam > 1`` is the double real eigenvalue at ``s = eps``; ``a + b i``
    the double circle eigenvalue at ``s = 1``.
    """

    lam: float = 2.0
    a: float = 0.6
    b: float = 0.8
    eps: float = 0.1

    def __post_init__(self):
        if self.lam <= 1:
            raise ValueError("lam must exceed 1")
        if abs(self.a * self.a + self.b * self.b - 1.0) > 1e-12:
            raise ValueError("a^2 + b^2 must equal 1")
        if not 0.0 < self.eps < 0.5:
            raise ValueError("eps must lie in (0, 1/2)")
        if not -1.0 < self.a < 1.0:
            raise ValueError("a must lie in (-1, 1)")

    def mu(self, s):
        return (self.lam - 1.0) / (self.eps - 0.5) * (np.asarray(s) - 0.5) + 1.0

    def x(self, s):
        return 2.0 - self.a + (2.0 * self.a - 2.0) * np.asarray(s)


def _delta_one(spec: DeltaPathSpec, s: float) -> np.ndarray:
    if s < 0.0 or s > 1.0:
        raise ValueError("s must lie in [0, 1]")
    if s > 0.5:
        x = float(spec.x(s))
        c = np.sqrt(max(0.0, 1.0 - x * x))
        N = np.array([[1.0, 1.0], [0.0, 1.0]])
        return np.block([[x * N, c * N], [-c * N, x * N]])
    if s == 0.5:
        return n_minus_minus(0.0)
    if s >= spec.eps:
        mu = float(spec.mu(s))
        blk = np.array([[mu, 1.0], [0.0, 1.0 / mu]])
        return block_diag2(blk, blk)
    # s < eps: Jordan-type (B_R) segment ending at the diagonalizable Delta^eps
    lam = spec.lam
    tau = (spec.eps - s) / spec.eps
    D = np.diag([lam, 1.0 / lam, lam, 1.0 / lam])
    D[0, 2] = tau * lam
    D[3, 1] = -tau / lam
    w = np.array([[1.0, 1.0 / (1.0 / lam - lam)], [0.0, 1.0]])
    W = block_diag2(w, w)
    return W @ D @ np.linalg.inv(W)


def delta_path(spec: DeltaPathSpec, s):
    """Delta^s: B_R for ``s < eps``, double real pairs up to ``s = 1/2``,
    N1^{-,-} at ``s = 1/2`` and a double circle Jordan pair beyond."""
    out = np.array([_delta_one(spec, float(x)) for x in _as_times(s)])
    return _squeeze(out, s)


def delta_forward_field(s, spec: DeltaPathSpec = DeltaPathSpec(), P0=None):
    """Positive vector ``J P Delta^s``.

    For ``s < eps`` the generator is interpolated linearly from ``P0``
    (default ``P`` itself) at ``s = 0`` to ``P`` at ``s = eps``.
    """
    J = standard_j(2)
    s = float(s)
    P = DELTA_P
    if s < spec.eps and P0 is not None:
        u = s / spec.eps
        P = (1.0 - u) * np.asarray(P0, dtype=float) + u * DELTA_P
    return J @ P @ delta_path(spec, s)


def delta_backward_field(s, Q2=None, spec: DeltaPathSpec = DeltaPathSpec()):
    """Negative vector ``J Q4 Delta^s`` with ``Q4 = diag(Q2, Q2)``; ``Q2`` defaults to ``-I``."""
    Q2 = -np.eye(2) if Q2 is None else np.asarray(Q2, dtype=float)
    if Q2.shape != (2, 2) or np.abs(Q2 - Q2.T).max() > 1e-14:
        raise ValueError("Q2 must be a symmetric 2x2 matrix")
    if np.linalg.eigvalsh(Q2).max() >= 0:
        raise ValueError("Q2 must be negative definite")
    J = standard_j(2)
    return J @ block_diag2(Q2, Q2) @ delta_path(spec, float(s))


# ----------------------------------------------------------------- homotopies


def p_theta(theta):
    """``[[cos I, -sin I], [sin I, cos I]]`` (2x2 identity blocks)."""
    th = np.asarray(theta, dtype=float)
    c, s = np.cos(th), np.sin(th)
    out = np.zeros(th.shape + (4, 4))
    for k in range(2):
        out[..., k, k] = c
        out[..., 2 + k, 2 + k] = c
        out[..., k, 2 + k] = -s
        out[..., 2 + k, k] = s
    return out


def _check_hkln(k, l, n):
    if k < 1 or l < 1:
        raise ValueError("k and l must be at least 1")
    if n < 3 or n <= k or n <= l:
        raise ValueError("need n >= 3, n > k and n > l")


def homotopy_H(theta, t, k: int, l: int, n: int):
    """``diag(e^{jt}, e^{jrt}) P_theta diag(e^{j(k-1)t}, e^{j(l-1)t}) P_theta^{-1}``, ``r = 1+n-k-l``."""
    _check_hkln(k, l, n)
    r = 1 + n - k - l
    tt = _as_times(t)
    P = p_theta(theta)
    Pi = p_theta(-np.asarray(theta, dtype=float))
    left = block_diag2(rotation(tt), rotation(r * tt))
    mid = block_diag2(rotation((k - 1) * tt), rotation((l - 1) * tt))
    return _squeeze(left @ P @ mid @ Pi, t)


def homotopy_R(theta, t, k: int, l: int, n: int):
    """Closed-form generator ``R`` of ``H(theta, .)`` and its double eigenvalues.

    Returns ``(R, lam1, lam2)`` with ``lam1 >= lam2``.
    """
    _check_hkln(k, l, n)
    r = 1 + n - k - l
    theta = float(theta)
    c, s = np.cos(theta), np.sin(theta)
    tt = _as_times(t)
    top = 1 + (k - 1) * c * c + (l - 1) * s * s
    bot = r + (k - 1) * s * s + (l - 1) * c * c
    off = c * s * (k - l)
    R = np.zeros((tt.size, 4, 4))
    R[:, 0, 0] = R[:, 1, 1] = top
    R[:, 2, 2] = R[:, 3, 3] = bot
    R[:, :2, 2:] = off * rotation((1 - r) * tt)
    R[:, 2:, :2] = off * rotation((r - 1) * tt)
    disc = (k - l) ** 2 + 2 * np.cos(2 * theta) * (k - l) * (1 - r) + (1 - r) ** 2
    root = np.sqrt(max(disc, 0.0))
    return _squeeze(R, t), 0.5 * (n + root), 0.5 * (n - root)


def homotopy_H_path(theta, k, l, n, samples: int = 400) -> SampledPath:
    J = standard_j(2)

    def gen(t):
        R, _, _ = homotopy_R(theta, _as_times(t), k, l, n)
        return J @ R

    return SampledPath.from_function(
        lambda t: homotopy_H(theta, _as_times(t), k, l, n), 0.0, TWO_PI, samples, generator=gen, is_loop=True
    )


def homotopy_G(theta, t, k: int, l: int):
    """``P_theta diag(e^{jkt}, e^{jlt}) P_theta^{-1}``."""
    if k < 1 or l < 1:
        raise ValueError("k and l must be at least 1")
    tt = _as_times(t)
    P = p_theta(theta)
    Pi = p_theta(-np.asarray(theta, dtype=float))
    return _squeeze(P @ block_diag2(rotation(k * tt), rotation(l * tt)) @ Pi, t)


def homotopy_G_path(theta, k, l, samples: int = 400) -> SampledPath:
    J2 = standard_j(1)
    P = p_theta(theta)
    X = P @ block_diag2(k * J2, l * J2) @ p_theta(-theta)

    def gen(t):
        return np.broadcast_to(X, (_as_times(t).size, 4, 4)).copy()

    return SampledPath.from_function(
        lambda t: homotopy_G(theta, _as_times(t), k, l), 0.0, TWO_PI, samples, generator=gen, is_loop=True
    )
