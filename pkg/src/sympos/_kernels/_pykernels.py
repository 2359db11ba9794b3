"""Pure numpy implementations of the batched hot kernels.

Every function takes a stack of real matrices with shape ``(m, d, d)``
(``d`` = 2 or 4) and returns per-sample results.  The compiled module
``_ckernels`` exposes the same names and signatures.
"""
import numpy as np


def _j(d):
    J = np.zeros((d, d))
    for k in range(0, d, 2):
        J[k + 1, k] = 1.0
        J[k, k + 1] = -1.0
    return J


def symplectic_defects(mats):
    """Max-norm of ``M^T J M - J`` for each matrix of the stack."""
    mats = np.asarray(mats, dtype=float)
    J = _j(mats.shape[-1])
    r = np.swapaxes(mats, -1, -2) @ J @ mats - J
    return np.abs(r).max(axis=(-2, -1))


def sigma_pairs(mats):
    """Trace and sum of principal 2x2 minors, shape ``(m, 2)``."""
    mats = np.asarray(mats, dtype=float)
    s1 = np.trace(mats, axis1=-2, axis2=-1)
    s2 = 0.5 * (s1 * s1 - np.einsum("mij,mji->m", mats, mats))
    return np.stack([s1, s2], axis=-1)


def _pair_from_s(s, edge_tol):
    """Roots of ``x^2 - s x + 1`` for an array of (possibly complex) ``s``.

    Returns ``(big, small)`` with ``|big| >= 1``; on the circle ``big`` is the
    root with nonnegative imaginary part.
    """
    s = np.asarray(s, dtype=complex)
    out1 = np.empty_like(s)
    out2 = np.empty_like(s)
    real = np.abs(s.imag) == 0.0
    sr = s.real
    t = sr * sr - 4.0
    snap = real & (np.abs(t) <= edge_tol * np.maximum(1.0, sr * sr))
    t = np.where(snap, 0.0, t)
    circ = real & (t <= 0.0)
    hyp = real & (t > 0.0)
    w = np.sqrt(np.where(circ, -t, 0.0))
    out1[circ] = 0.5 * (sr[circ] + 1j * w[circ])
    out2[circ] = 0.5 * (sr[circ] - 1j * w[circ])
    w = np.sqrt(np.where(hyp, t, 0.0))
    big = 0.5 * (sr + np.sign(sr) * w)
    out1[hyp] = big[hyp]
    out2[hyp] = 1.0 / big[hyp]
    cplx = ~real
    if cplx.any():
        sc = s[cplx]
        r = np.sqrt(sc * sc - 4.0)
        a = 0.5 * (sc + r)
        b = 0.5 * (sc - r)
        swap = np.abs(a) < np.abs(b)
        a, b = np.where(swap, b, a), np.where(swap, a, b)
        out1[cplx] = a
        out2[cplx] = 1.0 / a
    return out1, out2


def reciprocal_spectra(mats, disc_tol=1e-10, edge_tol=1e-9):
    """Eigenvalues through the substitution ``s = x + 1/x``.

    Returns ``(s_roots, eigvals)``; ``s_roots`` has shape ``(m, n)`` and
    ``eigvals`` shape ``(m, 2n)`` ordered as (big, small) per ``s`` root.
    A discriminant within ``disc_tol`` (relative) is snapped to zero, and
    ``s^2 - 4`` within ``edge_tol`` is snapped so that eigenvalues at
    +-1 come out exactly double.
    """
    mats = np.asarray(mats, dtype=float)
    m, d = mats.shape[0], mats.shape[-1]
    if d == 2:
        s = np.trace(mats, axis1=-2, axis2=-1).astype(complex)[:, None]
    else:
        sig = sigma_pairs(mats)
        s1, s2 = sig[:, 0], sig[:, 1] - 2.0
        disc = s1 * s1 - 4.0 * s2
        scale = np.maximum(1.0, np.maximum(s1 * s1, np.abs(s2)))
        disc = np.where(np.abs(disc) <= disc_tol * scale, 0.0, disc)
        s = np.empty((m, 2), dtype=complex)
        pos = disc >= 0.0
        r = np.sqrt(np.abs(disc))
        s[:, 0] = np.where(pos, 0.5 * (s1 + r), 0.5 * s1 + 0.5j * r)
        s[:, 1] = np.where(pos, 0.5 * (s1 - r), 0.5 * s1 - 0.5j * r)
    lam = np.empty((m, d), dtype=complex)
    for k in range(s.shape[1]):
        a, b = _pair_from_s(s[:, k], edge_tol)
        lam[:, 2 * k] = a
        lam[:, 2 * k + 1] = b
    return s, lam


def _to_complex_det(U):
    d = U.shape[-1]
    # a 2x2 block [[a, -b], [b, a]] is multiplication by a + ib
    C = U[:, 0::2, 0::2] + 1j * U[:, 1::2, 0::2]
    if d == 2:
        return C[:, 0, 0]
    return C[:, 0, 0] * C[:, 1, 1] - C[:, 0, 1] * C[:, 1, 0]


def unitary_phases(mats):
    """Complex determinant of the orthogonal polar factor of each matrix."""
    mats = np.asarray(mats, dtype=float)
    W, _, Vh = np.linalg.svd(mats)
    rho = _to_complex_det(W @ Vh)
    return rho / np.abs(rho)


def generator_matrices(vel, mats):
    """``P = -J A' A^{-1}`` using the symplectic inverse ``A^{-1} = -J A^T J``."""
    vel = np.asarray(vel, dtype=float)
    mats = np.asarray(mats, dtype=float)
    J = _j(mats.shape[-1])
    inv = -J @ np.swapaxes(mats, -1, -2) @ J
    return -J @ vel @ inv


def pd_margins(P):
    """Symmetry defect, smallest and largest-magnitude eigenvalue of sym(P)."""
    P = np.asarray(P, dtype=float)
    Pt = np.swapaxes(P, -1, -2)
    defect = np.abs(P - Pt).max(axis=(-2, -1))
    w = np.linalg.eigvalsh(0.5 * (P + Pt))
    return defect, w[:, 0], np.abs(w).max(axis=-1)
