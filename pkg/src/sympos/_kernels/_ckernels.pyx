# cython: language_level=3
"""Compiled batched kernels for 2x2 and 4x4 real symplectic stacks.

Same names and return conventions as ``_pykernels``.  Everything is written
with fixed-size loops; the polar factor uses a scaled Newton iteration and
the symmetric eigenvalues a cyclic Jacobi sweep.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, hypot

cnp.import_array()


cdef inline double jent(int i, int k) noexcept nogil:
    # entry (i, k) of diag(j, ..., j), j = [[0, -1], [1, 0]]
    if (i >> 1) != (k >> 1):
        return 0.0
    if i == k:
        return 0.0
    return 1.0 if (i & 1) else -1.0


def symplectic_defects(double[:, :, ::1] mats):
    cdef Py_ssize_t m = mats.shape[0], d = mats.shape[1]
    cdef Py_ssize_t s, a, b, i
    cdef double acc, best, v
    out = np.empty(m)
    cdef double[::1] o = out
    with nogil:
        for s in range(m):
            best = 0.0
            for a in range(d):
                for b in range(d):
                    # (M^T J M)_{ab} = sum_{i even} M[i,a] M[i+1,b] - M[i+1,a] M[i,b]
                    acc = 0.0
                    i = 0
                    while i < d:
                        acc = acc + mats[s, i + 1, a] * mats[s, i, b] - mats[s, i, a] * mats[s, i + 1, b]
                        i = i + 2
                    v = fabs(acc - jent(a, b))
                    if v > best:
                        best = v
            o[s] = best
    return out


def sigma_pairs(double[:, :, ::1] mats):
    cdef Py_ssize_t m = mats.shape[0], d = mats.shape[1]
    cdef Py_ssize_t s, i, k
    cdef double tr, tr2
    out = np.empty((m, 2))
    cdef double[:, ::1] o = out
    with nogil:
        for s in range(m):
            tr = 0.0
            tr2 = 0.0
            for i in range(d):
                tr = tr + mats[s, i, i]
                for k in range(d):
                    tr2 = tr2 + mats[s, i, k] * mats[s, k, i]
            o[s, 0] = tr
            o[s, 1] = 0.5 * (tr * tr - tr2)
    return out


cdef inline void csqrt(double re, double im, double* ore, double* oim) noexcept nogil:
    cdef double r, t
    if re == 0.0 and im == 0.0:
        ore[0] = 0.0
        oim[0] = 0.0
        return
    r = hypot(re, im)
    if re >= 0.0:
        t = sqrt(0.5 * (r + re))
        ore[0] = t
        oim[0] = 0.5 * im / t
    else:
        t = sqrt(0.5 * (r - re))
        ore[0] = 0.5 * fabs(im) / t
        oim[0] = t if im >= 0.0 else -t


cdef void pair_from_s(double sre, double sim, double edge_tol,
                      double complex* big, double complex* small) noexcept nogil:
    cdef double t, w, b, rre, rim, are, aim, bre, bim, na, nb, den
    if sim == 0.0:
        t = sre * sre - 4.0
        if fabs(t) <= edge_tol * (sre * sre if sre * sre > 1.0 else 1.0):
            t = 0.0
        if t <= 0.0:
            w = sqrt(-t)
            big[0] = 0.5 * sre + 0.5j * w
            small[0] = 0.5 * sre - 0.5j * w
        else:
            w = sqrt(t)
            b = 0.5 * (sre + w) if sre > 0.0 else 0.5 * (sre - w)
            big[0] = b
            small[0] = 1.0 / b
        return
    # complex s: roots (s +- sqrt(s^2 - 4)) / 2
    csqrt(sre * sre - sim * sim - 4.0, 2.0 * sre * sim, &rre, &rim)
    are = 0.5 * (sre + rre)
    aim = 0.5 * (sim + rim)
    bre = 0.5 * (sre - rre)
    bim = 0.5 * (sim - rim)
    na = are * are + aim * aim
    nb = bre * bre + bim * bim
    if na < nb:
        are, bre = bre, are
        aim, bim = bim, aim
        na = nb
    big[0] = are + 1j * aim
    small[0] = are / na - 1j * aim / na


def reciprocal_spectra(double[:, :, ::1] mats, double disc_tol=1e-10, double edge_tol=1e-9):
    cdef Py_ssize_t m = mats.shape[0], d = mats.shape[1]
    cdef Py_ssize_t s, i, k, n = d // 2
    cdef double s1, s2, tr2, disc, scale, r
    cdef double complex big, small
    sroots = np.empty((m, n), dtype=complex)
    lam = np.empty((m, d), dtype=complex)
    cdef double complex[:, ::1] so = sroots
    cdef double complex[:, ::1] lo = lam
    with nogil:
        for s in range(m):
            if d == 2:
                s1 = mats[s, 0, 0] + mats[s, 1, 1]
                so[s, 0] = s1
                pair_from_s(s1, 0.0, edge_tol, &big, &small)
                lo[s, 0] = big
                lo[s, 1] = small
                continue
            s1 = 0.0
            tr2 = 0.0
            for i in range(d):
                s1 = s1 + mats[s, i, i]
                for k in range(d):
                    tr2 = tr2 + mats[s, i, k] * mats[s, k, i]
            s2 = 0.5 * (s1 * s1 - tr2) - 2.0
            disc = s1 * s1 - 4.0 * s2
            scale = s1 * s1
            if fabs(s2) > scale:
                scale = fabs(s2)
            if scale < 1.0:
                scale = 1.0
            if fabs(disc) <= disc_tol * scale:
                disc = 0.0
            if disc >= 0.0:
                r = sqrt(disc)
                so[s, 0] = 0.5 * (s1 + r)
                so[s, 1] = 0.5 * (s1 - r)
                pair_from_s(0.5 * (s1 + r), 0.0, edge_tol, &big, &small)
                lo[s, 0] = big
                lo[s, 1] = small
                pair_from_s(0.5 * (s1 - r), 0.0, edge_tol, &big, &small)
                lo[s, 2] = big
                lo[s, 3] = small
            else:
                r = sqrt(-disc)
                so[s, 0] = 0.5 * s1 + 0.5j * r
                so[s, 1] = 0.5 * s1 - 0.5j * r
                pair_from_s(0.5 * s1, 0.5 * r, edge_tol, &big, &small)
                lo[s, 0] = big
                lo[s, 1] = small
                pair_from_s(0.5 * s1, -0.5 * r, edge_tol, &big, &small)
                lo[s, 2] = big
                lo[s, 3] = small
    return sroots, lam


cdef int invert4(double* a, double* inv, int d) noexcept nogil:
    # Gauss-Jordan with partial pivoting on a d x d row-major copy
    cdef double w[32]
    cdef int i, k, c, p
    cdef double piv, f, t
    for i in range(d):
        for k in range(d):
            w[i * 2 * d + k] = a[i * d + k]
            w[i * 2 * d + d + k] = 1.0 if i == k else 0.0
    for c in range(d):
        p = c
        for i in range(c + 1, d):
            if fabs(w[i * 2 * d + c]) > fabs(w[p * 2 * d + c]):
                p = i
        if w[p * 2 * d + c] == 0.0:
            return -1
        if p != c:
            for k in range(2 * d):
                t = w[c * 2 * d + k]
                w[c * 2 * d + k] = w[p * 2 * d + k]
                w[p * 2 * d + k] = t
        piv = w[c * 2 * d + c]
        for k in range(2 * d):
            w[c * 2 * d + k] = w[c * 2 * d + k] / piv
        for i in range(d):
            if i != c:
                f = w[i * 2 * d + c]
                if f != 0.0:
                    for k in range(2 * d):
                        w[i * 2 * d + k] = w[i * 2 * d + k] - f * w[c * 2 * d + k]
    for i in range(d):
        for k in range(d):
            inv[i * d + k] = w[i * 2 * d + d + k]
    return 0


def unitary_phases(double[:, :, ::1] mats):
    cdef Py_ssize_t m = mats.shape[0], d = mats.shape[1]
    cdef Py_ssize_t s
    cdef int i, k, it
    cdef double u[16]
    cdef double inv[16]
    cdef double nu, ni, zeta, diff, v, a, b
    cdef double complex c00, c01, c10, c11, rho
    out = np.empty(m, dtype=complex)
    cdef double complex[::1] o = out
    with nogil:
        for s in range(m):
            if d == 2:
                # polar factor of a 2x2 matrix with positive determinant is
                # proportional to A + det(A) A^{-T}
                a = mats[s, 0, 0] + mats[s, 1, 1]
                b = mats[s, 1, 0] - mats[s, 0, 1]
                v = hypot(a, b)
                o[s] = a / v + 1j * (b / v)
                continue
            for i in range(d):
                for k in range(d):
                    u[i * d + k] = mats[s, i, k]
            for it in range(100):
                if invert4(u, inv, <int>d) != 0:
                    break
                nu = 0.0
                ni = 0.0
                for i in range(d * d):
                    nu = nu + u[i] * u[i]
                    ni = ni + inv[i] * inv[i]
                zeta = sqrt(sqrt(ni / nu))
                diff = 0.0
                for i in range(d):
                    for k in range(d):
                        # U <- (zeta U + U^{-T} / zeta) / 2
                        v = 0.5 * (zeta * u[i * d + k] + inv[k * d + i] / zeta)
                        diff = diff + (v - u[i * d + k]) * (v - u[i * d + k])
                        u[i * d + k] = v
                if diff < 1e-30:
                    break
            c00 = u[0] + 1j * u[4]
            c01 = u[2] + 1j * u[6]
            c10 = u[8] + 1j * u[12]
            c11 = u[10] + 1j * u[14]
            rho = c00 * c11 - c01 * c10
            v = hypot(rho.real, rho.imag)
            o[s] = rho / v
    return out


def generator_matrices(double[:, :, ::1] vel, double[:, :, ::1] mats):
    cdef Py_ssize_t m = mats.shape[0], d = mats.shape[1]
    cdef Py_ssize_t s, i, k, l
    cdef double inv[16]
    cdef double jv[16]
    cdef double acc
    out = np.empty((m, d, d))
    cdef double[:, :, ::1] o = out
    with nogil:
        for s in range(m):
            # A^{-1} = -J A^T J; J[i, i^1] is the only nonzero in row i
            for i in range(d):
                for k in range(d):
                    inv[i * d + k] = -jent(<int>i, <int>(i ^ 1)) * mats[s, k ^ 1, i ^ 1] * jent(<int>(k ^ 1), <int>k)
            # -J vel
            for i in range(d):
                for k in range(d):
                    jv[i * d + k] = -jent(<int>i, <int>(i ^ 1)) * vel[s, i ^ 1, k]
            for i in range(d):
                for k in range(d):
                    acc = 0.0
                    for l in range(d):
                        acc = acc + jv[i * d + l] * inv[l * d + k]
                    o[s, i, k] = acc
    return out


cdef void jacobi_eigs(double* a, int d, double* w) noexcept nogil:
    # cyclic Jacobi on a symmetric d x d row-major matrix, eigenvalues into w
    cdef int sweep, p, q, k
    cdef double off, theta, t, c, sn, app, aqq, apq, akp, akq, tot
    for sweep in range(60):
        off = 0.0
        tot = 0.0
        for p in range(d):
            tot = tot + a[p * d + p] * a[p * d + p]
            for q in range(p + 1, d):
                off = off + a[p * d + q] * a[p * d + q]
        if off <= 1e-32 * (tot + 1e-300):
            break
        for p in range(d):
            for q in range(p + 1, d):
                apq = a[p * d + q]
                if apq == 0.0:
                    continue
                app = a[p * d + p]
                aqq = a[q * d + q]
                theta = (aqq - app) / (2.0 * apq)
                t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                sn = t * c
                for k in range(d):
                    akp = a[k * d + p]
                    akq = a[k * d + q]
                    a[k * d + p] = c * akp - sn * akq
                    a[k * d + q] = sn * akp + c * akq
                for k in range(d):
                    akp = a[p * d + k]
                    akq = a[q * d + k]
                    a[p * d + k] = c * akp - sn * akq
                    a[q * d + k] = sn * akp + c * akq
    for p in range(d):
        w[p] = a[p * d + p]


def pd_margins(double[:, :, ::1] P):
    cdef Py_ssize_t m = P.shape[0], d = P.shape[1]
    cdef Py_ssize_t s
    cdef int i, k
    cdef double a[16]
    cdef double w[4]
    cdef double dmax, lo, hi, v
    defect = np.empty(m)
    mins = np.empty(m)
    maxs = np.empty(m)
    cdef double[::1] dd = defect
    cdef double[::1] mn = mins
    cdef double[::1] mx = maxs
    with nogil:
        for s in range(m):
            dmax = 0.0
            for i in range(d):
                for k in range(d):
                    v = fabs(P[s, i, k] - P[s, k, i])
                    if v > dmax:
                        dmax = v
                    a[i * d + k] = 0.5 * (P[s, i, k] + P[s, k, i])
            jacobi_eigs(a, <int>d, w)
            lo = w[0]
            hi = fabs(w[0])
            for i in range(1, d):
                if w[i] < lo:
                    lo = w[i]
                if fabs(w[i]) > hi:
                    hi = fabs(w[i])
            dd[s] = dmax
            mn[s] = lo
            mx[s] = hi
    return defect, mins, maxs
