"""Sampled matrix paths: positivity certificates, Maslov index, crossings.

A path is positive when ``A'(t) = J P(t) A(t)`` with ``P(t)`` symmetric
positive definite.  Generators are handled as ``X(t) = A'(t) A(t)^{-1}``,
so ``P = -J X``.  Generator callables take a 1-D array of times and return
a stack of matrices.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from . import _kernels
from .core import NotSymplecticError, parse_matrix, spectrum, standard_j
from .strata import _jordan_sign, tag_string

LOOP_TOL = 1e-8
PATH_TOL_SYMP = 1e-9
TOL_SYM = 1e-6
FD_TOL = 1e-3


class CoarseSamplingError(ValueError):
    pass


class RefinementLimitError(RuntimeError):
    pass


class TrackingLostError(RuntimeError):
    pass


class IntegrationError(RuntimeError):
    pass


class JunctionMismatchError(ValueError):
    pass


def _as_times(t):
    return np.atleast_1d(np.asarray(t, dtype=float))


def magnus_step_exponents(field: Callable, t0, t1):
    """Fourth-order Magnus exponents for the steps ``[t0_i, t1_i]``.

    Two Gauss-Legendre nodes per step; the commutator term keeps the
    order at four and the exponent stays in the Lie algebra, so each step
    is exactly symplectic up to roundoff.
    """
    t0 = _as_times(t0)
    h = _as_times(t1) - t0
    c = np.sqrt(3.0) / 6.0
    a1 = field(t0 + (0.5 - c) * h)
    a2 = field(t0 + (0.5 + c) * h)
    hb = h[:, None, None]
    comm = a2 @ a1 - a1 @ a2
    return 0.5 * hb * (a1 + a2) + (np.sqrt(3.0) / 12.0) * hb * hb * comm


def integrate_field(field: Callable, times, a0, substeps: int = 1) -> np.ndarray:
    """Integrate ``A' = X(t) A`` from ``a0`` and return ``A`` at ``times``.

    ``substeps`` may be an integer or a per-interval integer array.
    """
    times = _as_times(times)
    a0 = np.asarray(a0, dtype=float)
    sub = np.broadcast_to(np.asarray(substeps, dtype=int), (max(len(times) - 1, 0),))
    grid = [times[:1]]
    owner = []
    for i in range(len(times) - 1):
        k = int(sub[i])
        grid.append(np.linspace(times[i], times[i + 1], k + 1)[1:])
        owner.extend([i] * k)
    grid = np.concatenate(grid)
    out = np.empty((len(times),) + a0.shape)
    out[0] = a0
    if len(times) == 1:
        return out
    omega = magnus_step_exponents(field, grid[:-1], grid[1:])
    props = scipy.linalg.expm(omega)
    cur = a0.copy()
    owner = np.asarray(owner)
    last = np.r_[owner[1:] != owner[:-1], True]
    for k in range(len(props)):
        cur = props[k] @ cur
        if last[k]:
            out[owner[k] + 1] = cur
    return out


def vectorize_field(f: Callable) -> Callable:
    """Wrap a scalar-time generator ``f(t) -> matrix`` into the array protocol."""

    def g(t):
        return np.array([f(x) for x in _as_times(t)])

    return g


@dataclass(frozen=True)
class SampledPath:
    """Time-ordered symplectic samples with optional exact generator and map.

    Parameters
    ----------
    times, mats
        Sample times (strictly increasing) and matrices ``(m, 2n, 2n)``.
    generator
        Optional ``X(t) = A'(t) A(t)^{-1}`` in the array protocol.
    func
        Optional exact ``A(t)`` in the array protocol, used for refinement.
    is_loop
        Whether the first and last samples coincide.
    """

    times: np.ndarray
    mats: np.ndarray
    generator: Callable | None = None
    func: Callable | None = None
    is_loop: bool = False
    tol_symp: float = PATH_TOL_SYMP

    def __post_init__(self):
        t = np.array(self.times, dtype=float)
        m = np.array(self.mats, dtype=float)
        if t.ndim != 1 or m.ndim != 3 or m.shape[0] != t.size:
            raise ValueError("times and matrices have inconsistent shapes")
        if m.shape[1] != m.shape[2] or m.shape[1] not in (2, 4):
            raise ValueError(f"unsupported matrix shape {m.shape[1:]}")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("sample times must be strictly increasing")
        d = _kernels.symplectic_defects(m)
        if d.size and d.max() > self.tol_symp:
            raise NotSymplecticError(float(d.max()), self.tol_symp)
        if self.is_loop and np.abs(m[0] - m[-1]).max() > LOOP_TOL:
            raise ValueError("loop endpoints differ")
        t.setflags(write=False)
        m.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "mats", m)

    @property
    def half_dim(self) -> int:
        return self.mats.shape[1] // 2

    def __len__(self):
        return self.times.size

    @property
    def can_evaluate(self) -> bool:
        return self.func is not None or self.generator is not None

    @classmethod
    def from_function(cls, func, t0, t1, samples, generator=None, is_loop=False, **kw):
        t = np.linspace(t0, t1, samples)
        return cls(t, func(t), generator=generator, func=func, is_loop=is_loop, **kw)

    @classmethod
    def from_generator(cls, field, times, a0, substeps=1, is_loop=False, **kw):
        mats = integrate_field(field, times, a0, substeps)
        return cls(times, mats, generator=field, is_loop=is_loop, **kw)

    def evaluate(self, t) -> np.ndarray:
        """Matrices at arbitrary times, exact when ``func`` is known.

        Otherwise integrates the generator from the nearest earlier sample.
        """
        ts = _as_times(t)
        if self.func is not None:
            return np.asarray(self.func(ts), dtype=float)
        if self.generator is None:
            raise RefinementLimitError("path has neither an exact map nor a generator")
        out = np.empty((ts.size,) + self.mats.shape[1:])
        for k, x in enumerate(ts):
            i = int(np.clip(np.searchsorted(self.times, x, side="right") - 1, 0, len(self) - 1))
            t0 = self.times[i]
            if x == t0:
                out[k] = self.mats[i]
                continue
            h = np.diff(self.times).min() if len(self) > 1 else abs(x - t0)
            n = max(2, int(np.ceil(8 * abs(x - t0) / h)))
            out[k] = integrate_field(self.generator, np.linspace(t0, x, n + 1), self.mats[i])[-1]
        return out

    def reversed(self) -> "SampledPath":
        """Time reversal ``t -> -t``; a positive path becomes negative."""
        gen = func = None
        if self.generator is not None:
            g = self.generator
            gen = lambda t: -np.asarray(g(-_as_times(t)))  # noqa: E731
        if self.func is not None:
            f = self.func
            func = lambda t: f(-_as_times(t))  # noqa: E731
        return SampledPath(-self.times[::-1], self.mats[::-1], gen, func, self.is_loop, self.tol_symp)

    def shifted(self, dt: float) -> "SampledPath":
        gen = func = None
        if self.generator is not None:
            g = self.generator
            gen = lambda t: g(_as_times(t) - dt)  # noqa: E731
        if self.func is not None:
            f = self.func
            func = lambda t: f(_as_times(t) - dt)  # noqa: E731
        return SampledPath(self.times + dt, self.mats, gen, func, self.is_loop, self.tol_symp)


# ---------------------------------------------------------------- generators


def _stencil_weights(offsets: np.ndarray) -> np.ndarray:
    """First-derivative weights at 0 for nodes ``offsets`` (shape ``(m, k)``)."""
    k = offsets.shape[1]
    V = offsets[:, None, :] ** np.arange(k)[None, :, None]
    rhs = np.zeros((offsets.shape[0], k))
    rhs[:, 1] = 1.0
    return np.linalg.solve(V, rhs[..., None])[..., 0]


def _uniform(times) -> bool:
    d = np.diff(times)
    return d.size > 0 and np.abs(d - d.mean()).max() <= 1e-9 * d.mean()


def _fd_derivative(times, mats, width, stride, periodic):
    m = times.size
    i = np.arange(m)
    h = (times[-1] - times[0]) / (m - 1)
    if periodic:
        n = m - 1
        period = times[-1] - times[0]
        v = i[:, None] + stride * (np.arange(width) - width // 2)[None, :]
        real = np.mod(v, n)
        tt = times[real] + np.floor_divide(v, n) * period
    else:
        span = stride * (width - 1)
        if span > m - 1:
            return None
        lo = np.clip(i - stride * (width // 2), 0, m - 1 - span)
        real = lo[:, None] + stride * np.arange(width)[None, :]
        tt = times[real]
    w = _stencil_weights((tt - times[:, None]) / h) / h
    return np.einsum("mk,mkij->mij", w, mats[real])


def finite_difference_generators(path: SampledPath):
    """Fourth-order finite-difference estimates of ``P`` at every sample.

    Returns ``(P, err)`` where ``err`` is a Richardson-style estimate of the
    max-norm error of each ``P`` (comparison with the stride-2 stencil, or
    with a 3-point stencil when the path is too short for that).
    """
    times, mats = path.times, path.mats
    if len(path) < 5:
        raise CoarseSamplingError("need at least 5 samples for finite differences")
    periodic = path.is_loop and _uniform(times) and len(path) - 1 >= 9
    v1 = _fd_derivative(times, mats, 5, 1, periodic)
    v2 = _fd_derivative(times, mats, 5, 2, periodic)
    P1 = _kernels.generator_matrices(v1, mats)
    if v2 is not None:
        P2 = _kernels.generator_matrices(v2, mats)
        err = np.abs(P1 - P2).max(axis=(1, 2)) / 15.0
    else:
        v3 = _fd_derivative(times, mats, 3, 1, periodic)
        P3 = _kernels.generator_matrices(v3, mats)
        err = np.abs(P1 - P3).max(axis=(1, 2))
    return P1, err


def analytic_generators(path: SampledPath) -> np.ndarray:
    J = standard_j(path.half_dim)
    return -J @ np.asarray(path.generator(path.times), dtype=float)


def extract_generator(path: SampledPath, index: int, fd_tol: float = FD_TOL) -> np.ndarray:
    """Recovered ``P = -J A' A^{-1}`` at sample ``index`` (not symmetrized).

    Raises
    ------
    CoarseSamplingError
        If the finite-difference error estimate exceeds ``fd_tol (1 + |P|)``.
    """
    if path.generator is not None:
        J = standard_j(path.half_dim)
        return -J @ np.asarray(path.generator(path.times[index : index + 1]))[0]
    P, err = finite_difference_generators(path)
    scale = 1.0 + np.abs(P[index]).max()
    if err[index] > fd_tol * scale:
        raise CoarseSamplingError(
            f"estimated truncation error {err[index]:.2e} at t={path.times[index]:.6g} exceeds tolerance"
        )
    return P[index]


def generator_field(path: SampledPath) -> Callable:
    """Generator ``X(t)`` of a path: exact if known, else a spline of FD values."""
    if path.generator is not None:
        return path.generator
    P, _ = finite_difference_generators(path)
    J = standard_j(path.half_dim)
    X = J @ P
    spline = CubicSpline(path.times, X, axis=0)
    t0, t1 = path.times[0], path.times[-1]
    return lambda t: spline(np.clip(_as_times(t), t0, t1))


# -------------------------------------------------------------- certificates


@dataclass(frozen=True)
class PositivityCertificate:
    times: np.ndarray
    P: np.ndarray = field(repr=False)
    symmetry_defect: np.ndarray = field(repr=False)
    pd_margin: np.ndarray = field(repr=False)
    fd_error: np.ndarray = field(repr=False)
    min_pd_margin: float
    max_symmetry_defect: float
    delta_pd: float
    tol_sym: float
    verdict: str
    reason: str = ""

    def to_json(self, per_sample: bool = True) -> dict:
        out = {
            "verdict": self.verdict,
            "reason": self.reason,
            "min_pd_margin": self.min_pd_margin,
            "max_symmetry_defect": self.max_symmetry_defect,
            "delta_pd": self.delta_pd,
            "tol_sym": self.tol_sym,
        }
        if per_sample:
            out["samples"] = [
                {
                    "t": float(t),
                    "P": [[float(x) for x in row] for row in 0.5 * (p + p.T)],
                    "symmetry_defect": float(sd),
                    "pd_margin": float(mg),
                    "fd_error": float(fe),
                }
                for t, p, sd, mg, fe in zip(self.times, self.P, self.symmetry_defect, self.pd_margin, self.fd_error)
            ]
        return out


def _inconclusive(path, reason):
    e = np.empty(0)
    return PositivityCertificate(
        path.times, np.empty((0,) + path.mats.shape[1:]), e, e, e, float("nan"), float("nan"),
        float("nan"), TOL_SYM, "inconclusive", reason,
    )


def certify_positive(path: SampledPath, delta_pd: float | None = None, tol_sym: float = TOL_SYM,
                     fd_tol: float = FD_TOL) -> PositivityCertificate:
    """Sample-based positivity certificate with margins.

    ``delta_pd`` defaults to ``1e-8 (1 + max |P|)``.  With finite
    differences, a sample whose margin or symmetry defect is within the
    error estimate of its threshold makes the verdict inconclusive unless
    another sample is clearly negative.
    """
    d = _kernels.symplectic_defects(path.mats)
    if d.max() > path.tol_symp:
        raise NotSymplecticError(float(d.max()), path.tol_symp)
    if path.generator is not None:
        P = analytic_generators(path)
        err = np.zeros(len(path))
    else:
        if len(path) < 5:
            return _inconclusive(path, "fewer than 5 samples and no analytic generator")
        P, err = finite_difference_generators(path)
    sym, lo, hi = _kernels.pd_margins(P)
    if delta_pd is None:
        delta_pd = 1e-8 * (1.0 + float(hi.max()))
    clear_bad = np.any(lo + err <= delta_pd) or np.any(sym - err >= tol_sym)
    ambiguous = (
        np.any(np.abs(lo - delta_pd) <= err)
        or np.any((sym >= tol_sym) & (sym - err < tol_sym))
        or np.any(err > fd_tol * (1.0 + hi))
    )
    min_margin, max_sym = float(lo.min()), float(sym.max())
    if clear_bad:
        verdict, reason = "not_positive", ""
        if np.any(lo + err <= delta_pd):
            k = int(np.argmin(lo))
            reason = f"generator not positive definite at t={path.times[k]:.6g}"
        else:
            reason = "recovered generator not symmetric"
    elif ambiguous:
        verdict, reason = "inconclusive", "finite-difference error comparable to the margins"
    elif min_margin > delta_pd and max_sym < tol_sym:
        verdict, reason = "positive", ""
    else:
        verdict, reason = "not_positive", ""
    return PositivityCertificate(path.times, P, sym, lo, err, min_margin, max_sym, float(delta_pd), tol_sym,
                                 verdict, reason)


# ------------------------------------------------------------------- Maslov


def rho(m) -> complex:
    """Complex determinant of the unitary polar factor."""
    return complex(_kernels.unitary_phases(np.asarray(m, dtype=float))[0])


def phase_increments(path: SampledPath, max_depth: int = 30) -> np.ndarray:
    """Angle change of ``rho`` over each sample interval, refined as needed.

    Each interval is subdivided until every step changes the angle by less
    than pi/2.
    """
    r = _kernels.unitary_phases(path.mats)
    d = np.angle(r[1:] * np.conj(r[:-1]))
    bad = np.nonzero(np.abs(d) >= 0.5 * np.pi)[0]
    if bad.size and not path.can_evaluate:
        raise RefinementLimitError("steps of pi/2 or more and the path cannot be refined")

    def seg(t0, r0, t1, r1, depth):
        step = np.angle(r1 * np.conj(r0))
        if abs(step) < 0.5 * np.pi:
            return step
        if depth >= max_depth:
            raise RefinementLimitError("refinement depth exceeded")
        tm = 0.5 * (t0 + t1)
        rm = rho(path.evaluate(tm)[0])
        return seg(t0, r0, tm, rm, depth + 1) + seg(tm, rm, t1, r1, depth + 1)

    for i in bad:
        d[i] = seg(path.times[i], r[i], path.times[i + 1], r[i + 1], 0)
    return d


def phase_winding(path: SampledPath) -> float:
    """Total angle of ``rho`` along the path divided by 2 pi."""
    return float(phase_increments(path).sum() / (2 * np.pi))


def maslov_index(loop: SampledPath) -> int:
    """Winding number of ``rho`` around a loop."""
    if not loop.is_loop:
        raise ValueError("maslov_index needs a loop")
    w = phase_winding(loop)
    k = int(round(w))
    if abs(w - k) > 1e-6:
        raise RefinementLimitError(f"winding {w} is not close to an integer")
    return k


def identity_hits(path: SampledPath, tol: float = 1e-8) -> list:
    """Interior times where the path passes within ``tol`` of +-I."""
    eye = np.eye(path.mats.shape[1])
    inner = path.mats[1:-1]
    near = np.minimum(np.abs(inner - eye).max(axis=(1, 2)), np.abs(inner + eye).max(axis=(1, 2)))
    return [float(t) for t in path.times[1:-1][near <= tol]]


# ---------------------------------------------------------------- crossings


@dataclass(frozen=True)
class CrossingEvent:
    t_cross: float
    from_tag: str
    to_tag: str
    gate: str | None
    function: str
    at_tag: str = ""
    tangential: bool = False

    def to_json(self):
        return {
            "t": self.t_cross,
            "from": self.from_tag,
            "to": self.to_tag,
            "at": self.at_tag,
            "gate": self.gate,
            "function": self.function,
            "tangential": self.tangential,
        }


def discriminant_values(mats) -> tuple[np.ndarray, tuple]:
    """Functions whose sign changes mark stratum crossings.

    Sp(2): ``tr - 2`` and ``tr + 2``.  Sp(4): ``D = sigma1^2 - 4 sigma2 + 8``
    and ``p(+-1) = sigma2 -+ 2 sigma1 + 2``.
    """
    mats = np.asarray(mats, dtype=float)
    if mats.ndim == 2:
        mats = mats[None]
    if mats.shape[-1] == 2:
        tr = mats[:, 0, 0] + mats[:, 1, 1]
        return np.stack([tr - 2.0, tr + 2.0], axis=1), ("tr-2", "tr+2")
    s = _kernels.sigma_pairs(mats)
    s1, s2 = s[:, 0], s[:, 1]
    return np.stack([s1 * s1 - 4 * s2 + 8, s2 - 2 * s1 + 2, s2 + 2 * s1 + 2], axis=1), ("disc", "p(1)", "p(-1)")


def _gate(a: np.ndarray, fname: str) -> str | None:
    if fname in ("tr-2", "p(1)"):
        lam = 1.0
    elif fname in ("tr+2", "p(-1)"):
        lam = -1.0
    else:
        s = 0.5 * np.trace(a)
        if abs(s) >= 2.0:
            return None
        lam = complex(0.5 * s, np.sqrt(1.0 - 0.25 * s * s))
    if np.abs(a - lam * np.eye(a.shape[0])).max() <= 1e-8:
        return None
    return _jordan_sign(a, lam)


def crossing_events(path: SampledPath, touch_tol: float = 1e-9) -> list[CrossingEvent]:
    """Transversal stratum crossings (root-refined) and tangential touches."""
    F, names = discriminant_values(path.mats)
    t = path.times
    m = len(path)
    events = []
    evaluable = path.can_evaluate

    def tag_at(x, fallback):
        if evaluable:
            return tag_string(path.evaluate(x)[0])
        return tag_string(path.mats[fallback])

    for f, fname in enumerate(names):
        col = F[:, f]
        scale = max(1.0, float(np.abs(col).max()))

        def g(x, f=f):
            return discriminant_values(path.evaluate(x))[0][0, f]

        for i in range(m - 1):
            a, b = col[i], col[i + 1]
            if a == 0.0 and 0 < i and col[i - 1] * b < 0:
                tc = t[i]
            elif a * b < 0:
                tc = brentq(g, t[i], t[i + 1], xtol=1e-14, rtol=1e-15) if evaluable else t[i] - a * (t[i + 1] - t[i]) / (b - a)
            else:
                continue
            eta = min(1e-7 * max(1.0, abs(tc)), 0.25 * (t[i + 1] - t[i]))
            lo = tag_at(max(tc - eta, t[0]), i)
            hi = tag_at(min(tc + eta, t[-1]), i + 1)
            if lo == hi:
                continue
            mc = path.evaluate(tc)[0] if evaluable else path.mats[i if abs(tc - t[i]) < abs(tc - t[i + 1]) else i + 1]
            events.append(CrossingEvent(float(tc), lo, hi, _gate(mc, fname), fname, tag_string(mc)))
        # tangential touches: small local minimum of |F| without a sign change
        for i in range(1, m - 1):
            a, b, c = col[i - 1], col[i], col[i + 1]
            if a * b < 0 or b * c < 0 or (b == 0.0 and a * c < 0):
                continue
            # both neighbors clearly off the boundary, so a path lying in it does not count
            tol = touch_tol * scale
            if abs(b) <= tol and abs(a) > tol and abs(c) > tol:
                before, at = tag_string(path.mats[i - 1]), tag_string(path.mats[i])
                events.append(CrossingEvent(float(t[i]), before, at, None, fname, at, True))
    events.sort(key=lambda e: e.t_cross)
    return events


# ----------------------------------------------------------- Krein tracking


@dataclass
class KreinReport:
    n_segments: int = 0
    n_steps: int = 0
    n_violations: int = 0
    max_violation: float = 0.0
    n_breaks: int = 0
    segments: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.n_steps > 0 and self.n_violations == 0

    @property
    def all_violated(self) -> bool:
        return self.n_steps > 0 and self.n_violations == self.n_steps

    def to_json(self):
        return {
            "n_segments": self.n_segments,
            "n_steps": self.n_steps,
            "n_violations": self.n_violations,
            "max_violation": self.max_violation,
            "n_breaks": self.n_breaks,
            "segments": self.segments,
        }


def circle_items(mats) -> list:
    """Circle eigenvalues (excluding +-1) with splitting numbers, per sample.

    Simple eigenvalues get the sign of ``beta(v, v)``; double circle
    eigenvalues get the signature of the eigenspace.  Samples with a zero
    signature return ``None`` (collision points).
    """
    mats = np.asarray(mats, dtype=float)
    s, lam = _kernels.reciprocal_spectra(mats)
    d = mats.shape[-1]
    J = standard_j(d // 2)
    out = [[] for _ in range(len(mats))]
    req_i, req_l = [], []
    for i in range(len(mats)):
        for k in range(s.shape[1]):
            sk = s[i, k]
            if sk.imag != 0.0 or abs(sk.real) >= 2.0:
                continue
            for x in lam[i, 2 * k : 2 * k + 2]:
                if x.imag == 0.0:
                    continue
                req_i.append(i)
                req_l.append(x)
    if req_i:
        req_i = np.array(req_i)
        req_l = np.array(req_l)
        B = mats[req_i].astype(complex) - req_l[:, None, None] * np.eye(d)
        _, sv, vh = np.linalg.svd(B)
        v = vh[:, -1, :].conj()
        beta = np.einsum("ma,ab,mb->m", v.conj(), -1j * J, v).real
        for i, x, bt, svs in zip(req_i, req_l, beta, sv):
            out[i].append([x, bt, svs])
    result = []
    for i, items in enumerate(out):
        if not items:
            result.append([])
            continue
        vals = np.array([it[0] for it in items])
        merged = []
        used = set()
        for a, it in enumerate(items):
            if a in used:
                continue
            partners = [b for b in range(a + 1, len(items)) if abs(vals[b] - vals[a]) <= 1e-7]
            if partners:
                used.update(partners)
                c = spectrum(mats[i]).find(vals[a])
                sig = c.krein_signature or 0
                merged.append((complex(vals[a]), int(np.sign(sig)), c.algebraic_multiplicity))
            else:
                sig = int(np.sign(it[1])) if abs(it[1]) > 1e-9 else 0
                merged.append((complex(vals[a]), sig, 1))
        if any(sig == 0 for _, sig, _ in merged):
            result.append(None)
        else:
            result.append(merged)
    return result


def _match(a, b):
    """Best assignment between two small lists of complex values."""
    best, best_cost = None, np.inf
    for perm in itertools.permutations(range(len(b))):
        cost = max(abs(a[i] - b[p]) for i, p in enumerate(perm))
        if cost < best_cost:
            best, best_cost = perm, cost
    return best, best_cost


def _min_gap(vals):
    if len(vals) < 2:
        return np.inf
    return min(abs(x - y) for x, y in itertools.combinations(vals, 2))


def krein_direction_check(path: SampledPath, max_depth: int = 12) -> KreinReport:
    """Check that circle eigenvalues rotate in the direction of their splitting number.

    Consecutive samples whose circle eigenvalues all carry nonzero
    splitting numbers form a segment; along a segment each tracked
    eigenvalue's argument must change with the sign of its splitting
    number.  Ambiguous matches are refined by bisection when the path
    can be evaluated.  A step across which a matched eigenvalue changes
    splitting number has left O_U in between (through +-1 or a Krein
    collision); it closes the segment and is counted in ``n_breaks``.
    """
    items = circle_items(path.mats)
    rep = KreinReport()
    seg = None

    def step(t0, it0, t1, it1, depth):
        # returns, per item of it0: (start sign, end sign, total arg change, end index)
        vals0 = [x for x, _, _ in it0]
        vals1 = [x for x, _, _ in it1]
        perm, cost = _match(vals0, vals1)
        gap = min(_min_gap(vals0), _min_gap(vals1))
        if cost >= 0.5 * gap:
            if not path.can_evaluate or depth >= max_depth:
                raise TrackingLostError(f"eigenvalue tracking lost near t={t0:.6g}")
            tm = 0.5 * (t0 + t1)
            itm = circle_items(path.evaluate(tm))[0]
            if not itm or len(itm) != len(it0):
                return None
            r1 = step(t0, it0, tm, itm, depth + 1)
            r2 = step(tm, itm, t1, it1, depth + 1)
            if r1 is None or r2 is None:
                return None
            out = []
            for s0, sm, d1, pm in r1:
                sm2, s1, d2, p1 = r2[pm]
                out.append((s0, s1 if sm == sm2 else 0, d1 + d2, p1))
            return out
        return [
            (it0[i][1], it1[p][1], float(np.angle(it1[p][0] * np.conj(it0[i][0]))), p)
            for i, p in enumerate(perm)
        ]

    for i in range(len(path) - 1):
        a, b = items[i], items[i + 1]
        if not a or not b or len(a) != len(b):
            seg = None
            continue
        res = step(path.times[i], a, path.times[i + 1], b, 0)
        if res is None:
            seg = None
            continue
        if any(s0 != s1 for s0, s1, _, _ in res):
            # a splitting number can only change off O_U (through +-1 or a collision)
            rep.n_breaks += 1
            seg = None
            continue
        if seg is None:
            seg = {"t_start": float(path.times[i]), "t_end": float(path.times[i + 1]), "n_steps": 0, "n_violations": 0}
            rep.segments.append(seg)
            rep.n_segments += 1
        seg["t_end"] = float(path.times[i + 1])
        for s0, s1, darg, _ in res:
            rep.n_steps += 1
            seg["n_steps"] += 1
            if s0 * darg <= 0:
                rep.n_violations += 1
                seg["n_violations"] += 1
                rep.max_violation = max(rep.max_violation, abs(darg))
    return rep


# ------------------------------------------------------ blending, gluing


def blend_generators(path_a: SampledPath, path_b: SampledPath, s: float, substeps: int = 2,
                     int_tol: float = 1e-6) -> SampledPath:
    """Integrate the convex combination ``(1 - s) X_A + s X_B`` from the common start.

    ``s = 0`` reproduces ``path_a`` and ``s = 1`` reproduces ``path_b``.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError("s must lie in [0, 1]")
    if path_a.half_dim != path_b.half_dim or len(path_a) != len(path_b):
        raise ValueError("paths must share dimension and time grid")
    if np.abs(path_a.times - path_b.times).max() > 1e-12:
        raise ValueError("paths must share the time grid")
    if np.abs(path_a.mats[0] - path_b.mats[0]).max() > LOOP_TOL:
        raise ValueError("paths must start at the same matrix")
    xa, xb = generator_field(path_a), generator_field(path_b)

    def blended(t):
        return (1.0 - s) * np.asarray(xa(t)) + s * np.asarray(xb(t))

    mats = integrate_field(blended, path_a.times, path_a.mats[0], substeps)
    fine = integrate_field(blended, path_a.times, path_a.mats[0], 2 * substeps)
    err = np.abs(mats - fine).max()
    if err > int_tol:
        raise IntegrationError(f"integration error estimate {err:.2e} exceeds {int_tol:.1e}")
    is_loop = path_a.is_loop and np.abs(mats[0] - mats[-1]).max() <= LOOP_TOL
    return SampledPath(path_a.times, fine, generator=blended, is_loop=is_loop)


def _smoothstep(u):
    u = np.clip(u, 0.0, 1.0)
    return u * u * (3.0 - 2.0 * u)


def concat_smooth(paths: list, blend_width: float, substeps: int = 2):
    """Glue paths end to end with generators cross-faded around each junction.

    Returns ``(path, deviation)``, where ``deviation`` is the max-norm
    distance at the sample times from the plain concatenation.
    """
    if not paths:
        raise ValueError("no paths")
    if len(paths) == 1:
        return paths[0], 0.0
    if blend_width <= 0:
        raise ValueError("blend_width must be positive")
    pieces = [paths[0]]
    for p in paths[1:]:
        prev = pieces[-1]
        if np.abs(prev.mats[-1] - p.mats[0]).max() > LOOP_TOL:
            raise JunctionMismatchError(f"junction mismatch at t={prev.times[-1]:.6g}")
        pieces.append(p.shifted(prev.times[-1] - p.times[0]))
    fields = [generator_field(p) for p in pieces]
    junctions = np.array([p.times[-1] for p in pieces[:-1]])
    starts = np.array([p.times[0] for p in pieces])
    ends = np.array([p.times[-1] for p in pieces])
    w = float(blend_width)

    def raw(k, t):
        return np.asarray(fields[k](np.clip(t, starts[k], ends[k])))

    def glued(t):
        t = _as_times(t)
        k = np.clip(np.searchsorted(junctions, t, side="right"), 0, len(pieces) - 1)
        out = np.empty((t.size,) + paths[0].mats.shape[1:])
        for j in np.unique(k):
            sel = k == j
            out[sel] = raw(j, t[sel])
        for j, tj in enumerate(junctions):
            sel = np.abs(t - tj) < 0.5 * w
            if not sel.any():
                continue
            u = _smoothstep((t[sel] - tj + 0.5 * w) / w)[:, None, None]
            out[sel] = (1.0 - u) * raw(j, t[sel]) + u * raw(j + 1, t[sel])
        return out

    times = np.concatenate([pieces[0].times] + [p.times[1:] for p in pieces[1:]])
    plain = np.concatenate([pieces[0].mats] + [p.mats[1:] for p in pieces[1:]])
    h = np.diff(times)
    mid = 0.5 * (times[:-1] + times[1:])
    near = np.min(np.abs(mid[:, None] - junctions[None, :]), axis=1) < 0.5 * w + h
    sub = np.where(near, np.maximum(substeps, np.ceil(16 * h / w)).astype(int), substeps)
    mats = integrate_field(glued, times, plain[0], sub)
    dev = float(np.abs(mats - plain).max())
    is_loop = all(p.is_loop for p in paths) and np.abs(mats[0] - mats[-1]).max() <= LOOP_TOL
    return SampledPath(times, mats, generator=glued, is_loop=bool(is_loop)), dev


# --------------------------------------------------------- Conj(Sp(2))


def is_simple_conj2(path: SampledPath) -> bool:
    """Apply the simple-path definition to the real-axis excursions.

    In O_R+ an excursion may have at most one local maximum of the
    coordinate and no local minimum; in O_R- at most one local minimum and
    no local maximum.
    """
    if path.half_dim != 1:
        raise ValueError("is_simple_conj2 needs an Sp(2) path")
    tr = path.mats[:, 0, 0] + path.mats[:, 1, 1]
    side = np.where(tr > 2.0, 1, np.where(tr < -2.0, -1, 0))
    w = np.sqrt(np.maximum(tr * tr - 4.0, 0.0))
    x = 0.5 * (tr + np.sign(tr) * w)
    runs = []
    i = 0
    m = len(path)
    while i < m:
        if side[i] == 0:
            i += 1
            continue
        j = i
        while j + 1 < m and side[j + 1] == side[i]:
            j += 1
        runs.append([side[i], list(range(i, j + 1))])
        i = j + 1
    if path.is_loop and len(runs) > 1 and runs[0][1][0] == 0 and runs[-1][1][-1] == m - 1 and runs[0][0] == runs[-1][0]:
        last = runs.pop()
        runs[0][1] = last[1][:-1] + runs[0][1]
    for sd, idx in runs:
        vals = x[idx]
        keep = np.r_[True, np.diff(vals) != 0]
        vals = vals[keep]
        if vals.size < 3:
            continue
        inner = vals[1:-1]
        maxima = int(np.sum((inner > vals[:-2]) & (inner > vals[2:])))
        minima = int(np.sum((inner < vals[:-2]) & (inner < vals[2:])))
        if sd > 0 and (minima > 0 or maxima > 1):
            return False
        if sd < 0 and (maxima > 0 or minima > 1):
            return False
    return True


# ---------------------------------------------------------- trajectories


def eigen_trajectories(mats) -> np.ndarray:
    """Eigenvalues per sample, ordered by nearest-neighbor continuation."""
    _, lam = _kernels.reciprocal_spectra(np.asarray(mats, dtype=float))
    out = lam.copy()
    for i in range(1, len(out)):
        perm, _ = _match(list(out[i - 1]), list(lam[i]))
        out[i] = lam[i][list(perm)]
    return out


def path_to_json(path: SampledPath, tags: bool = False) -> dict:
    samples = []
    for t, m in zip(path.times, path.mats):
        entry = {"t": float(t), "m": [[float(x) for x in row] for row in m]}
        if tags:
            entry["tag"] = tag_string(m)
        samples.append(entry)
    return {"half_dim": path.half_dim, "is_loop": bool(path.is_loop), "samples": samples}


def path_from_json(obj: dict, tol_symp: float = PATH_TOL_SYMP) -> SampledPath:
    try:
        n = int(obj["half_dim"])
        samples = obj["samples"]
        times = [float(s["t"]) for s in samples]
        mats = [parse_matrix(s["m"]) for s in samples]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed path file: {exc}") from exc
    if not samples:
        raise ValueError("path file has no samples")
    if any(m.shape != (2 * n, 2 * n) for m in mats):
        raise ValueError("sample matrix does not match half_dim")
    return SampledPath(np.array(times), np.array(mats), is_loop=bool(obj.get("is_loop", False)), tol_symp=tol_symp)
