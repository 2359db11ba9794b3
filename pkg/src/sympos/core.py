"""Linear algebra substrate for Sp(2) and Sp(4).

The complex structure is ``J = diag(j, ..., j)`` with ``j = [[0, -1], [1, 0]]``,
so coordinates are ordered as pairs ``(x_1, y_1, x_2, y_2)``.  All the
explicit block matrices used elsewhere in the package are symplectic for
this choice.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _kernels

TOL_SYMP = 1e-10
CLUSTER_TOL = 1e-7
RANK_TOL = 1e-7
DISC_TOL = 1e-10
EDGE_TOL = 1e-9
SIGNATURE_TOL = 1e-6


class UnsupportedDimensionError(ValueError):
    pass


class NotSymplecticError(ValueError):
    def __init__(self, defect, tol):
        super().__init__(f"matrix is not symplectic: defect {defect:.3e} > tol {tol:.1e}")
        self.defect = defect
        self.tol = tol


class MatrixParseError(ValueError):
    pass


def standard_j(half_dim: int) -> np.ndarray:
    """Return ``diag(j, ..., j)`` for ``half_dim`` in {1, 2}."""
    if half_dim not in (1, 2):
        raise UnsupportedDimensionError(f"half_dim must be 1 or 2, got {half_dim}")
    d = 2 * half_dim
    J = np.zeros((d, d))
    for k in range(0, d, 2):
        J[k + 1, k] = 1.0
        J[k, k + 1] = -1.0
    J.setflags(write=False)
    return J


def _half_dim(m: np.ndarray) -> int:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] % 2:
        raise ValueError(f"odd dimension {m.shape[0]}")
    n = m.shape[0] // 2
    if n not in (1, 2):
        raise UnsupportedDimensionError(f"only Sp(2) and Sp(4) are supported, got dimension {m.shape[0]}")
    return n


def symplectic_defect(m) -> float:
    """Max-norm of ``M^T J M - J``."""
    m = np.asarray(m, dtype=float)
    _half_dim(m)
    return float(_kernels.symplectic_defects(m)[0])


def is_symplectic(m, tol: float = TOL_SYMP) -> tuple[bool, float]:
    """Return ``(defect <= tol, defect)``."""
    d = symplectic_defect(m)
    return d <= tol, d


def symplectic_inverse(m: np.ndarray) -> np.ndarray:
    """``M^{-1} = -J M^T J`` for symplectic ``M``."""
    m = np.asarray(m, dtype=float)
    J = standard_j(_half_dim(m))
    return -J @ m.T @ J


@dataclass(frozen=True)
class SymplecticMatrix:
    """Read-only real symplectic matrix with its recorded defect.

    Use :meth:`from_array` to construct; it validates the defect against
    ``tol``.
    """

    entries: np.ndarray
    half_dim: int
    symplectic_defect: float

    @classmethod
    def from_array(cls, m, tol: float = TOL_SYMP) -> "SymplecticMatrix":
        a = np.array(m, dtype=float)
        n = _half_dim(a)
        ok, d = is_symplectic(a, tol)
        if not ok:
            raise NotSymplecticError(d, tol)
        a.setflags(write=False)
        return cls(a, n, d)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    @property
    def inverse(self) -> np.ndarray:
        return symplectic_inverse(self.entries)


def as_array(m) -> np.ndarray:
    if isinstance(m, SymplecticMatrix):
        return m.entries
    return np.asarray(m, dtype=float)


@dataclass(frozen=True)
class SymmetricFunctions:
    sigma1: float
    sigma2: float


def symmetric_functions(m) -> SymmetricFunctions:
    """Trace and sum of principal 2x2 minors of a 4x4 matrix."""
    a = as_array(m)
    if _half_dim(a) != 2:
        raise UnsupportedDimensionError("symmetric_functions needs a 4x4 matrix")
    s = _kernels.sigma_pairs(a)[0]
    return SymmetricFunctions(float(s[0]), float(s[1]))


def krein_form(v, w) -> complex:
    """Hermitian form ``beta(v, w) = -i conj(w)^T J v``."""
    v = np.asarray(v, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if v.shape != w.shape or v.ndim != 1 or v.size % 2:
        raise ValueError("vectors must have matching even dimension")
    J = standard_j(v.size // 2)
    return complex(-1j * (w.conj() @ (J @ v)))


def krein_gram(vectors: np.ndarray) -> np.ndarray:
    """Gram matrix ``G[a, b] = beta(v_b, v_a)`` of the columns of ``vectors``."""
    V = np.asarray(vectors, dtype=complex)
    J = standard_j(V.shape[0] // 2)
    return -1j * (V.conj().T @ J @ V)


@dataclass(frozen=True)
class Cluster:
    """One group of numerically equal eigenvalues.

    ``location`` is "circle", "real" or "complex_quadruple"; eigenvalues
    +-1 are reported on the circle without a Krein signature.
    """

    value: complex
    algebraic_multiplicity: int
    geometric_multiplicity: int
    eigenvectors: np.ndarray = field(repr=False)
    location: str
    krein_signature: int | None


@dataclass(frozen=True)
class Spectrum:
    clusters: tuple
    s_roots: tuple

    def values(self) -> np.ndarray:
        out = []
        for c in self.clusters:
            out.extend([c.value] * c.algebraic_multiplicity)
        return np.array(out, dtype=complex)

    def find(self, lam, tol: float = 1e-6) -> Cluster:
        best = min(self.clusters, key=lambda c: abs(c.value - lam))
        if abs(best.value - lam) > tol * max(1.0, abs(lam)):
            raise ValueError(f"{lam} is not an eigenvalue")
        return best


def _location(lam: complex, s: complex) -> str:
    if s.imag != 0.0:
        return "complex_quadruple"
    if lam.imag != 0.0 or abs(abs(lam) - 1.0) <= 1e-8:
        return "circle"
    return "real"


def null_space(a: np.ndarray, count_max: int, scale: float) -> np.ndarray:
    """Right singular vectors of ``a`` for singular values below ``RANK_TOL * scale``.

    At least one vector is returned and at most ``count_max``.
    """
    _, sv, vh = np.linalg.svd(a)
    k = int(np.sum(sv <= RANK_TOL * scale))
    k = min(max(k, 1), count_max)
    return vh[-k:].conj().T


def signature(h: np.ndarray, tol: float = SIGNATURE_TOL) -> int:
    w = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    return int(np.sum(w > tol) - np.sum(w < -tol))


def spectrum(m) -> Spectrum:
    """Eigenvalue clusters with multiplicities, eigenvectors and Krein signatures."""
    a = as_array(m)
    n = _half_dim(a)
    s, lam = _kernels.reciprocal_spectra(a, DISC_TOL, EDGE_TOL)
    s, lam = s[0], lam[0]
    norm = np.linalg.norm(a, 2)
    groups: list[list] = []
    for k, x in enumerate(lam):
        sk = s[k // 2]
        for g in groups:
            if abs(g[0] - x) <= CLUSTER_TOL * max(1.0, abs(g[0])):
                g[2] += 1
                break
        else:
            groups.append([x, sk, 1])
    clusters = []
    eye = np.eye(2 * n)
    for x, sk, mult in groups:
        loc = _location(x, sk)
        vecs = null_space(a - x * eye, mult, norm)
        sig = None
        if loc == "circle" and x.imag != 0.0:
            sig = signature(krein_gram(vecs))
        clusters.append(Cluster(complex(x), mult, vecs.shape[1], vecs, loc, sig))
    return Spectrum(tuple(clusters), tuple(complex(v) for v in s))


def splitting_number(m, lam) -> int:
    """Krein signature of the eigenspace of the circle eigenvalue ``lam``."""
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-8:
        raise ValueError(f"{lam} is not on the unit circle")
    if abs(lam.imag) <= 1e-8:
        raise ValueError("no splitting number at eigenvalues +-1")
    c = spectrum(m).find(lam)
    if c.krein_signature is None:
        raise ValueError(f"{lam} has no splitting number")
    return c.krein_signature


def matrix_exponential(g, t: float = 1.0) -> np.ndarray:
    """``exp(G t)``; closed form for traceless 2x2, scaling and squaring otherwise."""
    g = np.asarray(g, dtype=float)
    if g.shape == (2, 2) and abs(g[0, 0] + g[1, 1]) <= 1e-15 * (1.0 + np.abs(g).max()):
        # G^2 = -det(G) I
        det = g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]
        if det > 0:
            w = np.sqrt(det)
            return np.cos(w * t) * np.eye(2) + (np.sin(w * t) / w) * g
        if det < 0:
            w = np.sqrt(-det)
            return np.cosh(w * t) * np.eye(2) + (np.sinh(w * t) / w) * g
        return np.eye(2) + t * g
    return scipy.linalg.expm(g * t)


def rotation(t) -> np.ndarray:
    """``exp(j t)``; vectorized over ``t``."""
    t = np.asarray(t, dtype=float)
    c, s = np.cos(t), np.sin(t)
    out = np.empty(t.shape + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def block_diag2(a, b) -> np.ndarray:
    """Stack-aware ``diag(a, b)`` for 2x2 blocks."""
    a = np.asarray(a)
    b = np.asarray(b)
    shape = np.broadcast_shapes(a.shape[:-2], b.shape[:-2])
    out = np.zeros(shape + (4, 4), dtype=np.result_type(a, b))
    out[..., :2, :2] = a
    out[..., 2:, 2:] = b
    return out


def parse_matrix(obj) -> np.ndarray:
    """Parse a JSON array-of-rows (string or already-decoded list)."""
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise MatrixParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise MatrixParseError("matrix must be a non-empty array of rows")
    width = len(obj[0])
    if any(len(r) != width for r in obj):
        raise MatrixParseError("rows have different lengths")
    for r in obj:
        for x in r:
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise MatrixParseError(f"non-numeric entry {x!r}")
    a = np.array(obj, dtype=float)
    if not np.all(np.isfinite(a)):
        raise MatrixParseError("matrix has non-finite entries")
    return a


def matrix_to_json(m) -> list:
    return [[float(x) for x in row] for row in as_array(m)]
