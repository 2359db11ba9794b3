"""Stratification of the conjugacy space of Sp(2) and Sp(4).

Tags are computed from conjugation invariants: the roots ``s`` of
``s^2 - sigma1 s + (sigma2 - 2)`` (``s = lambda + 1/lambda``), geometric
multiplicities, Krein signatures and the sign of the normal form of a
2x2 Jordan block on the unit circle.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import (
    EDGE_TOL,
    as_array,
    krein_gram,
    signature,
    spectrum,
    standard_j,
    symmetric_functions,
    _half_dim,
)

TRACE_TOL = 1e-9
IDENTITY_TOL = 1e-8


class NormalFormError(ValueError):
    pass


class StratumTag2(str, enum.Enum):
    O_U_plus = "O_U+"
    O_U_minus = "O_U-"
    O_R_plus = "O_R+"
    O_R_minus = "O_R-"
    Id = "I"
    MinusId = "-I"
    N1_plus = "N1+"
    N1_minus = "N1-"
    Nminus1_plus = "N-1+"
    Nminus1_minus = "N-1-"

    def __str__(self):
        return self.value


class Stratum4(str, enum.Enum):
    O_C = "O_C"
    O_U = "O_U"
    O_R = "O_R"
    O_UR = "O_UR"
    B_U_minus = "B_U-"
    B_U_plus = "B_U+"
    B_R = "B_R"
    B_U1_minus = "B_U1-"
    B_U1_plus = "B_U1+"
    B_R1_minus = "B_R1-"
    B_R1_plus = "B_R1+"
    B_RD = "B_RD"
    B_UD = "B_UD"
    OTHER = "OTHER"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class StratumTag4:
    """Stratum of an Sp(4) matrix plus the conjugation-invariant payload.

    ``circle_splitting`` lists ``(angle, signature)`` for circle clusters in
    the upper half plane, ordered by angle.  ``detail`` describes OTHER.
    """

    stratum: Stratum4
    real_sign: str | None = None
    circle_splitting: tuple = ()
    detail: str = ""

    @property
    def key(self):
        """Comparison key that ignores the exact eigenvalue positions."""
        return (self.stratum, self.real_sign, tuple(sig for _, sig in self.circle_splitting))

    def __str__(self):
        return self.stratum.value


@dataclass(frozen=True)
class ConjPoint2:
    coordinate: complex | float
    tag: StratumTag2


def _jordan_sign(a: np.ndarray, lam: complex) -> str:
    """Sign of the normal form of the 2x2 Jordan block at ``lam``.

    On the generalized eigenspace ``E`` (two smallest right singular
    vectors of ``(M - lam)^2``) the Hermitian form
    ``Im beta((lam^{-1} M - 1) e_j, e_i)`` has rank one; its nonzero
    eigenvalue is positive for N^+ and negative for N^-.
    """
    d = a.shape[0]
    eye = np.eye(d)
    b = a - lam * eye
    _, _, vh = np.linalg.svd(b @ b)
    E = vh[-2:].conj().T
    N = a / lam - eye
    J = standard_j(d // 2)
    hm = -1j * (E.conj().T @ J @ (N @ E))
    k = (hm - hm.conj().T) / 2j
    w = np.linalg.eigvalsh(k)
    dom = w[np.argmax(np.abs(w))]
    return "+" if dom > 0 else "-"


def normal_form_sign(m, lam) -> str:
    """Return "+" or "-" for a double non-diagonalizable circle eigenvalue.

    Raises
    ------
    NormalFormError
        If ``lam`` is not on the circle, is simple, or is diagonalizable.
    """
    a = as_array(m)
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-8:
        raise NormalFormError(f"{lam} is not on the unit circle")
    try:
        c = spectrum(a).find(lam)
    except ValueError as exc:
        raise NormalFormError(str(exc)) from exc
    if c.algebraic_multiplicity != 2:
        raise NormalFormError(f"eigenvalue {lam} has multiplicity {c.algebraic_multiplicity}, need 2")
    if c.geometric_multiplicity != 1:
        raise NormalFormError(f"eigenvalue {lam} is diagonalizable")
    return _jordan_sign(a, c.value)


def classify2(m) -> StratumTag2:
    a = as_array(m)
    if _half_dim(a) != 1:
        raise ValueError("classify2 needs a 2x2 matrix")
    tr = a[0, 0] + a[1, 1]
    gap = abs(tr) - 2.0
    if gap > TRACE_TOL:
        return StratumTag2.O_R_plus if tr > 0 else StratumTag2.O_R_minus
    if gap < -TRACE_TOL:
        up = complex(0.5 * tr, 0.5 * np.sqrt(4.0 - tr * tr))
        v = _circle_vector2(a, up)
        sig = krein_gram(v[:, None])[0, 0].real
        return StratumTag2.O_U_plus if sig > 0 else StratumTag2.O_U_minus
    lam = 1.0 if tr > 0 else -1.0
    if np.abs(a - lam * np.eye(2)).max() <= IDENTITY_TOL:
        return StratumTag2.Id if lam > 0 else StratumTag2.MinusId
    sign = _jordan_sign(a, lam)
    if lam > 0:
        return StratumTag2.N1_plus if sign == "+" else StratumTag2.N1_minus
    return StratumTag2.Nminus1_plus if sign == "+" else StratumTag2.Nminus1_minus


def _circle_vector2(a, lam):
    # eigenvector of a 2x2 matrix for eigenvalue lam, from the better row
    b = a - lam * np.eye(2)
    r = b[0] if abs(b[0]).sum() >= abs(b[1]).sum() else b[1]
    v = np.array([-r[1], r[0]], dtype=complex)
    return v / np.linalg.norm(v)


def project_conj2(m) -> ConjPoint2:
    """Coordinate in S^1 u (1, inf) u (-inf, -1) with the tag of the point."""
    a = as_array(m)
    tag = classify2(a)
    tr = a[0, 0] + a[1, 1]
    if tag in (StratumTag2.O_R_plus, StratumTag2.O_R_minus):
        w = np.sqrt(tr * tr - 4.0)
        return ConjPoint2(float(0.5 * (tr + np.sign(tr) * w)), tag)
    if tag in (StratumTag2.O_U_plus, StratumTag2.O_U_minus):
        up = complex(0.5 * tr, 0.5 * np.sqrt(4.0 - tr * tr))
        return ConjPoint2(up if tag is StratumTag2.O_U_plus else up.conjugate(), tag)
    return ConjPoint2(1.0 if tr > 0 else -1.0, tag)


def boundary_defect(m) -> float:
    """``sigma2 - (sigma1^2 / 4 + 2)``; positive on O_C, zero on B_R."""
    f = symmetric_functions(m)
    return f.sigma2 - (0.25 * f.sigma1 ** 2 + 2.0)


def _s_kind(s: float) -> str:
    t = s * s - 4.0
    if abs(t) <= EDGE_TOL * max(1.0, s * s):
        return "edge"
    return "circle" if t < 0 else "real"


def _real_sign(values) -> str | None:
    signs = {np.sign(v.real) for v in values}
    if signs == {1.0}:
        return "+"
    if signs == {-1.0}:
        return "-"
    return None


def classify4(m) -> StratumTag4:
    a = as_array(m)
    if _half_dim(a) != 2:
        raise ValueError("classify4 needs a 4x4 matrix")
    spec = spectrum(a)
    s1, s2 = spec.s_roots
    if s1.imag != 0.0:
        return StratumTag4(Stratum4.O_C)

    def upper_circle():
        out = [
            (float(np.angle(c.value)), c.krein_signature)
            for c in spec.clusters
            if c.krein_signature is not None and c.value.imag > 0
        ]
        return tuple(sorted(out))

    real_vals = [c.value for c in spec.clusters if c.location == "real"]
    r1, r2 = s1.real, s2.real
    k1, k2 = _s_kind(r1), _s_kind(r2)
    if r1 != r2:
        kinds = {k1, k2}
        if kinds == {"circle"}:
            return StratumTag4(Stratum4.O_U, None, upper_circle())
        if kinds == {"real"}:
            return StratumTag4(Stratum4.O_R, _real_sign(real_vals))
        if kinds == {"circle", "real"}:
            return StratumTag4(Stratum4.O_UR, _real_sign(real_vals), upper_circle())
        if k1 == k2 == "edge":
            return StratumTag4(Stratum4.OTHER, detail="eigenvalues 1 and -1, each double")
        # one pair at +-1, the other on the circle or the real axis
        edge_s, other = (r1, k2) if k1 == "edge" else (r2, k1)
        lam = 1.0 if edge_s > 0 else -1.0
        c = spec.find(lam)
        if c.geometric_multiplicity == 2:
            return StratumTag4(
                Stratum4.OTHER,
                _real_sign(real_vals) if other == "real" else None,
                upper_circle(),
                detail=f"diagonalizable double eigenvalue {lam:+.0f}",
            )
        sign = _jordan_sign(a, lam)
        if other == "circle":
            st = Stratum4.B_U1_plus if sign == "+" else Stratum4.B_U1_minus
            return StratumTag4(st, None, upper_circle())
        st = Stratum4.B_R1_plus if sign == "+" else Stratum4.B_R1_minus
        return StratumTag4(st, _real_sign(real_vals))
    # double root
    if k1 == "edge":
        lam = 1.0 if r1 > 0 else -1.0
        c = spec.find(lam)
        kind = {2: "diagonalizable", 1: "non-diagonalizable"}.get(c.geometric_multiplicity, "")
        if c.geometric_multiplicity == 4:
            kind = "identity" if lam > 0 else "minus identity"
        return StratumTag4(
            Stratum4.OTHER, detail=f"quadruple eigenvalue {lam:+.0f}, geometric multiplicity {c.geometric_multiplicity}"
            + (f" ({kind})" if kind else "")
        )
    if k1 == "circle":
        up = [c for c in spec.clusters if c.value.imag > 0][0]
        if up.geometric_multiplicity == 1:
            sign = _jordan_sign(a, up.value)
            return StratumTag4(Stratum4.B_U_plus if sign == "+" else Stratum4.B_U_minus)
        sig = signature(krein_gram(up.eigenvectors))
        if sig == 0:
            return StratumTag4(Stratum4.B_UD)
        return StratumTag4(Stratum4.O_U, None, upper_circle())
    big = [c for c in spec.clusters if c.location == "real"]
    if all(c.geometric_multiplicity == 2 for c in big):
        return StratumTag4(Stratum4.B_RD, _real_sign(real_vals))
    return StratumTag4(Stratum4.B_R, _real_sign(real_vals))


def classify(m):
    """Dispatch to :func:`classify2` or :func:`classify4` by dimension."""
    a = as_array(m)
    return classify2(a) if _half_dim(a) == 1 else classify4(a)


def tag_string(m) -> str:
    return str(classify(m))
