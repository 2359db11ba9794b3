"""Exact derivatives of symmetric functions along ``r -> exp(J Q r) M``.

``sigma1`` and ``sigma2`` are polynomials in the matrix entries, so their
Taylor coefficients at ``r = 0`` up to order ``k`` only need the
exponential series truncated at order ``k``.  Everything runs in
``fractions.Fraction``, so the derivatives are exact rationals.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial


def to_fraction_matrix(a) -> list:
    return [[Fraction(x) if not isinstance(x, float) else Fraction(x).limit_denominator(10 ** 12) for x in row] for row in a]


def _mul(a, b):
    n, m, p = len(a), len(b), len(b[0])
    return [[sum((a[i][k] * b[k][j] for k in range(m)), Fraction(0)) for j in range(p)] for i in range(n)]


def _trace(a):
    return sum((a[i][i] for i in range(len(a))), Fraction(0))


def _eye(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _j(n):
    J = [[Fraction(0)] * n for _ in range(n)]
    for k in range(0, n, 2):
        J[k + 1][k] = Fraction(1)
        J[k][k + 1] = Fraction(-1)
    return J


def path_coefficients(Q, base, order: int = 3) -> list:
    """Taylor coefficients ``C_k`` of ``exp(J Q r) base`` for ``k <= order``."""
    Q = to_fraction_matrix(Q)
    base = to_fraction_matrix(base)
    n = len(base)
    X = _mul(_j(n), Q)
    out = []
    power = _eye(n)
    for k in range(order + 1):
        c = Fraction(1, factorial(k))
        out.append([[c * x for x in row] for row in _mul(power, base)])
        power = _mul(power, X)
    return out


def _conv(a, b, order):
    return [sum((a[i] * b[k - i] for i in range(k + 1)), Fraction(0)) for k in range(order + 1)]


def sigma_derivatives(Q, base, order: int = 3) -> dict:
    """Exact derivatives at ``r = 0`` of sigma1, sigma2 and ``f = sigma1^2/4 + 2``.

    Returns a dict of lists indexed by derivative order ``0..order``, plus
    ``"defect"`` for ``sigma2 - f``.
    """
    C = path_coefficients(Q, base, order)
    s1 = [_trace(c) for c in C]
    tr_sq = [
        sum((_trace(_mul(C[i], C[k - i])) for i in range(k + 1)), Fraction(0)) for k in range(order + 1)
    ]
    s1_sq = _conv(s1, s1, order)
    s2 = [(s1_sq[k] - tr_sq[k]) / 2 for k in range(order + 1)]
    f = [s1_sq[k] / 4 + (2 if k == 0 else 0) for k in range(order + 1)]
    d = lambda c: [factorial(k) * c[k] for k in range(order + 1)]  # noqa: E731
    out = {"sigma1": d(s1), "sigma2": d(s2), "f": d(f)}
    out["defect"] = [a - b for a, b in zip(out["sigma2"], out["f"])]
    return out
