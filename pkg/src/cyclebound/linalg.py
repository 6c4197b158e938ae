"""Exact linear algebra for the eigenvalue-sum test.

Characteristic polynomials are computed by Bareiss fraction-free elimination
over the univariate polynomial ring, and the eigenvalue-pair-sum condition is
decided through the Sylvester resultant of p(lambda) and p(-lambda): the
resultant vanishes exactly when some pair of eigenvalues (repetition allowed)
sums to zero.
"""

from __future__ import annotations

from fractions import Fraction as Q
from typing import Sequence

from .ring import Polynomial, UsageError, VarTable, exact_divide

_LAMBDA = "lam"


def char_poly_coeffs(matrix: Sequence[Sequence[Q]]) -> list[Q]:
    """Coefficients of det(lambda I - A), ascending by degree, leading 1."""
    n = len(matrix)
    if any(len(row) != n for row in matrix):
        raise UsageError("characteristic polynomial requires a square matrix")
    vt = VarTable([_LAMBDA])
    lam = Polynomial.atom(vt, _LAMBDA)
    m = [
        [
            (lam if i == j else Polynomial.zero(vt)) - Polynomial.constant(vt, Q(matrix[i][j]))
            for j in range(n)
        ]
        for i in range(n)
    ]
    det = bareiss_determinant(m)
    coeffs = [Q(0)] * (n + 1)
    for e, c in det.terms:
        coeffs[e[0]] = c
    return coeffs


def bareiss_determinant(m) -> Polynomial:
    """Fraction-free determinant of a square matrix of polynomials."""
    n = len(m)
    if n == 0:
        raise UsageError("empty matrix")
    vt = m[0][0].vt
    a = [list(row) for row in m]
    sign = 1
    prev = Polynomial.one(vt)
    for k in range(n - 1):
        if a[k][k].is_zero:
            pivot_row = next((r for r in range(k + 1, n) if not a[r][k].is_zero), None)
            if pivot_row is None:
                return Polynomial.zero(vt)
            a[k], a[pivot_row] = a[pivot_row], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                q = exact_divide(num, prev)
                if q is None:  # pragma: no cover - Bareiss division is always exact
                    raise ArithmeticError("fraction-free elimination failed to divide")
                a[i][j] = q
            a[i][k] = Polynomial.zero(vt)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


def negate_argument(coeffs: Sequence[Q]) -> list[Q]:
    """Coefficients of p(-lambda) from those of p(lambda) (ascending order)."""
    return [c if i % 2 == 0 else -c for i, c in enumerate(coeffs)]


def sylvester_resultant(p: Sequence[Q], q: Sequence[Q]) -> Q:
    """Resultant of two univariate polynomials given by ascending coefficients."""
    p = list(p)
    q = list(q)
    while p and p[-1] == 0:
        p.pop()
    while q and q[-1] == 0:
        q.pop()
    if not p or not q:
        return Q(0)
    dp = len(p) - 1
    dq = len(q) - 1
    if dp == 0 and dq == 0:
        return Q(1)
    size = dp + dq
    rows = []
    pd = list(reversed(p))  # descending
    qd = list(reversed(q))
    for i in range(dq):
        rows.append([Q(0)] * i + pd + [Q(0)] * (size - dp - 1 - i))
    for i in range(dp):
        rows.append([Q(0)] * i + qd + [Q(0)] * (size - dq - 1 - i))
    return _rational_determinant(rows)


def _rational_determinant(rows: list[list[Q]]) -> Q:
    n = len(rows)
    a = [list(r) for r in rows]
    det = Q(1)
    for k in range(n):
        pivot = next((r for r in range(k, n) if a[r][k] != 0), None)
        if pivot is None:
            return Q(0)
        if pivot != k:
            a[k], a[pivot] = a[pivot], a[k]
            det = -det
        det *= a[k][k]
        inv = 1 / a[k][k]
        for r in range(k + 1, n):
            if a[r][k] != 0:
                factor = a[r][k] * inv
                a[r] = [x - factor * y for x, y in zip(a[r], a[k])]
    return det


def eigen_pair_sum_resultant(matrix: Sequence[Sequence[Q]]) -> Q:
    """Res(p(lambda), p(-lambda)) for the characteristic polynomial of A.

    Nonzero exactly when no two eigenvalues (with repetition, so 2*lambda
    too) sum to zero.
    """
    p = char_poly_coeffs(matrix)
    return sylvester_resultant(p, negate_argument(p))
