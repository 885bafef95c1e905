"""Exact dense linear algebra over the rationals.

Matrices are lists of rows of :class:`fractions.Fraction`. Every routine here
is exact; floating point only appears in :func:`to_float`.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

Matrix = list[list[Fraction]]


class SingularMatrixError(ArithmeticError):
    pass


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(v) for v in row] for row in rows]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt] for row in a]


def matvec(a: Matrix, v: Sequence[Fraction]) -> list[Fraction]:
    return [sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a]


def dot(u: Sequence[Fraction], v: Sequence[Fraction]) -> Fraction:
    return sum((x * y for x, y in zip(u, v)), Fraction(0))


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def to_float(a: Matrix) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in a], dtype=float)


def solve(a: Matrix, b: Sequence[Fraction]) -> list[Fraction]:
    """Solve ``a x = b`` by Gaussian elimination; ``a`` must be square and invertible."""
    n = len(a)
    m = [row + [Fraction(bi)] for row, bi in zip(as_matrix(a), b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError(f"no pivot in column {col}")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        for r in range(col + 1, n):
            if m[r][col]:
                f = m[r][col] / p
                row_c = m[col]
                row_r = m[r]
                for c in range(col, n + 1):
                    row_r[c] -= f * row_c[c]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        s = m[i][n] - sum((m[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        x[i] = s / m[i][i]
    return x


def det(a: Matrix) -> Fraction:
    n = len(a)
    if n == 0:
        return Fraction(1)
    m = as_matrix(a)
    sign = 1
    result = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            sign = -sign
        p = m[col][col]
        result *= p
        for r in range(col + 1, n):
            if m[r][col]:
                f = m[r][col] / p
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return sign * result


def nullspace(a: Matrix, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of ``{v : a v = 0}`` from the reduced row echelon form.

    Each basis vector has a 1 in one free column and 0 in the other free columns.
    """
    ncols = len(a[0]) if a else (ncols or 0)
    m = as_matrix(a)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [v / p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [vi - f * vr for vi, vr in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in enumerate(pivots):
            v[pc] = -m[row][fc]
        basis.append(v)
    return basis


def ldl_classify(a: Matrix) -> tuple[str, int, int | None]:
    """Exact semidefiniteness of a symmetric matrix by symmetric elimination in natural order.

    Returns ``(status, rank, first_zero_pivot)`` where status is one of
    ``positive_definite``, ``psd_singular``, ``indefinite``. A zero pivot is
    admissible only if its remaining row vanishes; otherwise a 2x2 principal
    minor of the Schur complement is negative. ``first_zero_pivot`` is the
    first index at which a zero pivot occurred, which for a psd matrix is the
    smallest singular leading principal level.
    """
    n = len(a)
    s = as_matrix(a)
    rank = 0
    first_zero = None
    for i in range(n):
        d = s[i][i]
        if d < 0:
            return "indefinite", rank, first_zero
        if d == 0:
            if any(s[i][j] != 0 for j in range(i + 1, n)):
                return "indefinite", rank, first_zero
            if first_zero is None:
                first_zero = i
            continue
        rank += 1
        row_i = s[i]
        for r in range(i + 1, n):
            if s[r][i]:
                f = s[r][i] / d
                row_r = s[r]
                for c in range(i + 1, n):
                    row_r[c] -= f * row_i[c]
    if first_zero is None:
        return "positive_definite", rank, None
    return "psd_singular", rank, first_zero


def charpoly(a: Matrix) -> list[Fraction]:
    """Coefficients (ascending) of ``det(x I - a)`` via Faddeev-LeVerrier."""
    a = as_matrix(a)
    n = len(a)
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    m = [[Fraction(0)] * n for _ in range(n)]
    for k in range(1, n + 1):
        # M_k = A M_{k-1} + c_{n-k+1} I
        am = matmul(a, m) if k > 1 else [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            am[i][i] += coeffs[n - k + 1]
        m = am
        tr = sum((dot(a[i], [m[j][i] for j in range(n)]) for i in range(n)), Fraction(0))
        coeffs[n - k] = -tr / k
    return coeffs
