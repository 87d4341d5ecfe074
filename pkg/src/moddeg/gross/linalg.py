"""Exact integer linear algebra: fraction-free echelon form and kernels."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Matrix = list[list[int]]


def bareiss_echelon(rows: Sequence[Sequence[int]]) -> tuple[Matrix, list[int]]:
    """Fraction-free row echelon form and its pivot columns.

    Every entry produced is a minor of the input, so the divisions by the
    previous pivot are exact.
    """
    A = [list(map(int, r)) for r in rows]
    if not A:
        return [], []
    nrows, ncols = len(A), len(A[0])
    prev = 1
    r = 0
    pivots = []
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        top = A[r]
        for i in range(r + 1, nrows):
            row = A[i]
            f = row[c]
            for k in range(c + 1, ncols):
                row[k] = (top[c] * row[k] - f * top[k]) // prev
            row[c] = 0
        prev = top[c]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return A[:r], pivots


def primitive(v: Sequence[int]) -> list[int]:
    """Divide out the content and make the first nonzero entry positive."""
    g = 0
    for x in v:
        g = math.gcd(g, x)
    if g == 0:
        return list(v)
    out = [x // g for x in v]
    lead = next(x for x in out if x)
    return out if lead > 0 else [-x for x in out]


def kernel(rows: Sequence[Sequence[int]], ncols: int | None = None) -> list[list[int]]:
    """Primitive integer vectors spanning the rational kernel of the matrix."""
    if ncols is None:
        ncols = len(rows[0])
    U, pivots = bareiss_echelon(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for r in range(len(pivots) - 1, -1, -1):
            c = pivots[r]
            s = sum(U[r][k] * x[k] for k in range(c + 1, ncols))
            x[c] = -Fraction(s) / U[r][c]
        den = math.lcm(*(q.denominator for q in x))
        basis.append(primitive([int(q * den) for q in x]))
    return basis


def mat_mul(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]]) -> Matrix:
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def transpose(A: Sequence[Sequence[int]]) -> Matrix:
    return [list(col) for col in zip(*A)]


def vec_mat(v: Sequence[int], A: Sequence[Sequence[int]]) -> list[int]:
    """Row vector times matrix."""
    return [sum(v[i] * A[i][j] for i in range(len(v))) for j in range(len(A[0]))]
