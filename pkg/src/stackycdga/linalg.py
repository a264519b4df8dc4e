"""Exact linear algebra over Q.

Matrices are lists of rows of :class:`fractions.Fraction`.  Because a
matrix with no rows loses its column count, every function that needs the
shape takes ``ncols`` explicitly.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

Matrix = List[List[Fraction]]
Vector = List[Fraction]


def zeros(nrows: int, ncols: int) -> Matrix:
    return [[Fraction(0)] * ncols for _ in range(nrows)]


def identity(n: int) -> Matrix:
    m = zeros(n, n)
    for i in range(n):
        m[i][i] = Fraction(1)
    return m


def copy(m: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in m]


def matmul(a: Matrix, b: Matrix, inner: int, ncols: int) -> Matrix:
    """Product of an ``len(a) x inner`` and an ``inner x ncols`` matrix."""
    out = zeros(len(a), ncols)
    for i, row in enumerate(a):
        orow = out[i]
        for k in range(inner):
            x = row[k]
            if x:
                brow = b[k]
                for j in range(ncols):
                    if brow[j]:
                        orow[j] += x * brow[j]
    return out


def matvec(a: Matrix, v: Vector) -> Vector:
    return [sum((x * y for x, y in zip(row, v) if x and y), Fraction(0)) for row in a]


def transpose(m: Matrix, ncols: int) -> Matrix:
    return [[row[j] for row in m] for j in range(ncols)]


def is_zero(m: Matrix) -> bool:
    return all(not x for row in m for x in row)


def rref(m: Matrix, ncols: int) -> Tuple[Matrix, List[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    a = copy(m)
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        if r >= len(a):
            break
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        prow = a[r]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], prow)]
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(m: Matrix, ncols: int) -> int:
    return len(rref(m, ncols)[1])


def nullspace(m: Matrix, ncols: int) -> List[Vector]:
    """A basis of ``{v : m v = 0}``."""
    red, pivots = rref(m, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(red, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def solve(a: Matrix, b: Vector, ncols: int) -> Optional[Vector]:
    """One solution of ``a x = b`` or ``None`` if inconsistent."""
    aug = [list(row) + [Fraction(y)] for row, y in zip(a, b)]
    red, pivots = rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for row, p in zip(red, pivots):
        x[p] = row[ncols]
    return x


def in_span(vectors: Sequence[Vector], v: Vector) -> bool:
    if not any(v):
        return True
    if not vectors:
        return False
    n = len(v)
    return rank([list(u) for u in vectors], n) == rank([list(u) for u in vectors] + [list(v)], n)


def span_rank(vectors: Sequence[Vector], n: int) -> int:
    return rank([list(u) for u in vectors], n) if vectors else 0
