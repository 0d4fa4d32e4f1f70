"""Exact linear algebra over the rationals.

Rows are scaled to integers and reduced with fraction-free (Bareiss)
elimination.  Pivoting is deterministic: columns are scanned left to right
and the first row holding a nonzero entry becomes the pivot row.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence

Matrix = Sequence[Sequence[Fraction]]


def _integer_row(row) -> list[int]:
    row = [Fraction(v) for v in row]
    m = 1
    for v in row:
        m = lcm(m, v.denominator)
    return [int(v * m) for v in row]


def echelon(rows: Matrix, ncols: int | None = None) -> tuple[list[list[int]], list[int]]:
    """Integer row echelon form of ``rows`` and its pivot columns."""
    M = [_integer_row(r) for r in rows]
    if ncols is None:
        ncols = len(M[0]) if M else 0
    for r in M:
        if len(r) != ncols:
            raise ValueError("ragged matrix")
    nrows = len(M)
    prev = 1
    k = 0
    pivots = []
    for col in range(ncols):
        if k >= nrows:
            break
        piv = next((r for r in range(k, nrows) if M[r][col]), None)
        if piv is None:
            continue
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
        pk = M[k]
        a = pk[col]
        for i in range(k + 1, nrows):
            ri = M[i]
            b = ri[col]
            new = [0] * (col + 1)
            for j in range(col + 1, ncols):
                q, rem = divmod(a * ri[j] - b * pk[j], prev)
                assert rem == 0, "Bareiss division was not exact"
                new.append(q)
            M[i] = new
        pivots.append(col)
        prev = a
        k += 1
    return M, pivots


def rank(rows: Matrix, ncols: int | None = None) -> int:
    if not rows:
        return 0
    return len(echelon(rows, ncols)[1])


def _rref(rows: Matrix, ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    E, pivots = echelon(rows, ncols)
    R = [[Fraction(v) for v in E[i]] for i in range(len(pivots))]
    for i in reversed(range(len(pivots))):
        c = pivots[i]
        inv = 1 / R[i][c]
        R[i] = [v * inv for v in R[i]]
        for j in range(i):
            f = R[j][c]
            if f:
                R[j] = [a - f * b for a, b in zip(R[j], R[i])]
    return R, pivots


def nullspace(rows: Matrix, ncols: int) -> list[list[Fraction]]:
    """Basis of ``{v : rows @ v = 0}``; one vector per free column, that entry set to 1."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    R, pivots = _rref(rows, ncols)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for i, c in enumerate(pivots):
            v[c] = -R[i][free]
        basis.append(v)
    return basis


def solve(rows: Matrix, rhs: Sequence[Fraction], ncols: int) -> list[Fraction] | None:
    """One solution of ``rows @ v = rhs`` (free variables set to 0), or None."""
    if len(rows) != len(rhs):
        raise ValueError("right-hand side length does not match row count")
    if not rows:
        return [Fraction(0)] * ncols
    aug = [list(r) + [Fraction(b)] for r, b in zip(rows, rhs)]
    R, pivots = _rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    v = [Fraction(0)] * ncols
    for i, c in enumerate(pivots):
        v[c] = R[i][ncols]
    return v


class CoordIndex:
    """Assigns consecutive column numbers to hashable keys on first sight."""

    def __init__(self, keys=()):
        self.index: dict = {}
        for k in keys:
            self.add(k)

    def add(self, key) -> int:
        if key not in self.index:
            self.index[key] = len(self.index)
        return self.index[key]

    def __len__(self):
        return len(self.index)

    def __contains__(self, key):
        return key in self.index

    def __getitem__(self, key):
        return self.index[key]


def coefficient_rows(images, keys=None) -> tuple[list[list[Fraction]], CoordIndex]:
    """Matrix whose column ``u`` holds the coefficients of ``images[u]``.

    Each image is a Poly or a nested sequence of Polys; rows are indexed by
    (position, monomial) keys collected in ``keys``.
    """
    from .poly import iter_coeffs

    keys = keys if keys is not None else CoordIndex()
    cols = []
    for img in images:
        col = {}
        for key, c in iter_coeffs(img):
            col[keys.add(key)] = c
        cols.append(col)
    rows = [[Fraction(0)] * len(cols) for _ in range(len(keys))]
    for u, col in enumerate(cols):
        for r, c in col.items():
            rows[r][u] = c
    return rows, keys


def coefficient_vector(obj, keys: CoordIndex) -> list[Fraction] | None:
    """Coordinates of ``obj`` against existing row keys; None if it uses a key outside them."""
    from .poly import iter_coeffs

    v = [Fraction(0)] * len(keys)
    for key, c in iter_coeffs(obj):
        if key not in keys:
            return None
        v[keys[key]] = c
    return v
