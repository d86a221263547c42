"""Small exact matrix helpers over Fraction.  Matrices are tuples of row tuples."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = tuple  # tuple[tuple[Fraction, ...], ...]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def diagonal(entries: Sequence) -> Matrix:
    n = len(entries)
    return tuple(tuple(Fraction(entries[i]) if i == j else Fraction(0) for j in range(n))
                 for i in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(a: Matrix, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def column(a: Matrix, j: int) -> tuple:
    return tuple(row[j] for row in a)


def from_columns(cols: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(c[i]) for c in cols) for i in range(len(cols[0])))


def _echelon(a: Matrix):
    """Row reduction.  Returns (rank, det, pivot columns, reduced rows)."""
    m = [list(map(Fraction, row)) for row in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    det = Fraction(1)
    pivots = []
    r = 0
    for c in range(cols):
        k = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if k is None:
            det = Fraction(0)
            continue
        if k != r:
            m[r], m[k] = m[k], m[r]
            det = -det
        piv = m[r][c]
        det *= piv
        for i in range(r + 1, rows):
            f = m[i][c] / piv
            if f:
                mi, mr = m[i], m[r]
                for j in range(c, cols):
                    mi[j] -= f * mr[j]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return r, det, pivots, m


def det(a: Matrix) -> Fraction:
    n = len(a)
    if n == 0:
        return Fraction(1)
    rank, d, _, _ = _echelon(a)
    return d if rank == n else Fraction(0)


def rank(a: Matrix) -> int:
    return _echelon(a)[0]


def independent_columns(cols: Sequence[Sequence]) -> list[int]:
    """Indices of a maximal linearly independent subset of the given columns."""
    a = transpose(from_columns(cols))  # rows = generators
    # Gaussian elimination on the generator rows, keeping track of which survive.
    basis: list[list[Fraction]] = []
    pivcols: list[int] = []
    chosen = []
    for idx, g in enumerate(a):
        v = list(g)
        for b, pc in zip(basis, pivcols):
            if v[pc]:
                f = v[pc] / b[pc]
                v = [x - f * y for x, y in zip(v, b)]
        pc = next((j for j, x in enumerate(v) if x), None)
        if pc is not None:
            basis.append(v)
            pivcols.append(pc)
            chosen.append(idx)
    return chosen


def inverse(a: Matrix) -> Matrix:
    n = len(a)
    m = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(a)]
    for c in range(n):
        k = next((i for i in range(c, n) if m[i][c] != 0), None)
        if k is None:
            raise ZeroDivisionError("singular matrix")
        m[c], m[k] = m[k], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return tuple(tuple(row[n:]) for row in m)


def vec(a: Matrix) -> tuple:
    """Column-major flattening: entry (i, j) goes to index i + d*j."""
    d = len(a)
    return tuple(a[i][j] for j in range(d) for i in range(d))


def unvec(v: Sequence, d: int) -> Matrix:
    return tuple(tuple(Fraction(v[i + d * j]) for j in range(d)) for i in range(d))
