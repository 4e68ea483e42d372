"""Dense exact linear algebra over the rationals.

Matrices are sequences of rows whose entries are ``int`` or ``Fraction``.
Scalar results are ``Fraction``; matrix and vector results keep ints where
the inputs were integral. Nothing here ever
touches floating point.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import NamedTuple, Sequence

from .errors import DimensionMismatch, EmptySubset, NotSquare, NotSymmetric, Singular
from .graph_model import Multigraph, Tree, VertexSubset

Matrix = Sequence[Sequence[Fraction]]


class Inertia(NamedTuple):
    positive: int
    negative: int
    zero: int


def _square_size(m: Matrix) -> int:
    k = len(m)
    for row in m:
        if len(row) != k:
            raise NotSquare(f"expected a square matrix, got a row of length {len(row)} in {k} rows")
    return k


def _integer_rows(m: Matrix) -> tuple[list[list[int]], int]:
    """Scale each row to integers; returns the rows and the product of the scales."""
    if all(type(x) is int for row in m for x in row):
        return [list(row) for row in m], 1
    rows = []
    scale = 1
    for row in m:
        d = lcm(*(x.denominator for x in row)) if row else 1
        rows.append([x.numerator * (d // x.denominator) for x in row])
        scale *= d
    return rows, scale


def _bareiss(rows: list[list[int]]) -> int:
    """Fraction-free elimination; destroys ``rows``."""
    n = len(rows)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            for i in range(k + 1, n):
                if rows[i][k] != 0:
                    rows[k], rows[i] = rows[i], rows[k]
                    sign = -sign
                    break
            else:
                return 0
        rk = rows[k]
        pivot = rk[k]
        for i in range(k + 1, n):
            ri = rows[i]
            rik = ri[k]
            for j in range(k + 1, n):
                ri[j] = (ri[j] * pivot - rik * rk[j]) // prev
        prev = pivot
    return sign * rows[n - 1][n - 1]


def determinant(m: Matrix) -> Fraction:
    """Exact determinant; the empty matrix has determinant 1."""
    _square_size(m)
    rows, scale = _integer_rows(m)
    value = _bareiss(rows)
    return Fraction(value) if scale == 1 else Fraction(value, scale)


def _compact(x):
    # integer-valued Fractions become ints; keeps unit-length arithmetic cheap
    return x.numerator if x.denominator == 1 else x


def cofactor_sum(m: Matrix) -> Fraction:
    """Sum of all signed cofactors of ``m``.

    Uses det(m + J) - det(m) with J the all-ones matrix, which equals the
    cofactor sum for singular and nonsingular ``m`` alike. A 1x1 matrix has
    cofactor sum 1.
    """
    k = _square_size(m)
    if k == 0:
        raise DimensionMismatch("cofactor sum needs dimension at least 1")
    shifted = [[x + 1 for x in row] for row in m]
    return determinant(shifted) - determinant(m)


def cofactor_sum_direct(m: Matrix) -> Fraction:
    """Cofactor sum straight from the definition (k^2 determinants)."""
    k = _square_size(m)
    if k == 0:
        raise DimensionMismatch("cofactor sum needs dimension at least 1")
    total = Fraction(0)
    for i in range(k):
        for j in range(k):
            minor = [row[:j] + row[j + 1:] for r, row in enumerate(map(list, m)) if r != i]
            c = determinant(minor)
            total += -c if (i + j) % 2 else c
    return total


def solve(m: Matrix, rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve ``m x = rhs`` exactly by Gauss-Jordan elimination."""
    k = _square_size(m)
    if len(rhs) != k:
        raise DimensionMismatch(f"rhs has length {len(rhs)}, matrix has {k} rows")
    a = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(m, rhs)]
    for c in range(k):
        p = next((r for r in range(c, k) if a[r][c] != 0), None)
        if p is None:
            raise Singular("matrix is singular")
        a[c], a[p] = a[p], a[c]
        pivot_row = a[c]
        inv = 1 / pivot_row[c]
        for j in range(c, k + 1):
            pivot_row[j] *= inv
        for r in range(k):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                row = a[r]
                for j in range(c, k + 1):
                    row[j] -= f * pivot_row[j]
    return [row[k] for row in a]


def matvec(m: Matrix, v: Sequence[Fraction]) -> list[Fraction]:
    if any(len(row) != len(v) for row in m):
        raise DimensionMismatch("matrix columns do not match vector length")
    return [sum(x * y for x, y in zip(row, v)) for row in m]


def matmul(a: Matrix, b: Matrix) -> list[list[Fraction]]:
    cols = list(zip(*b))
    if a and len(a[0]) != len(b):
        raise DimensionMismatch("inner dimensions differ")
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def is_symmetric(m: Matrix) -> bool:
    k = _square_size(m)
    return all(m[i][j] == m[j][i] for i in range(k) for j in range(i + 1, k))


def _berkowitz(a: list[list[int]]) -> list[int]:
    """Coefficients [1, c1, ..., cn] of det(xI - a), division free."""
    n = len(a)
    if n == 0:
        return [1]
    poly = [1, -a[0][0]]
    for r in range(1, n):
        col = [a[i][r] for i in range(r)]
        row = a[r][:r]
        toeplitz = [1, -a[r][r]]
        for _ in range(r):
            toeplitz.append(-sum(x * y for x, y in zip(row, col)))
            col = [sum(x * y for x, y in zip(a[i][:r], col)) for i in range(r)]
        poly = [
            sum(toeplitz[i - j] * poly[j] for j in range(max(0, i - r - 1), min(i, r) + 1))
            for i in range(r + 2)
        ]
    return poly


def _common_scale(m: Matrix) -> tuple[list[list[int]], int]:
    """Multiply the whole matrix by one common denominator."""
    if all(type(x) is int for row in m for x in row):
        return [list(row) for row in m], 1
    d = lcm(*(x.denominator for row in m for x in row)) if m else 1
    return [[x.numerator * (d // x.denominator) for x in row] for row in m], d


def characteristic_polynomial(m: Matrix) -> list[Fraction]:
    """Coefficients [1, c1, ..., ck] of det(xI - m), highest degree first."""
    _square_size(m)
    ints, d = _common_scale(m)
    return [Fraction(c, d**i) for i, c in enumerate(_berkowitz(ints))]


def _sign_changes(seq: Sequence[int]) -> int:
    signs = [x > 0 for x in seq if x != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def inertia(m: Matrix) -> Inertia:
    """Exact eigenvalue sign counts of a symmetric rational matrix.

    The characteristic polynomial of a symmetric matrix has only real roots,
    so Descartes' rule of signs counts positive and negative roots exactly.
    """
    k = _square_size(m)
    if not is_symmetric(m):
        raise NotSymmetric("inertia needs a symmetric matrix")
    if k == 0:
        return Inertia(0, 0, 0)
    ints, _ = _common_scale(m)
    coeffs = _berkowitz(ints)  # coefficient of x^(k-i) at position i
    zero = 0
    while coeffs[k - zero] == 0:
        zero += 1
    positive = _sign_changes(coeffs)
    negative = _sign_changes([c if (k - i) % 2 == 0 else -c for i, c in enumerate(coeffs)])
    return Inertia(positive, negative, zero)


def incidence_matrix(g: Tree | Multigraph) -> list[list[int]]:
    """Signed vertex-edge incidence: +1 at the head, -1 at the tail."""
    b = [[0] * len(g.edges) for _ in range(g.n)]
    for j, e in enumerate(g.edges):
        if e.tail != e.head:
            b[e.head][j] = 1
            b[e.tail][j] = -1
    return b


def laplacian(g: Tree | Multigraph) -> list[list[Fraction]]:
    """B diag(1/length) B^T, accumulated edge by edge.

    Entries are ints where integral, Fractions otherwise.
    """
    lap = [[0] * g.n for _ in range(g.n)]
    for e in g.edges:
        if e.tail == e.head:
            continue
        c = _compact(1 / Fraction(e.length))
        u, v = e.tail, e.head
        lap[u][u] += c
        lap[v][v] += c
        lap[u][v] -= c
        lap[v][u] -= c
    return lap


def laplacian_minor(g: Tree | Multigraph, s: VertexSubset) -> list[list[Fraction]]:
    """Principal submatrix of the Laplacian on the vertices outside ``s``."""
    if not s:
        raise EmptySubset("laplacian minor needs a nonempty subset")
    lap = laplacian(g)
    keep = [v for v in range(g.n) if v not in set(s)]
    return [[lap[i][j] for j in keep] for i in keep]
