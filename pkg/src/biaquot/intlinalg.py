"""Exact integer linear algebra: ranks, kernels, Smith normal form.

All routines work on small dense matrices given as sequences of integer
rows. Rational arithmetic uses fractions.Fraction; results returned to
callers are plain integers.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

IntRow = tuple[int, ...]
IntMatrix = tuple[IntRow, ...]


def vec_gcd(v) -> int:
    g = 0
    for x in v:
        g = gcd(g, abs(x))
    return g


def primitive_vector(v) -> IntRow:
    """Divide an integer vector by the gcd of its entries (orientation kept)."""
    g = vec_gcd(v)
    if g == 0:
        raise ValueError("zero vector has no primitive form")
    return tuple(x // g for x in v)


def _rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    rows = [row[:] for row in rows]
    m = len(rows)
    n = len(rows[0]) if m else 0
    pivots: list[int] = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    return rows, pivots


def rational_rank(rows) -> int:
    mat = [[Fraction(x) for x in row] for row in rows]
    if not mat:
        return 0
    return len(_rref(mat)[1])


def left_kernel_basis(rows) -> list[IntRow]:
    """Primitive integer basis of {x : sum_i x_i * rows[i] = 0}."""
    m = len(rows)
    if m == 0:
        return []
    n = len(rows[0])
    # x is a null vector of the transpose.
    transposed = [[Fraction(rows[i][j]) for i in range(m)] for j in range(n)]
    red, pivots = _rref(transposed) if transposed else ([], [])
    free = [c for c in range(m) if c not in pivots]
    basis = []
    for c in free:
        vec = [Fraction(0)] * m
        vec[c] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -red[r][c]
        denom = 1
        for x in vec:
            denom = denom * x.denominator // gcd(denom, x.denominator)
        ints = tuple(int(x * denom) for x in vec)
        basis.append(primitive_vector(ints))
    return basis


def solve_in_span(rows, target) -> tuple[Fraction, ...] | None:
    """Rational coefficients l with sum_i l_i * rows[i] = target, or None.

    The rows are required to be linearly independent, so a solution is
    unique when it exists.
    """
    m = len(rows)
    if m == 0:
        return () if not any(target) else None
    n = len(rows[0])
    # Augmented system over the transpose: columns are the rows.
    aug = [[Fraction(rows[i][j]) for i in range(m)] + [Fraction(target[j])] for j in range(n)]
    red, pivots = _rref(aug)
    if m in pivots:
        return None  # inconsistent
    if len(pivots) != m:
        raise ValueError("rows are not linearly independent")
    sol = [Fraction(0)] * m
    for r, pc in enumerate(pivots):
        sol[pc] = red[r][m]
    return tuple(sol)


class SpanSolver:
    """Repeated exact solving of sum_i l_i * rows[i] = target.

    The rows must be linearly independent. One rational elimination is done
    up front; each solve is then a small integer matrix-vector product.
    """

    def __init__(self, rows):
        rows = [tuple(r) for r in rows]
        self.n_rows = len(rows)
        self.n_cols = len(rows[0]) if rows else 0
        k, l = self.n_cols, self.n_rows
        # RREF of [rows^T | I_k]; full column rank makes the left block I_l.
        aug = [
            [Fraction(rows[i][j]) for i in range(l)]
            + [Fraction(1 if t == j else 0) for t in range(k)]
            for j in range(k)
        ]
        red, pivots = _rref(aug) if aug else ([], [])
        # The augmented matrix has k pivots; the first l must sit in the
        # row-coefficient columns, which is exactly independence of the rows.
        if pivots[:l] != list(range(l)):
            raise ValueError("rows are not linearly independent")
        self.coeff_rows: list[tuple[tuple[int, ...], int]] = []
        self.check_rows: list[tuple[int, ...]] = []
        for r in range(k):
            row = red[r][l:]
            denom = 1
            for x in row:
                denom = denom * x.denominator // gcd(denom, x.denominator)
            ints = tuple(int(x * denom) for x in row)
            if r < l:
                self.coeff_rows.append((ints, denom))
            elif any(ints):
                self.check_rows.append(ints)

    def solve(self, target) -> tuple[Fraction, ...] | None:
        """Rational coefficients, or None when target is outside the span."""
        for row in self.check_rows:
            if sum(a * b for a, b in zip(row, target)) != 0:
                return None
        return tuple(
            Fraction(sum(a * b for a, b in zip(row, target)), den)
            for row, den in self.coeff_rows
        )


def _eye(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(rows) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """U, D, V with U @ rows @ V = D, U and V unimodular, D diagonal.

    Diagonal entries are non-negative and satisfy the divisibility chain
    d1 | d2 | ... .
    """
    D = [list(r) for r in rows]
    m = len(D)
    n = len(D[0]) if m else 0
    U = _eye(m)
    V = _eye(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        # row_dst += q * row_src
        D[dst] = [a + q * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in D:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        # Locate a pivot of least magnitude in the remaining block.
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if D[i][j] != 0 and (best is None or abs(D[i][j]) < abs(D[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    add_row(i, t, -q)
                    if D[i][t]:
                        swap_rows(i, t)
                        dirty = True
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    add_col(j, t, -q)
                    if D[t][j]:
                        swap_cols(j, t)
                        dirty = True
        # Enforce divisibility of later entries by the pivot.
        p = D[t][t]
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if D[i][j] % p:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(t, offender, 1)
            continue
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
        t += 1

    return (
        tuple(tuple(r) for r in U),
        tuple(tuple(r) for r in D),
        tuple(tuple(r) for r in V),
    )
