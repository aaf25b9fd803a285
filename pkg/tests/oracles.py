"""Independent reference solvers used to check the banded implementations.

These deliberately share no code with the package: the float oracle is
LAPACK's dense partial-pivoting solve via numpy, and the exact oracles are
textbook dense eliminations over Fractions (Bareiss fraction-free, and
plain Gaussian elimination with partial pivoting by magnitude).
"""

from fractions import Fraction

import numpy as np


def dense_solve(system):
    """Dense partial-pivoting solve of a banded LinearSystem (float)."""
    dense = np.asarray(system.matrix.to_dense(), dtype=np.float64)
    rhs = np.asarray(system.rhs, dtype=np.float64)
    return np.linalg.solve(dense, rhs)


def rel_inf_err(x, ref):
    x = np.asarray(x, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    return float(np.max(np.abs(x - ref)) / np.max(np.abs(ref)))


def bareiss_solve(matrix_rows, rhs):
    """Fraction-free (Bareiss) elimination over exact integers/rationals.

    matrix_rows: list of list of Fraction-compatible scalars (dense).
    Returns the exact solution as a list of Fractions.
    """
    n = len(matrix_rows)
    a = [[Fraction(v) for v in row] + [Fraction(rhs[i])]
         for i, row in enumerate(matrix_rows)]
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if a[r][k] != 0), None)
            if swap is None:
                raise ZeroDivisionError("singular matrix in Bareiss oracle")
            a[k], a[swap] = a[swap], a[k]
        for i in range(k + 1, n):
            for j in range(k + 1, n + 1):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
            a[i][k] = Fraction(0)
        prev = a[k][k]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = a[i][n]
        for j in range(i + 1, n):
            acc -= a[i][j] * x[j]
        if a[i][i] == 0:
            raise ZeroDivisionError("singular matrix in Bareiss oracle")
        x[i] = acc / a[i][i]
    return x


def pivoted_fraction_solve(matrix_rows, rhs):
    """Gaussian elimination with partial pivoting, exact over Fractions."""
    n = len(matrix_rows)
    a = [[Fraction(v) for v in row] + [Fraction(rhs[i])]
         for i, row in enumerate(matrix_rows)]
    for k in range(n):
        piv = max(range(k, n), key=lambda r: abs(a[r][k]))
        if a[piv][k] == 0:
            raise ZeroDivisionError("singular matrix in pivoted oracle")
        a[k], a[piv] = a[piv], a[k]
        for i in range(k + 1, n):
            if a[i][k] == 0:
                continue
            factor = a[i][k] / a[k][k]
            for j in range(k, n + 1):
                a[i][j] -= factor * a[k][j]
    x = [Fraction(0)] * n
    for i in range(n - 1, -1, -1):
        acc = a[i][n]
        for j in range(i + 1, n):
            acc -= a[i][j] * x[j]
        x[i] = acc / a[i][i]
    return x


def exact_dense_rows(matrix):
    """Dense row list of a banded matrix with exact scalars preserved."""
    dense = matrix.to_dense()
    return [list(row) for row in dense.tolist()]
