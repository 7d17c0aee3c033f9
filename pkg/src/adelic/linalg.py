"""Small exact linear algebra over Q, number fields, Z and local fields.

Matrices are lists of rows.  The generic routines only need ``+ - * /`` on
entries plus a zero test; local-field entries are pivoted by least valuation
so elimination never divides by a non-minimal pivot.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd

from .errors import ShapeMismatch, SingularToPrecision


def is_zero(x) -> bool:
    z = getattr(x, "is_zero", None)
    return z() if z is not None else x == 0


def _pivot_key(x):
    return getattr(x, "valuation", 0)


def shape(M):
    return (len(M), len(M[0]) if M else 0)


def transpose(M, ncols=None):
    if not M:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*M)]


def matmul(A, B, zero=0):
    if A and B and len(A[0]) != len(B):
        raise ShapeMismatch(f"cannot multiply {shape(A)} by {shape(B)}")
    n = len(B[0]) if B else 0
    out = []
    for row in A:
        new = []
        for j in range(n):
            acc = zero
            for a, brow in zip(row, B):
                acc = acc + a * brow[j]
            new.append(acc)
        out.append(new)
    return out


def identity(n, one=1, zero=0):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def rref(M):
    """Reduced row echelon form.  Returns ``(R, pivot_columns)``."""
    R = [list(r) for r in M]
    rows, cols = shape(R)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        cands = [i for i in range(r, rows) if not is_zero(R[i][c])]
        if not cands:
            continue
        i = min(cands, key=lambda i: _pivot_key(R[i][c]))
        R[r], R[i] = R[i], R[r]
        piv = R[r][c]
        R[r] = [x / piv for x in R[r]]
        for k in range(rows):
            if k != r and not is_zero(R[k][c]):
                f = R[k][c]
                R[k] = [a - f * b for a, b in zip(R[k], R[r])]
        pivots.append(c)
        r += 1
    return R, pivots


def rank(M) -> int:
    if not M or not M[0]:
        return 0
    return len(rref(M)[1])


def kernel(M, ncols, zero, one):
    """Column basis (as a ``ncols x k`` matrix) of the right kernel of ``M``."""
    if not M:
        return identity(ncols, one, zero)
    R, pivots = rref(M)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for r, pc in enumerate(pivots):
            v[pc] = zero - R[r][fc]
        basis.append(v)
    return transpose(basis, ncols)


def det(M, one=1):
    n = len(M)
    if n == 0:
        return one
    A = [list(r) for r in M]
    result = one
    for c in range(n):
        cands = [i for i in range(c, n) if not is_zero(A[i][c])]
        if not cands:
            raise SingularToPrecision("matrix is singular")
        i = min(cands, key=lambda i: _pivot_key(A[i][c]))
        if i != c:
            A[c], A[i] = A[i], A[c]
            result = -result
        piv = A[c][c]
        result = result * piv
        for k in range(c + 1, n):
            if not is_zero(A[k][c]):
                f = A[k][c] / piv
                A[k] = [a - f * b for a, b in zip(A[k], A[c])]
    return result


def inverse(M, zero, one):
    n = len(M)
    aug = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(M)]
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise SingularToPrecision("matrix is singular")
    return [row[n:] for row in R[:n]]


# integer matrices


def hnf_columns(M, row_order=None):
    """Column Hermite form of an integer matrix.

    Returns ``(H, U, rank)`` with ``M @ U == H`` and ``U`` unimodular.  Pivot rows
    are visited in ``row_order``; the nonzero columns of ``H`` come first and
    entries left of a pivot are reduced into ``[0, pivot)``.
    """
    m, n = shape(M)
    A = [list(map(int, r)) for r in M]
    U = identity(n)
    order = list(range(m)) if row_order is None else list(row_order)

    def colop(j, k, a, b, c, d):
        # (col_j, col_k) <- (a*col_j + b*col_k, c*col_j + d*col_k)
        for X in (A, U):
            for row in X:
                x, y = row[j], row[k]
                row[j], row[k] = a * x + b * y, c * x + d * y

    col = 0
    pivots = []
    for i in order:
        if col == n:
            break
        for k in range(col + 1, n):
            if A[i][k] == 0:
                continue
            x, y = A[i][col], A[i][k]
            g, s, t = _xgcd(x, y)
            colop(col, k, s, t, -y // g, x // g)
        if A[i][col] == 0:
            continue
        if A[i][col] < 0:
            for X in (A, U):
                for row in X:
                    row[col] = -row[col]
        piv = A[i][col]
        for k in range(col):
            q = A[i][k] // piv
            if q:
                colop(k, col, 1, -q, 0, 1)
        pivots.append((i, col))
        col += 1
    return A, U, col


def _xgcd(a, b):
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a - (a // b) * b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def integer_kernel(M, ncols):
    """Saturated integer basis (``ncols x k``) of the kernel of an integer matrix."""
    if not M:
        return identity(ncols)
    _, U, r = hnf_columns(M)
    K = [row[r:] for row in U]
    if not K or not K[0]:
        return [[] for _ in range(ncols)]
    H, _, _ = hnf_columns(K)
    return [row[: len(K[0])] for row in H]


def clear_denominators(M):
    """Scale each row of a rational matrix to a primitive integer row."""
    out = []
    for row in M:
        den = 1
        for x in row:
            den = den * Fraction(x).denominator // gcd(den, Fraction(x).denominator)
        ints = [int(Fraction(x) * den) for x in row]
        g = 0
        for x in ints:
            g = gcd(g, x)
        out.append([x // g for x in ints] if g > 1 else ints)
    return out
