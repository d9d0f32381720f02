"""Small dense linear algebra over exact rationals or floats.

Everything in this package works at n <= ~35 (adjoint of sl(6)), so plain
list-of-lists Gaussian elimination is the right tool; no numpy.  Matrices are
lists of rows.  The exact routines assume entries support field arithmetic
and exact comparison with 0 (ints, Fraction, mpq); the float variants pick
pivots by magnitude.
"""

from __future__ import annotations

from .backend import EXACT, FLOAT, Rat, rat, rat_floor


def identity(n, one=1, zero=0):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_mul(a, b):
    n, m, p = len(a), len(b[0]), len(b)
    if len(a[0]) != p:
        raise ValueError("shape mismatch %dx%d @ %dx%d" % (n, len(a[0]), p, m))
    out = []
    for i in range(n):
        ai = a[i]
        row = []
        for j in range(m):
            s = ai[0] * b[0][j]
            for k in range(1, p):
                s = s + ai[k] * b[k][j]
            row.append(s)
        out.append(row)
    return out


def mat_vec(a, v):
    if len(a[0]) != len(v):
        raise ValueError("shape mismatch")
    out = []
    for row in a:
        s = row[0] * v[0]
        for k in range(1, len(v)):
            s = s + row[k] * v[k]
        out.append(s)
    return out


def transpose(a):
    return [list(col) for col in zip(*a)]


def dot(u, v):
    s = u[0] * v[0]
    for x, y in zip(u[1:], v[1:]):
        s = s + x * y
    return s


def _pivot_index(col, start, approx):
    if approx:
        best, arg = 0.0, -1
        for i in range(start, len(col)):
            if abs(col[i]) > best:
                best, arg = abs(col[i]), i
        return arg if best > 0.0 else -1
    for i in range(start, len(col)):
        if col[i] != 0:
            return i
    return -1


def det(a, approx=False):
    n = len(a)
    m = [list(row) for row in a]
    sign = 1
    result_one = m[0][0] - m[0][0] + 1 if not approx else 1.0  # typed one
    prod = result_one
    for j in range(n):
        piv = _pivot_index([m[i][j] for i in range(n)], j, approx)
        if piv < 0:
            return prod * 0
        if piv != j:
            m[piv], m[j] = m[j], m[piv]
            sign = -sign
        p = m[j][j]
        prod = prod * p
        for i in range(j + 1, n):
            f = m[i][j] / p
            if f != 0:
                m[i] = [x - f * y for x, y in zip(m[i], m[j])]
    return prod * sign


def inverse(a, approx=False):
    n = len(a)
    m = [list(row) + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(a)]
    if not approx:
        m = [[rat(x) for x in row] for row in m]
    for j in range(n):
        piv = _pivot_index([m[i][j] for i in range(n)], j, approx)
        if piv < 0:
            raise ValueError("singular matrix")
        m[piv], m[j] = m[j], m[piv]
        p = m[j][j]
        m[j] = [x / p for x in m[j]]
        for i in range(n):
            if i != j and m[i][j] != 0:
                f = m[i][j]
                m[i] = [x - f * y for x, y in zip(m[i], m[j])]
    return [row[n:] for row in m]


def rref(a):
    """Exact reduced row echelon form; returns (rref_rows, pivot_columns)."""
    if not a:
        return [], []
    rows = [[rat(x) for x in row] for row in a]
    nrows, ncols = len(rows), len(rows[0])
    pivots = []
    r = 0
    for j in range(ncols):
        piv = -1
        for i in range(r, nrows):
            if rows[i][j] != 0:
                piv = i
                break
        if piv < 0:
            continue
        rows[piv], rows[r] = rows[r], rows[piv]
        p = rows[r][j]
        rows[r] = [x / p for x in rows[r]]
        for i in range(nrows):
            if i != r and rows[i][j] != 0:
                f = rows[i][j]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(j)
        r += 1
        if r == nrows:
            break
    return rows, pivots


def rank(a):
    return len(rref(a)[1]) if a else 0


def kernel_basis(a):
    """Exact basis of the right kernel {x : a x = 0}; list of vectors."""
    if not a:
        return []
    ncols = len(a[0])
    rows, pivots = rref(a)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = [Rat(0)] * ncols
        v[f] = Rat(1)
        for r, p in enumerate(pivots):
            v[p] = -rows[r][f]
        basis.append(v)
    return basis


def solve(a, b, approx=False):
    """Solve square a x = b."""
    inv = inverse(a, approx=approx)
    return mat_vec(inv, b)


def _round_nearest(x, approx):
    if approx:
        return int(x + 0.5) if x >= 0 else -int(-x + 0.5)
    return rat_floor(rat(x) + Rat(1, 2))


def gram_schmidt(cols):
    """Gram-Schmidt on a list of column vectors; returns (bstar, mu, norms2)."""
    n = len(cols)
    bstar, norms2 = [], []
    mu = [[0] * n for _ in range(n)]
    for i, b in enumerate(cols):
        v = list(b)
        for j in range(i):
            m = dot(b, bstar[j]) / norms2[j]
            mu[i][j] = m
            if m != 0:
                v = [x - m * y for x, y in zip(v, bstar[j])]
        bstar.append(v)
        c = dot(v, v)
        if c == 0:
            raise ValueError("linearly dependent columns")
        norms2.append(c)
    return bstar, mu, norms2


def lll_reduce(cols, backend=EXACT, max_iters=100_000):
    """LLL reduction (delta = 3/4) of a list of column vectors.

    Returns (reduced_cols, u_cols) where u_cols are the columns of the
    unimodular integer transform U with  B_reduced = B_original U,  so a
    coefficient vector x w.r.t. the reduced basis pulls back to U x.
    """
    approx = backend == FLOAT
    n = len(cols)
    b = [list(c) for c in cols]
    u = [[1 if i == j else 0 for i in range(n)] for j in range(n)]  # columns
    if n <= 1:
        return b, u
    delta = 0.75 if approx else Rat(3, 4)
    _, mu, c = gram_schmidt(b)
    k = 1
    iters = 0
    while k < n:
        iters += 1
        if iters > max_iters:
            if approx:
                break  # float LLL may cycle on degenerate input; basis still valid
            raise RuntimeError("LLL failed to terminate")  # pragma: no cover
        for j in range(k - 1, -1, -1):
            q = _round_nearest(mu[k][j], approx)
            if q != 0:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                u[k] = [x - q * y for x, y in zip(u[k], u[j])]
                _, mu, c = gram_schmidt(b)
        if c[k] >= (delta - mu[k][k - 1] * mu[k][k - 1]) * c[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            u[k], u[k - 1] = u[k - 1], u[k]
            _, mu, c = gram_schmidt(b)
            k = max(k - 1, 1)
    return b, u
