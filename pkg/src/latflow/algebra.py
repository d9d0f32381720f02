"""Core matrix algebra: the expanding diagonal, shear subgroups, and the
outer involution that swaps a system of linear forms with its dual.

Matrices are immutable, dense, and tagged with a scalar backend ("exact"
rationals or "float").  Group elements here are always square; the
determinant-one checks are exact on the exact backend and 1e-9-tolerant on
the float backend.

Conventions (fixed once, used everywhere):

- ``expanding_diagonal``: diag(prod(w), 1/w_1, ..., 1/w_{n-1}) where the
  weights w_j = exp(rate_j) are the per-form expansion factors.
- ``row_unipotent(shift)``: identity plus ``shift`` laid along the first row.
- ``column_unipotent(shift)``: identity plus ``shift`` reversed down the last
  column; equals ``dual_involution(row_unipotent(shift))``.
- ``dual_involution(g)``: W (g^-1)^T W with W the coordinate reversal.  It is
  an involutive automorphism of SL(n) and exchanges the two shear families.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import linalg
from .backend import (
    EXACT,
    FLOAT,
    BackendMismatch,
    check_same_backend,
    format_scalar,
    parse_scalar,
    scalar,
)

_DET_TOL = 1e-9


class ExactMatrix:
    """Immutable dense matrix over one scalar backend."""

    __slots__ = ("rows", "nrows", "ncols", "backend")

    def __init__(self, rows, backend=EXACT):
        coerced = tuple(tuple(scalar(x, backend) for x in row) for row in rows)
        if not coerced or not coerced[0]:
            raise ValueError("empty matrix")
        width = len(coerced[0])
        if any(len(r) != width for r in coerced):
            raise ValueError("ragged rows")
        object.__setattr__(self, "rows", coerced)
        object.__setattr__(self, "nrows", len(coerced))
        object.__setattr__(self, "ncols", width)
        object.__setattr__(self, "backend", backend)

    def __setattr__(self, *a):  # immutability
        raise AttributeError("ExactMatrix is immutable")

    def __reduce__(self):  # __slots__ + frozen setattr need explicit pickling
        return (ExactMatrix, (self.rows, self.backend))

    # -- constructors ------------------------------------------------------
    @classmethod
    def identity(cls, n, backend=EXACT):
        return cls(linalg.identity(n), backend)

    @classmethod
    def diagonal(cls, entries, backend=EXACT):
        n = len(entries)
        return cls(
            [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)],
            backend,
        )

    @classmethod
    def from_columns(cls, cols, backend=EXACT):
        return cls(list(zip(*cols)), backend)

    # -- access ------------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def row(self, i):
        return self.rows[i]

    def column(self, j):
        return tuple(r[j] for r in self.rows)

    def columns(self):
        return tuple(self.column(j) for j in range(self.ncols))

    def _lists(self):
        return [list(r) for r in self.rows]

    # -- arithmetic --------------------------------------------------------
    def __matmul__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        check_same_backend(self.backend, other.backend)
        return ExactMatrix(linalg.mat_mul(self._lists(), other._lists()), self.backend)

    def apply(self, vec):
        """Matrix-vector product; returns a tuple."""
        v = [scalar(x, self.backend) for x in vec]
        return tuple(linalg.mat_vec(self._lists(), v))

    def transpose(self):
        return ExactMatrix(linalg.transpose(self._lists()), self.backend)

    def inverse(self):
        return ExactMatrix(
            linalg.inverse(self._lists(), approx=self.backend == FLOAT), self.backend
        )

    def det(self):
        return linalg.det(self._lists(), approx=self.backend == FLOAT)

    def trace(self):
        return sum(self.rows[i][i] for i in range(min(self.nrows, self.ncols)))

    def scale(self, c):
        c = scalar(c, self.backend)
        return ExactMatrix([[c * x for x in row] for row in self.rows], self.backend)

    def add(self, other):
        check_same_backend(self.backend, other.backend)
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ValueError("shape mismatch")
        return ExactMatrix(
            [[x + y for x, y in zip(r, s)] for r, s in zip(self.rows, other.rows)],
            self.backend,
        )

    # -- comparisons / conversions ------------------------------------------
    def __eq__(self, other):
        return (
            isinstance(other, ExactMatrix)
            and self.backend == other.backend
            and self.rows == other.rows
        )

    def __hash__(self):
        return hash((self.backend, self.rows))

    def close_to(self, other, tol=_DET_TOL):
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            return False
        return all(
            abs(float(x) - float(y)) <= tol
            for r, s in zip(self.rows, other.rows)
            for x, y in zip(r, s)
        )

    def to_float(self):
        if self.backend == FLOAT:
            return self
        return ExactMatrix([[float(x) for x in row] for row in self.rows], FLOAT)

    def is_unimodular(self):
        d = self.det()
        if self.backend == EXACT:
            return d == 1 or d == -1
        return abs(abs(float(d)) - 1.0) <= _DET_TOL

    def has_det_one(self):
        d = self.det()
        if self.backend == EXACT:
            return d == 1
        return abs(float(d) - 1.0) <= _DET_TOL

    # -- serialization -------------------------------------------------------
    def to_json(self):
        return {
            "kind": "matrix",
            "backend": self.backend,
            "rows": [[format_scalar(x, self.backend) for x in row] for row in self.rows],
        }

    @classmethod
    def from_json(cls, obj):
        if obj.get("kind") != "matrix":
            raise ValueError("not a serialized matrix")
        backend = obj["backend"]
        return cls(
            [[parse_scalar(x, backend) for x in row] for row in obj["rows"]], backend
        )

    def __repr__(self):
        return "ExactMatrix(%r, backend=%r)" % (
            [list(r) for r in self.rows],
            self.backend,
        )


@dataclass(frozen=True)
class ExpansionRates:
    """Ordered expansion data for the diagonal flow on SL(n).

    Stores the multiplicative weights w_j = exp(rate_j), j = 1..n-1, which
    must satisfy w_1 >= w_2 >= ... >= w_{n-1} >= 1 (i.e. the log rates are
    nonincreasing and nonnegative).  On the exact backend the weights are
    rationals, so the full diagonal matrix stays exact.
    """

    weights: tuple
    backend: str = EXACT

    def __post_init__(self):
        w = tuple(scalar(x, self.backend) for x in self.weights)
        if not w:
            raise ValueError("need at least one weight (n >= 2)")
        for a, b in zip(w, w[1:]):
            if not a >= b:
                raise ValueError("weights must be nonincreasing: %r" % (w,))
        if not w[-1] >= 1:
            raise ValueError("weights must be >= 1: %r" % (w,))
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_rates(cls, rates):
        """Float-backend constructor from additive (log) rates."""
        return cls(tuple(math.exp(float(t)) for t in rates), FLOAT)

    @property
    def n(self):
        return len(self.weights) + 1

    def rates(self):
        return tuple(math.log(float(w)) for w in self.weights)

    def total_weight(self):
        p = self.weights[0]
        for w in self.weights[1:]:
            p = p * w
        return p

    def to_json(self):
        return {
            "kind": "expansion-rates",
            "backend": self.backend,
            "weights": [format_scalar(w, self.backend) for w in self.weights],
        }

    @classmethod
    def from_json(cls, obj):
        if obj.get("kind") != "expansion-rates":
            raise ValueError("not serialized expansion rates")
        backend = obj["backend"]
        return cls(tuple(parse_scalar(w, backend) for w in obj["weights"]), backend)


def expanding_diagonal(rates: ExpansionRates) -> ExactMatrix:
    """diag(prod w, 1/w_1, ..., 1/w_{n-1}): expands the first coordinate,
    contracts each remaining coordinate by its own weight."""
    one = scalar(1, rates.backend)
    entries = [rates.total_weight()] + [one / w for w in rates.weights]
    return ExactMatrix.diagonal(entries, rates.backend)


def row_unipotent(shift, backend=EXACT) -> ExactMatrix:
    """Identity plus the shift vector along the first row."""
    s = [scalar(x, backend) for x in shift]
    n = len(s) + 1
    rows = linalg.identity(n)
    rows = [[scalar(x, backend) for x in row] for row in rows]
    for j, x in enumerate(s):
        rows[0][j + 1] = rows[0][j + 1] + x
    return ExactMatrix(rows, backend)


def column_unipotent(shift, backend=EXACT) -> ExactMatrix:
    """Identity plus the reversed shift vector down the last column."""
    s = [scalar(x, backend) for x in shift]
    n = len(s) + 1
    rows = [[scalar(x, backend) for x in row] for row in linalg.identity(n)]
    for i in range(n - 1):
        rows[i][n - 1] = rows[i][n - 1] + s[n - 2 - i]
    return ExactMatrix(rows, backend)


def reversal_permutation(n, backend=EXACT) -> ExactMatrix:
    """The permutation matrix sending e_i to e_{n+1-i} (an involution)."""
    return ExactMatrix(
        [[1 if j == n - 1 - i else 0 for j in range(n)] for i in range(n)], backend
    )


def dual_involution(g: ExactMatrix) -> ExactMatrix:
    """W (g^-1)^T W: the outer automorphism exchanging primal and dual shears.

    Conjugation by the reversal W is done by index flipping rather than two
    matrix products.
    """
    it = linalg.transpose(linalg.inverse(g._lists(), approx=g.backend == FLOAT))
    n = len(it)
    flipped = [[it[n - 1 - i][n - 1 - j] for j in range(n)] for i in range(n)]
    return ExactMatrix(flipped, g.backend)


def doubled(g: ExactMatrix):
    """The pair (g, dual_involution(g)) acting on doubled lattices."""
    return (g, dual_involution(g))


def _entries_equal(x, y, backend):
    if backend == EXACT:
        return x == y
    return abs(float(x) - float(y)) <= _DET_TOL


def is_block_stabilizer(g: ExactMatrix, m: int) -> bool:
    """Membership in the subgroup fixing e_{m+1}, ..., e_n and preserving the
    span of e_1..e_m with determinant one on it: shape [[A, *], [0, I]]."""
    n = g.nrows
    if not 1 <= m <= n:
        raise ValueError("block size out of range")
    for i in range(m, n):
        for j in range(n):
            want = 1 if i == j else 0
            if not _entries_equal(g.rows[i][j], want, g.backend):
                return False
    top = [list(g.rows[i][:m]) for i in range(m)]
    d = linalg.det(top, approx=g.backend == FLOAT)
    if g.backend == EXACT:
        return d == 1
    return abs(float(d) - 1.0) <= _DET_TOL


def is_dual_block_stabilizer(g: ExactMatrix, m: int) -> bool:
    """Membership in the mirror subgroup of shape [[I, *], [0, A]] with the
    lower-right m x m block of determinant one."""
    n = g.nrows
    if not 1 <= m <= n:
        raise ValueError("block size out of range")
    for j in range(n - m):
        for i in range(n):
            want = 1 if i == j else 0
            if not _entries_equal(g.rows[i][j], want, g.backend):
                return False
    bot = [list(g.rows[i][n - m :]) for i in range(n - m, n)]
    d = linalg.det(bot, approx=g.backend == FLOAT)
    if g.backend == EXACT:
        return d == 1
    return abs(float(d) - 1.0) <= _DET_TOL
