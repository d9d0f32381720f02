"""Weight-space machinery for wedge and adjoint representations of SL(n).

Fix block sizes m_1 > m_2 > ... > m_k >= 1 (all < n).  Each block size m
contributes the diagonal generator diag(m, -1, ..., -1, 0, ..., 0) (m minus
ones).  The standard basis of a wedge power or of the traceless matrices
consists of simultaneous eigenvectors of all these generators; the
per-generator eigenvalues make up the weight of a basis vector.  A growth
specification (one divergent closed form per block) classifies every weight
as expanding (+), bounded (0), or contracting (-), and the lemma verifiers
below check, by exact linear algebra, that vectors whose shear translates
avoid the expanding part must keep a nonzero bounded-or-better shadow.

Everything in this module runs on the exact backend.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from . import linalg
from .backend import EXACT, Rat, rat
from .algebra import ExactMatrix, row_unipotent


def block_generator(n, m) -> ExactMatrix:
    """diag(m, -1 x m, 0 x (n - m - 1)): the traceless diagonal generator
    attached to block size m."""
    if not 1 <= m < n:
        raise ValueError("need 1 <= m < n")
    return ExactMatrix.diagonal([m] + [-1] * m + [0] * (n - m - 1), EXACT)


def validate_block_sizes(n, sizes):
    sizes = tuple(int(m) for m in sizes)
    if not sizes:
        raise ValueError("need at least one block size")
    if any(not 1 <= m < n for m in sizes):
        raise ValueError("block sizes must lie in [1, n)")
    if any(a <= b for a, b in zip(sizes, sizes[1:])):
        raise ValueError("block sizes must be strictly decreasing")
    return sizes


@dataclass(frozen=True)
class RepSpace:
    """A wedge power of the standard representation, or the adjoint."""

    n: int
    kind: str
    degree: int = 1

    def __post_init__(self):
        if self.kind not in ("wedge", "adjoint"):
            raise ValueError("kind must be 'wedge' or 'adjoint'")
        if self.kind == "wedge" and not 1 <= self.degree <= self.n - 1:
            raise ValueError("wedge degree must lie in [1, n-1]")

    def labels(self):
        if self.kind == "wedge":
            return tuple(itertools.combinations(range(1, self.n + 1), self.degree))
        out = [("E", p, q) for p in range(1, self.n + 1) for q in range(1, self.n + 1) if p != q]
        out += [("H", i) for i in range(1, self.n)]
        return tuple(out)

    @property
    def dim(self):
        if self.kind == "wedge":
            d = 1
            for t in range(self.degree):
                d = d * (self.n - t) // (t + 1)
            return d
        return self.n * self.n - 1

    # polynomial degree of the matrix entries of the group action in the
    # entries of the acting matrix: minors of size d, or conjugation
    @property
    def entry_degree(self):
        return self.degree if self.kind == "wedge" else 2

    # -- adjoint coordinate helpers -----------------------------------------
    def _adjoint_decompose(self, mat_rows):
        coords = []
        n = self.n
        for lab in self.labels():
            if lab[0] == "E":
                _, p, q = lab
                coords.append(mat_rows[p - 1][q - 1])
            else:
                i = lab[1]
                coords.append(sum(mat_rows[j][j] for j in range(i)))
        return coords

    def _adjoint_compose(self, coords):
        n = self.n
        rows = [[Rat(0)] * n for _ in range(n)]
        labs = self.labels()
        h = [Rat(0)] * n  # partial sums, h[0] unused as h_0 = 0
        for lab, c in zip(labs, coords):
            if lab[0] == "E":
                _, p, q = lab
                rows[p - 1][q - 1] = rows[p - 1][q - 1] + c
            else:
                h[lab[1]] = c
        for j in range(n):
            # 0-based row j carries d_{j+1} = h_{j+1} - h_j with h_0 = h_n = 0
            cur = h[j + 1] if j + 1 <= n - 1 else Rat(0)
            prev = h[j] if j >= 1 else Rat(0)
            rows[j][j] = rows[j][j] + (cur - prev)
        return rows

    # -- actions --------------------------------------------------------------
    def group_matrix(self, g: ExactMatrix) -> ExactMatrix:
        """The representation matrix of a group element (exact backend)."""
        if g.backend != EXACT:
            raise ValueError("weight machinery runs on the exact backend")
        if g.nrows != self.n:
            raise ValueError("acting matrix must be %d x %d" % (self.n, self.n))
        labs = self.labels()
        if self.kind == "wedge":
            cols = []
            for J in labs:
                col = []
                for I in labs:
                    sub = [[g.rows[i - 1][j - 1] for j in J] for i in I]
                    col.append(linalg.det(sub))
                cols.append(col)
            return ExactMatrix.from_columns(cols, EXACT)
        ginv = g.inverse()
        cols = []
        for lab in labs:
            x = self._basis_matrix(lab)
            y = linalg.mat_mul(linalg.mat_mul(g._lists(), x), ginv._lists())
            cols.append(self._adjoint_decompose(y))
        return ExactMatrix.from_columns(cols, EXACT)

    def algebra_matrix(self, x: ExactMatrix) -> ExactMatrix:
        """The derived (Lie algebra) action of a traceless matrix."""
        if x.nrows != self.n:
            raise ValueError("acting matrix must be %d x %d" % (self.n, self.n))
        labs = self.labels()
        if self.kind == "wedge":
            index = {J: t for t, J in enumerate(labs)}
            cols = []
            for J in labs:
                col = [Rat(0)] * len(labs)
                for t, j in enumerate(J):
                    for p in range(1, self.n + 1):
                        c = x.rows[p - 1][j - 1]
                        if c == 0:
                            continue
                        res = _wedge_replace(J, t, p)
                        if res is None:
                            continue
                        J2, sign = res
                        col[index[J2]] = col[index[J2]] + sign * c
                cols.append(col)
            return ExactMatrix.from_columns(cols, EXACT)
        cols = []
        xl = x._lists()
        for lab in labs:
            y = self._basis_matrix(lab)
            comm = [
                [a - b for a, b in zip(r1, r2)]
                for r1, r2 in zip(linalg.mat_mul(xl, y), linalg.mat_mul(y, xl))
            ]
            cols.append(self._adjoint_decompose(comm))
        return ExactMatrix.from_columns(cols, EXACT)

    def _basis_matrix(self, lab):
        n = self.n
        rows = [[Rat(0)] * n for _ in range(n)]
        if lab[0] == "E":
            _, p, q = lab
            rows[p - 1][q - 1] = Rat(1)
        else:
            i = lab[1]
            rows[i - 1][i - 1] = Rat(1)
            rows[i][i] = Rat(-1)
        return rows

    def weight_of(self, lab, block_sizes):
        """Per-block eigenvalue tuple of a basis label."""
        sizes = validate_block_sizes(self.n, block_sizes)
        out = []
        for m in sizes:
            diag = [Rat(m)] + [Rat(-1)] * m + [Rat(0)] * (self.n - m - 1)
            if self.kind == "wedge":
                out.append(sum(diag[i - 1] for i in lab))
            elif lab[0] == "E":
                out.append(diag[lab[1] - 1] - diag[lab[2] - 1])
            else:
                out.append(Rat(0))
        return tuple(out)


def _wedge_replace(J, t, p):
    """In the wedge monomial J, replace slot t by e_p; (sorted, sign) or None."""
    if p == J[t]:
        return J, 1
    rest = J[:t] + J[t + 1 :]
    if p in rest:
        return None
    c = sum(1 for r in rest if r < p)
    new = tuple(sorted(rest + (p,)))
    sign = -1 if (t - c) % 2 else 1
    return new, sign


def weight_table(rep: RepSpace, block_sizes):
    """Ordered mapping label -> weight tuple."""
    return {lab: rep.weight_of(lab, block_sizes) for lab in rep.labels()}


@dataclass(frozen=True)
class GrowthSpec:
    """One divergent closed form c * i^p (a sum of such monomials) per block.

    layers[l] is a tuple of (coefficient, exponent) pairs; each layer must
    diverge to +infinity (its largest-exponent aggregate coefficient is
    positive with exponent > 0).  Exponents are rationals >= 0; evaluation
    is exact when all exponents are integers.
    """

    layers: tuple

    def __post_init__(self):
        cleaned = []
        for layer in self.layers:
            agg = {}
            for c, p in layer:
                c, p = rat(c), rat(p)
                if p < 0:
                    raise ValueError("negative exponents not supported")
                agg[p] = agg.get(p, Rat(0)) + c
            mono = tuple(sorted(((p, c) for p, c in agg.items() if c != 0), reverse=True))
            if not mono or mono[0][0] <= 0 or mono[0][1] <= 0:
                raise ValueError(
                    "each layer must diverge to +infinity; got %r" % (layer,)
                )
            cleaned.append(tuple((c, p) for p, c in mono))
        if not cleaned:
            raise ValueError("need at least one layer")
        object.__setattr__(self, "layers", tuple(cleaned))

    @classmethod
    def simple(cls, monomials):
        """One (coefficient, exponent) monomial per layer."""
        return cls(tuple((pair,) for pair in monomials))

    @property
    def k(self):
        return len(self.layers)

    def truncate(self, count):
        if not 1 <= count <= self.k:
            raise ValueError("truncation length out of range")
        return GrowthSpec(self.layers[:count])

    def classify(self, weight):
        """Sign of the limit of weight . t_i: '+', '-', or '0' (bounded)."""
        if len(weight) != self.k:
            raise ValueError("weight length mismatch")
        agg = {}
        for mu, layer in zip(weight, self.layers):
            mu = rat(mu)
            if mu == 0:
                continue
            for c, p in layer:
                if p > 0:
                    agg[p] = agg.get(p, Rat(0)) + mu * c
        for p in sorted(agg, reverse=True):
            if agg[p] > 0:
                return "+"
            if agg[p] < 0:
                return "-"
        return "0"

    def eval_float(self, i):
        i = float(i)
        return tuple(
            sum(float(c) * i ** float(p) for c, p in layer) for layer in self.layers
        )

    def eval_exact(self, i):
        out = []
        for layer in self.layers:
            total = Rat(0)
            for c, p in layer:
                if int(p.denominator) != 1:
                    raise ValueError("exact evaluation needs integer exponents")
                total = total + c * (Rat(i) ** int(p.numerator))
            out.append(total)
        return tuple(out)


@dataclass(frozen=True)
class WeightSplit:
    """Weights of a representation classified against a growth spec."""

    rep: RepSpace
    block_sizes: tuple
    growth: GrowthSpec
    labels: tuple
    weights: tuple
    classes: tuple

    def indices(self, cls):
        return tuple(i for i, c in enumerate(self.classes) if c == cls)

    def zero_weight_indices(self, first=None):
        """Indices whose first `first` weight entries all vanish (default:
        all of them — the fully invariant weight space)."""
        take = self.growth.k if first is None else first
        return tuple(
            i for i, w in enumerate(self.weights) if all(x == 0 for x in w[:take])
        )

    def project(self, vec, cls):
        keep = set(self.indices(cls))
        return tuple(x if i in keep else Rat(0) for i, x in enumerate(vec))


def split_spaces(rep: RepSpace, block_sizes, growth: GrowthSpec) -> WeightSplit:
    sizes = validate_block_sizes(rep.n, block_sizes)
    if len(sizes) != growth.k:
        raise ValueError("block count and growth layer count differ")
    labs = rep.labels()
    ws = tuple(rep.weight_of(lab, sizes) for lab in labs)
    cls = tuple(growth.classify(w) for w in ws)
    return WeightSplit(rep, sizes, growth, labs, ws, cls)


@dataclass(frozen=True)
class Subspace:
    """Exact subspace in canonical (reduced row echelon) form."""

    ambient_dim: int
    basis: tuple  # rref rows, tuple of tuples

    @classmethod
    def from_generators(cls, vecs, ambient_dim):
        vecs = [list(v) for v in vecs if any(x != 0 for x in v)]
        if not vecs:
            return cls(ambient_dim, ())
        rows, pivots = linalg.rref(vecs)
        basis = tuple(tuple(r) for r in rows[: len(pivots)])
        return cls(ambient_dim, basis)

    @property
    def dim(self):
        return len(self.basis)

    def contains(self, vec):
        if self.dim == 0:
            return all(x == 0 for x in vec)
        stacked = [list(b) for b in self.basis] + [list(vec)]
        return linalg.rank(stacked) == self.dim

    def is_contained_in(self, other: "Subspace"):
        return all(other.contains(b) for b in self.basis)

    def intersect(self, other: "Subspace"):
        if self.dim == 0 or other.dim == 0:
            return Subspace(self.ambient_dim, ())
        cols = [list(b) for b in self.basis] + [[-x for x in b] for b in other.basis]
        a = linalg.transpose(cols)  # ambient_dim rows, r1+r2 cols
        gens = []
        for kv in linalg.kernel_basis(a):
            coeffs = kv[: self.dim]
            vec = [Rat(0)] * self.ambient_dim
            for c, b in zip(coeffs, self.basis):
                if c != 0:
                    for i, x in enumerate(b):
                        vec[i] = vec[i] + c * x
            gens.append(vec)
        return Subspace.from_generators(gens, self.ambient_dim)


def _points_ok(points, n, m1):
    """Points live in Q^{n-1}, are supported on the first m1 coordinates,
    and affinely span that copy of R^{m1}."""
    pts = [tuple(rat(x) for x in p) for p in points]
    if any(len(p) != n - 1 for p in pts):
        return False, pts
    if any(any(x != 0 for x in p[m1:]) for p in pts):
        return False, pts
    if len(pts) < m1 + 1:
        return False, pts
    diffs = [[p[i] - pts[0][i] for i in range(m1)] for p in pts[1:]]
    return linalg.rank(diffs) == m1, pts


def hypothesis_space(rep: RepSpace, block_sizes, growth: GrowthSpec, points) -> Subspace:
    """Vectors all of whose shear translates by the given points have zero
    component in every expanding weight direction."""
    split = split_spaces(rep, block_sizes, growth)
    plus = split.indices("+")
    rows = []
    for e in points:
        act = rep.group_matrix(row_unipotent([rat(x) for x in e], EXACT))
        for i in plus:
            rows.append(list(act.rows[i]))
    if not rows:
        return Subspace(rep.dim, tuple(tuple(linalg.identity(rep.dim)[i]) for i in range(rep.dim)))
    gens = linalg.kernel_basis(rows)
    return Subspace.from_generators(gens, rep.dim)


@dataclass(frozen=True)
class LemmaReport:
    ok: bool
    hypothesis_dim: int
    violations: tuple
    notes: tuple = ()


def _zero_row_selector(split: WeightSplit, first=None):
    return split.zero_weight_indices(first)


def _kernel_on_selected_rows(cols, row_indices, dim_h):
    """Coefficient kernel of the map v -> (u(e) v restricted to rows).

    An empty row selection means the projection is identically zero, so its
    kernel is everything — NOT nothing; that case matters when a
    representation has no fully-invariant weight direction at all.
    """
    if not row_indices:
        return [
            [Rat(1) if i == j else Rat(0) for i in range(dim_h)] for j in range(dim_h)
        ]
    mat = [[col[i] for col in cols] for i in row_indices]
    return linalg.kernel_basis(mat)


def _act_on_basis(rep, e, basis):
    """Columns u(e) . b for b in basis; returns list of columns."""
    act = rep.group_matrix(row_unipotent([rat(x) for x in e], EXACT))
    return [act.apply(b) for b in basis]


def zero_projection_lemma_check(rep: RepSpace, m1, points, require_spanning=True):
    """Single-block check: on the hypothesis space of an affine-spanning
    point set, every shear translate keeps a nonzero zero-weight component.

    Violations are (point, vector) pairs with u(e) v losing its entire
    zero-weight part; a correct implementation finds none when the points
    affinely span, and is expected to find some for degenerate point sets
    (run with require_spanning=False to observe them).
    """
    spanning, pts = _points_ok(points, rep.n, m1)
    if require_spanning and not spanning:
        raise ValueError("points must affinely span the embedded R^%d" % m1)
    growth = GrowthSpec.simple([(1, 1)])
    split = split_spaces(rep, (m1,), growth)
    space = hypothesis_space(rep, (m1,), growth, pts)
    zero_rows = _zero_row_selector(split)
    violations = []
    for e in pts:
        if space.dim == 0:
            break
        cols = _act_on_basis(rep, e, space.basis)
        for y in _kernel_on_selected_rows(cols, zero_rows, space.dim):
            vec = [Rat(0)] * rep.dim
            for c, b in zip(y, space.basis):
                for i, x in enumerate(b):
                    vec[i] = vec[i] + c * x
            violations.append((tuple(e), tuple(vec)))
    notes = () if space.dim else ("hypothesis space trivial",)
    return LemmaReport(not violations, space.dim, tuple(violations), notes)


def layered_lemma_check(rep: RepSpace, block_sizes, growth: GrowthSpec, points, require_spanning=True):
    """Multi-block check (k >= 2), two clauses per point:

    (i) dropping the last block, shear translates of the hypothesis space
        still avoid the truncated expanding directions;
    (ii) a translate whose fully-invariant component vanishes also loses
        its first-(k-1)-blocks-invariant component.
    """
    sizes = validate_block_sizes(rep.n, block_sizes)
    if growth.k != len(sizes) or growth.k < 2:
        raise ValueError("need k >= 2 matching block sizes")
    spanning, pts = _points_ok(points, rep.n, sizes[0])
    if require_spanning and not spanning:
        raise ValueError("points must affinely span the embedded R^%d" % sizes[0])
    split = split_spaces(rep, sizes, growth)
    split_trunc = split_spaces(rep, sizes[:-1], growth.truncate(growth.k - 1))
    space = hypothesis_space(rep, sizes, growth, pts)
    plus_trunc = split_trunc.indices("+")
    zero_full = split.zero_weight_indices()
    zero_head = split.zero_weight_indices(first=growth.k - 1)
    violations = []
    for e in pts:
        if space.dim == 0:
            break
        cols = _act_on_basis(rep, e, space.basis)
        for i in plus_trunc:
            if any(col[i] != 0 for col in cols):
                violations.append(("expanding-after-truncation", tuple(e), i))
        hmat = [[col[i] for col in cols] for i in zero_head]
        for y in _kernel_on_selected_rows(cols, zero_full, space.dim):
            img = [
                sum(row[j] * y[j] for j in range(len(y))) for row in hmat
            ]
            if any(x != 0 for x in img):
                vec = [Rat(0)] * rep.dim
                for c, b in zip(y, space.basis):
                    for i, x in enumerate(b):
                        vec[i] = vec[i] + c * x
                violations.append(("invariant-shadow-lost", tuple(e), tuple(vec)))
    notes = () if space.dim else ("hypothesis space trivial",)
    return LemmaReport(not violations, space.dim, tuple(violations), notes)


def spanning_zero_check(rep: RepSpace, block_sizes, growth: GrowthSpec, points, require_spanning=True):
    """Full-strength conclusion: on the hypothesis space, every shear
    translate keeps a nonzero fully-invariant (all-blocks-zero) component."""
    sizes = validate_block_sizes(rep.n, block_sizes)
    if growth.k != len(sizes):
        raise ValueError("growth/block count mismatch")
    spanning, pts = _points_ok(points, rep.n, sizes[0])
    if require_spanning and not spanning:
        raise ValueError("points must affinely span the embedded R^%d" % sizes[0])
    split = split_spaces(rep, sizes, growth)
    space = hypothesis_space(rep, sizes, growth, pts)
    zero_rows = split.zero_weight_indices()
    violations = []
    for e in pts:
        if space.dim == 0:
            break
        cols = _act_on_basis(rep, e, space.basis)
        for y in _kernel_on_selected_rows(cols, zero_rows, space.dim):
            vec = [Rat(0)] * rep.dim
            for c, b in zip(y, space.basis):
                for i, x in enumerate(b):
                    vec[i] = vec[i] + c * x
            violations.append((tuple(e), tuple(vec)))
    notes = () if space.dim else ("hypothesis space trivial",)
    return LemmaReport(not violations, space.dim, tuple(violations), notes)


def straightening_shear(n, block, points):
    """The unipotent change of coordinates that rectifies the given shear
    points onto their leading block.

    points: exactly `block` points in Q^{n-1} whose leading-block parts
    q(e) = e[:block] form a basis; returns the matrix with the solved
    mixing w in its (leading rows x trailing columns) corner, so that
    conjugation maps each u(e) to u(q(e), 0).
    """
    pts = [tuple(rat(x) for x in p) for p in points]
    if len(pts) != block or any(len(p) != n - 1 for p in pts):
        raise ValueError("need exactly %d points in Q^%d" % (block, n - 1))
    qmat = [list(p[:block]) for p in pts]
    perp = [list(p[block:]) for p in pts]
    if linalg.rank(qmat) != block:
        raise ValueError("leading parts do not form a basis")
    tail = n - 1 - block
    rows = [[Rat(1) if i == j else Rat(0) for j in range(n)] for i in range(n)]
    if tail:
        wsol = linalg.mat_mul(linalg.inverse(qmat), perp)  # block x tail
        for r in range(block):
            for c in range(tail):
                rows[1 + r][1 + block + c] = wsol[r][c]
    omega = ExactMatrix(rows, EXACT)
    omega_inv = omega.inverse()
    for p in pts:
        lhs = omega @ row_unipotent(list(p), EXACT) @ omega_inv
        rhs = row_unipotent(list(p[:block]) + [Rat(0)] * tail, EXACT)
        if lhs != rhs:
            raise AssertionError("straightening identity failed for %r" % (p,))
    return omega


@dataclass(frozen=True)
class AlignmentReport:
    ok: bool
    component_count: int
    violations: tuple


def _support_components(rep: RepSpace, block):
    """Connected components of the basis-support graph under the action of
    the leading-block algebra (off-diagonal elementary matrices)."""
    labs = rep.labels()
    dim = len(labs)
    parent = list(range(dim))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for p in range(1, block + 1):
        for q in range(1, block + 1):
            if p == q:
                continue
            x = ExactMatrix(
                [
                    [1 if (i, j) == (p - 1, q - 1) else 0 for j in range(rep.n)]
                    for i in range(rep.n)
                ],
                EXACT,
            )
            act = rep.algebra_matrix(x)
            for j in range(dim):
                for i in range(dim):
                    if act.rows[i][j] != 0:
                        union(i, j)
    comps = {}
    for i in range(dim):
        comps.setdefault(find(i), []).append(i)
    return list(comps.values())


def _default_alignment_grid(k):
    vals = [Rat(1, 2), Rat(1), Rat(2)]
    return list(itertools.product(vals, repeat=k))


def weight_alignment_check(rep: RepSpace, block_sizes, grid=None):
    """Within each irreducible piece under the last block's algebra, weight
    differences line up along the last coordinate.

    Checks (a) the centralizer-shift scalar identity on the leading columns,
    (b) the exact affine relation mu_l - nu_l = f_l (mu_k - nu_k) for every
    weight pair in every piece, and (c) on a strictly positive grid of layer
    values t, the sign equivalences: mu.t >= nu.t iff mu_k >= nu_k iff (for
    k >= 2) the truncated forms satisfy the same inequality.
    """
    sizes = validate_block_sizes(rep.n, block_sizes)
    k = len(sizes)
    mk = sizes[-1]
    factors = [Rat(m + 1, mk + 1) for m in sizes]
    violations = []

    # (a) scalar identity on the defining representation's leading block
    for m, f in zip(sizes[:-1], factors[:-1]):
        gl = block_generator(rep.n, m)
        gk = block_generator(rep.n, mk)
        scalar_expect = Rat(m - mk, mk + 1)
        for i in range(mk + 1):
            got = gl.rows[i][i] - f * gk.rows[i][i]
            if got != scalar_expect:
                violations.append(("scalar-identity", m, i, got))

    table = weight_table(rep, sizes)
    labs = rep.labels()
    comps = _support_components(rep, mk + 1)
    grid = [tuple(rat(t) for t in g) for g in (grid or _default_alignment_grid(k))]
    if any(any(not t > 0 for t in g) for g in grid):
        raise ValueError("grid layer values must be strictly positive")

    for comp in comps:
        ws = [table[labs[i]] for i in comp]
        for a in range(len(ws)):
            for b in range(a + 1, len(ws)):
                mu, nu = ws[a], ws[b]
                dk = mu[-1] - nu[-1]
                for l in range(k - 1):
                    if mu[l] - nu[l] != factors[l] * dk:
                        violations.append(("affine-relation", labs[comp[a]], labs[comp[b]]))
                        break
                for t in grid:
                    lhs = sum((mu[l] - nu[l]) * t[l] for l in range(k))
                    if (lhs >= 0) != (dk >= 0):
                        violations.append(("grid-sign", labs[comp[a]], labs[comp[b]], t))
                    if k >= 2:
                        head = sum((mu[l] - nu[l]) * t[l] for l in range(k - 1))
                        if (head >= 0) != (dk >= 0):
                            violations.append(
                                ("grid-sign-truncated", labs[comp[a]], labs[comp[b]], t)
                            )
    return AlignmentReport(not violations, len(comps), tuple(violations))


def _block_algebra_generators(n, block):
    """Lie algebra generators of the block subgroup [[A, w], [0, I]]."""
    gens = []
    for p in range(1, block + 1):
        for q in range(1, block + 1):
            if p != q:
                gens.append(("E", p, q))
    for i in range(1, block):
        gens.append(("H", i))
    for p in range(1, block + 1):
        for q in range(block + 1, n + 1):
            gens.append(("E", p, q))
    return gens


def _gen_matrix(n, lab):
    rows = [[Rat(0)] * n for _ in range(n)]
    if lab[0] == "E":
        rows[lab[1] - 1][lab[2] - 1] = Rat(1)
    else:
        i = lab[1]
        rows[i - 1][i - 1] = Rat(1)
        rows[i][i] = Rat(-1)
    return ExactMatrix(rows, EXACT)


def block_invariant_space(rep: RepSpace, block) -> Subspace:
    """Common kernel of the block subgroup's algebra in the representation:
    exactly the vectors fixed by the whole block subgroup."""
    if not 1 <= block <= rep.n:
        raise ValueError("block out of range")
    rows = []
    for lab in _block_algebra_generators(rep.n, block):
        act = rep.algebra_matrix(_gen_matrix(rep.n, lab))
        rows.extend([list(r) for r in act.rows])
    gens = linalg.kernel_basis(rows)
    return Subspace.from_generators(gens, rep.dim)


def is_block_fixed(rep: RepSpace, vec, block) -> bool:
    """True iff the vector is killed by every block-subgroup generator."""
    v = [rat(x) for x in vec]
    for lab in _block_algebra_generators(rep.n, block):
        act = rep.algebra_matrix(_gen_matrix(rep.n, lab))
        if any(x != 0 for x in act.apply(v)):
            return False
    return True


def curve_hypothesis_fixed_check(rep: RepSpace, block_sizes, growth: GrowthSpec, curve):
    """The hypothesis space generated by sampling a full polynomial curve is
    fixed by the leading block subgroup.

    Sampling at entry_degree * curve.degree + 1 distinct parameters spans
    the same constraint space as the whole curve (Vandermonde), so the
    finite check is exact, not a heuristic.
    """
    sizes = validate_block_sizes(rep.n, block_sizes)
    if curve.k != rep.n - 1:
        raise ValueError("curve must map into Q^%d" % (rep.n - 1))
    count = rep.entry_degree * max(curve.degree, 1) + 1
    pts = [curve.eval_exact(s) for s in curve.sample_points(count)]
    space = hypothesis_space(rep, sizes, growth, pts)
    target = block_invariant_space(rep, sizes[0] + 1)
    ok = space.is_contained_in(target)
    return LemmaReport(
        ok,
        space.dim,
        () if ok else tuple(space.basis),
        ("hypothesis space trivial",) if space.dim == 0 else (),
    )
