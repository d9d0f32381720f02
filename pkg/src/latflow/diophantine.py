"""Window solubility for simultaneous-approximation systems along curves.

A window (weights N_1..N_k, radius mu) asks for nonzero integer solutions of

  primal:  |q . xi - p|   <= mu / (N_1 ... N_k),   |q_j| < mu N_j
  dual:    |q xi_k + p_k| <= mu / N_k,  |q xi_j + p_j| < mu / N_j (j < k),
           |q| < mu N_1 ... N_k

with the first inequality closed and all others open; this matches the
face flags of the enumeration window exactly, so each system is soluble if
and only if the corresponding diagonal-times-shear translate of Z^n puts a
nonzero point in the window box.  Every decision here runs on the exact
backend; two independent routes (direct loops over the inequality system
and lattice-point enumeration) are compared whenever the direct loop is
affordable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from . import linalg
from .backend import (
    EXACT,
    Rat,
    as_fraction,
    format_scalar,
    parse_scalar,
    rat,
    rat_ceil,
    rat_floor,
)
from .algebra import ExactMatrix, column_unipotent, row_unipotent
from .lattice import (
    DEFAULT_NODE_BUDGET,
    Box,
    Lattice,
    enumerate_basis_in_box,
    enumerate_in_box,
    window_box,
)


class RouteDisagreement(RuntimeError):
    """The direct and lattice solubility routes returned different answers.

    This never fires on correct code; it exists so a regression cannot pass
    silently by weakening one route.
    """


@dataclass(frozen=True)
class Curve:
    """Polynomial curve s -> (phi_1(s), ..., phi_k(s)) with rational
    coefficients; coeffs[j] is the coefficient vector of s^j."""

    coeffs: tuple
    domain: tuple = (0, 1)

    def __post_init__(self):
        cs = tuple(tuple(rat(x) for x in row) for row in self.coeffs)
        if not cs:
            raise ValueError("need at least the constant coefficient row")
        k = len(cs[0])
        if k < 1 or any(len(row) != k for row in cs):
            raise ValueError("ragged coefficient rows")
        dom = (rat(self.domain[0]), rat(self.domain[1]))
        if not dom[0] < dom[1]:
            raise ValueError("empty domain")
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "domain", dom)

    @property
    def k(self):
        return len(self.coeffs[0])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def eval_exact(self, s):
        s = rat(s)
        out = [Rat(0)] * self.k
        for row in reversed(self.coeffs):
            out = [v * s + c for v, c in zip(out, row)]
        return tuple(out)

    def eval_float(self, s):
        s = float(s)
        out = [0.0] * self.k
        for row in reversed(self.coeffs):
            out = [v * s + float(c) for v, c in zip(out, row)]
        return tuple(out)

    def derivative(self) -> "Curve":
        if self.degree == 0:
            return Curve((tuple(Rat(0) for _ in range(self.k)),), self.domain)
        rows = tuple(
            tuple(j * x for x in self.coeffs[j]) for j in range(1, len(self.coeffs))
        )
        return Curve(rows, self.domain)

    def affine_span_full(self) -> bool:
        """True iff the curve's image affinely spans all k coordinates,
        i.e. the degree >= 1 coefficient rows have rank k."""
        rows = [list(r) for r in self.coeffs[1:]]
        if not rows:
            return self.k == 0
        return linalg.rank(rows) == self.k

    def sample_points(self, count):
        """count equispaced exact parameters a + (b-a) j/count, j < count."""
        a, b = self.domain
        step = (b - a) / Rat(count)
        return [a + step * j for j in range(count)]

    @classmethod
    def parse(cls, text, domain=(0, 1)) -> "Curve":
        """Parse 's, s^2' / '1/2*s + 3, s^3' style comma-separated polynomials."""
        coords = [t.strip() for t in text.split(",")]
        if not coords or any(not t for t in coords):
            raise ValueError("empty curve component in %r" % text)
        per_coord = []
        top = 0
        for comp in coords:
            comp = comp.replace(" ", "").replace("-", "+-")
            terms = [t for t in comp.split("+") if t]
            powers = {}
            for term in terms:
                if "s" in term:
                    coef_s, _, pow_s = term.partition("s")
                    coef_s = coef_s.rstrip("*")
                    if coef_s in ("", "+"):
                        coef = Rat(1)
                    elif coef_s == "-":
                        coef = Rat(-1)
                    else:
                        coef = rat(coef_s)
                    if pow_s.startswith("^"):
                        power = int(pow_s[1:])
                    elif pow_s == "":
                        power = 1
                    else:
                        raise ValueError("cannot parse term %r" % term)
                else:
                    coef = rat(term)
                    power = 0
                powers[power] = powers.get(power, Rat(0)) + coef
            per_coord.append(powers)
            top = max(top, max(powers) if powers else 0)
        rows = tuple(
            tuple(pc.get(j, Rat(0)) for pc in per_coord) for j in range(top + 1)
        )
        return cls(rows, domain)


@dataclass(frozen=True)
class WindowSpec:
    """Approximation window: per-form weights N_j >= 1 and radius mu in (0,1]."""

    weights: tuple
    radius: object

    def __post_init__(self):
        w = tuple(rat(x) for x in self.weights)
        if not w:
            raise ValueError("need at least one weight")
        if any(not x >= 1 for x in w):
            raise ValueError("window weights must be >= 1: %r" % (w,))
        mu = rat(self.radius)
        if not (0 < mu <= 1):
            raise ValueError("window radius must lie in (0, 1]")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "radius", mu)

    @property
    def k(self):
        return len(self.weights)

    def total_weight(self):
        p = Rat(1)
        for w in self.weights:
            p = p * w
        return p

    def to_json(self):
        return {
            "kind": "window",
            "weights": [format_scalar(w, EXACT) for w in self.weights],
            "radius": format_scalar(self.radius, EXACT),
        }

    @classmethod
    def from_json(cls, obj):
        if obj.get("kind") != "window":
            raise ValueError("not a serialized window")
        return cls(
            tuple(parse_scalar(w, EXACT) for w in obj["weights"]),
            parse_scalar(obj["radius"], EXACT),
        )


def primal_translate_matrix(window: WindowSpec, phi) -> ExactMatrix:
    """diag(prod N, 1/N_1, ..., 1/N_k) times the first-row shear by phi."""
    one = Rat(1)
    diag = ExactMatrix.diagonal(
        [window.total_weight()] + [one / w for w in window.weights], EXACT
    )
    return diag @ row_unipotent([rat(x) for x in phi], EXACT)


def dual_translate_matrix(window: WindowSpec, phi) -> ExactMatrix:
    """diag(N_k, ..., N_1, 1/prod N) times the last-column shear by phi."""
    one = Rat(1)
    diag = ExactMatrix.diagonal(
        list(reversed(list(window.weights))) + [one / window.total_weight()], EXACT
    )
    return diag @ column_unipotent([rat(x) for x in phi], EXACT)


def translate_vector(window: WindowSpec, phi, x, dual=False):
    """Closed-form image of the integer vector x under the translate.

    primal, x = (p, q_1..q_k):
        ((prod N)(p + q.phi), q_1/N_1, ..., q_k/N_k)
    dual, x = (p_k, ..., p_1, q):
        (N_k (q phi_k + p_k), ..., N_1 (q phi_1 + p_1), q / prod N)
    """
    k = window.k
    if len(x) != k + 1 or len(phi) != k:
        raise ValueError("dimension mismatch")
    phi = [rat(v) for v in phi]
    xs = [rat(v) for v in x]
    total = window.total_weight()
    if not dual:
        head = xs[0]
        for qj, pj in zip(xs[1:], phi):
            head = head + qj * pj
        return tuple([total * head] + [xs[1 + j] / window.weights[j] for j in range(k)])
    q = xs[k]
    out = []
    for j in range(k):  # row j carries form index k - j
        m = k - 1 - j
        out.append(window.weights[m] * (q * phi[m] + xs[j]))
    out.append(q / total)
    return tuple(out)


def _closed_int_range(lo_val, hi_val):
    return rat_ceil(lo_val), rat_floor(hi_val)


def _open_int_range(lo_val, hi_val):
    lo = rat_floor(lo_val) + 1
    hi = rat_ceil(hi_val) - 1
    return lo, hi


def _strict_abs_max(bound):
    """Largest integer m with m < bound (bound rational > 0)."""
    return rat_ceil(bound) - 1


def _primal_direct(xi, window: WindowSpec):
    mu, total = window.radius, window.total_weight()
    beta = mu / total
    q_tops = [_strict_abs_max(mu * w) for w in window.weights]
    for q in itertools.product(*[range(-t, t + 1) for t in q_tops]):
        target = Rat(0)
        for qj, xj in zip(q, xi):
            target = target + qj * xj
        lo, hi = _closed_int_range(target - beta, target + beta)
        for p in range(lo, hi + 1):
            if p == 0 and not any(q):
                continue
            return True, (p, tuple(q))
    return False, None


def _primal_direct_cost(window: WindowSpec):
    cost = 1
    for w in window.weights:
        cost *= 2 * _strict_abs_max(window.radius * w) + 1
    return cost


def _dual_direct(xi, window: WindowSpec):
    mu = window.radius
    q_top = _strict_abs_max(mu * window.total_weight())
    k = window.k
    for q in range(-q_top, q_top + 1):
        ranges = []
        feasible = True
        for j in range(k):
            center = -(q * xi[j])
            beta = mu / window.weights[j]
            if j == k - 1:
                lo, hi = _closed_int_range(center - beta, center + beta)
            else:
                lo, hi = _open_int_range(center - beta, center + beta)
            if lo > hi:
                feasible = False
                break
            ranges.append(range(lo, hi + 1))
        if not feasible:
            continue
        for ps in itertools.product(*ranges):
            if q == 0 and not any(ps):
                continue
            return True, (q, tuple(ps))
    return False, None


def _dual_direct_cost(window: WindowSpec):
    return 2 * _strict_abs_max(window.radius * window.total_weight()) + 1


def _primal_lattice(xi, window: WindowSpec, budget):
    lat = Lattice(primal_translate_matrix(window, xi))
    pts = enumerate_in_box(
        lat,
        window_box(window.k + 1, window.radius, EXACT),
        budget,
        return_coeffs=True,
        first_only=True,
    )
    if not pts:
        return False, None
    _, coeffs = pts[0]
    return True, (-coeffs[0], tuple(coeffs[1:]))


def _dual_lattice(xi, window: WindowSpec, budget):
    lat = Lattice(dual_translate_matrix(window, xi))
    pts = enumerate_in_box(
        lat,
        window_box(window.k + 1, window.radius, EXACT),
        budget,
        return_coeffs=True,
        first_only=True,
    )
    if not pts:
        return False, None
    _, coeffs = pts[0]
    k = window.k
    ps = tuple(coeffs[k - 1 - m] for m in range(k))  # p_1, ..., p_k
    return True, (coeffs[k], ps)


def _check_primal_witness(xi, window, witness):
    p, q = witness
    err = -rat(p)
    for qj, xj in zip(q, xi):
        err = err + qj * xj
    if abs(err) > window.radius / window.total_weight():
        return False
    if any(not abs(Rat(qj)) < window.radius * w for qj, w in zip(q, window.weights)):
        return False
    return p != 0 or any(q)


def _check_dual_witness(xi, window, witness):
    q, ps = witness
    k = window.k
    if not abs(Rat(q)) < window.radius * window.total_weight():
        return False
    for j in range(k):
        val = abs(q * xi[j] + ps[j])
        beta = window.radius / window.weights[j]
        if j == k - 1:
            if val > beta:
                return False
        else:
            if not val < beta:
                return False
    return q != 0 or any(ps)


def window_primal_soluble(
    xi, window: WindowSpec, route="auto", direct_limit=20_000, budget=DEFAULT_NODE_BUDGET
):
    """Decide the primal system at the point xi; returns (soluble, witness).

    The witness is (p, (q_1..q_k)) checked by substitution before returning.
    route: 'auto' runs the direct loop when its iteration count is below
    direct_limit AND the lattice route, asserting agreement; 'direct' or
    'lattice' force one route.
    """
    xi = tuple(rat(x) for x in xi)
    if len(xi) != window.k:
        raise ValueError("point/window dimension mismatch")
    answers = {}
    if route in ("auto", "direct"):
        if route == "direct" or _primal_direct_cost(window) <= direct_limit:
            answers["direct"] = _primal_direct(xi, window)
    if route in ("auto", "lattice"):
        answers["lattice"] = _primal_lattice(xi, window, budget)
    if not answers:
        raise ValueError("no route ran")
    kinds = {s for s, _ in answers.values()}
    if len(kinds) > 1:
        raise RouteDisagreement(
            "primal routes disagree at xi=%r window=%r: %r" % (xi, window, answers)
        )
    soluble, witness = answers.get("direct", answers.get("lattice"))
    if soluble and not _check_primal_witness(xi, window, witness):
        raise RouteDisagreement("primal witness failed substitution: %r" % (witness,))
    return soluble, witness


def window_dual_soluble(
    xi, window: WindowSpec, route="auto", direct_limit=20_000, budget=DEFAULT_NODE_BUDGET
):
    """Decide the dual system at xi; returns (soluble, (q, (p_1..p_k)))."""
    xi = tuple(rat(x) for x in xi)
    if len(xi) != window.k:
        raise ValueError("point/window dimension mismatch")
    answers = {}
    if route in ("auto", "direct"):
        if route == "direct" or _dual_direct_cost(window) <= direct_limit:
            answers["direct"] = _dual_direct(xi, window)
    if route in ("auto", "lattice"):
        answers["lattice"] = _dual_lattice(xi, window, budget)
    if not answers:
        raise ValueError("no route ran")
    kinds = {s for s, _ in answers.values()}
    if len(kinds) > 1:
        raise RouteDisagreement(
            "dual routes disagree at xi=%r window=%r: %r" % (xi, window, answers)
        )
    soluble, witness = answers.get("direct", answers.get("lattice"))
    if soluble and not _check_dual_witness(xi, window, witness):
        raise RouteDisagreement("dual witness failed substitution: %r" % (witness,))
    return soluble, witness


def minkowski_soluble(forms: ExactMatrix, alphas, mu=1, budget=DEFAULT_NODE_BUDGET):
    """Nonzero integer solubility of |(forms x)_1| <= mu a_1,
    |(forms x)_j| < mu a_j for j >= 2; returns (soluble, x or None).

    With mu = 1 and prod(a_j) >= |det forms| this is guaranteed soluble
    (Minkowski's linear forms theorem, closed first face).
    """
    if forms.backend != EXACT:
        raise ValueError("linear-forms decisions run on the exact backend")
    n = forms.nrows
    alphas = tuple(rat(a) for a in alphas)
    if len(alphas) != n or any(not a > 0 for a in alphas):
        raise ValueError("need %d positive bounds" % n)
    mu = rat(mu)
    box = Box(
        tuple(mu * a for a in alphas), (True,) + (False,) * (n - 1), EXACT
    )
    pts = enumerate_basis_in_box(
        forms.columns(), box, EXACT, budget=budget, first_only=True
    )
    if not pts:
        return False, None
    _, coeffs = pts[0]
    return True, coeffs


@dataclass(frozen=True)
class CorrespondenceReport:
    ok: bool
    primal_soluble: bool
    dual_soluble: bool
    primal_witness: object
    dual_witness: object


def correspondence_check(xi, window: WindowSpec, budget=DEFAULT_NODE_BUDGET):
    """Cross-validate every route pair at one instance.

    Runs the direct and lattice routes for both systems (RouteDisagreement on
    any mismatch) and re-checks witnesses; returns a CorrespondenceReport.
    """
    ps, pw = window_primal_soluble(xi, window, route="auto", budget=budget)
    ds, dw = window_dual_soluble(xi, window, route="auto", budget=budget)
    ok = True
    if ps and not _check_primal_witness(tuple(rat(x) for x in xi), window, pw):
        ok = False  # pragma: no cover - witness check already raised
    if ds and not _check_dual_witness(tuple(rat(x) for x in xi), window, dw):
        ok = False  # pragma: no cover
    return CorrespondenceReport(ok, ps, ds, pw, dw)


def improvability_fraction(curve: Curve, weight_rows, mu, samples, detail=False):
    """Fraction of equispaced curve samples where, for EVERY weight row,
    both the primal and dual systems are soluble at radius mu.

    Exact: returns a Fraction (and, with detail=True, the per-sample flags).
    Monotone nonincreasing in the prefix of weight_rows.
    """
    windows = [WindowSpec(tuple(row), mu) for row in weight_rows]
    flags = []
    for s in curve.sample_points(samples):
        xi = curve.eval_exact(s)
        good = True
        for w in windows:
            ps, _ = window_primal_soluble(xi, w, route="lattice")
            if not ps:
                good = False
                break
            ds, _ = window_dual_soluble(xi, w, route="lattice")
            if not ds:
                good = False
                break
        flags.append(good)
    frac = Fraction(sum(flags), samples)
    if detail:
        return frac, flags
    return frac
