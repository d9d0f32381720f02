"""Closed-form rate schedules and their layered normal form.

A *rate schedule* assigns to every index i = 1, 2, ... a vector of
expansion exponents (tau_1(i), ..., tau_{n-1}(i)), each coordinate a
polynomial-style closed form in i with rational coefficients.  The
schedules we care about are eventually nonnegative and eventually
nonincreasing in the coordinate, with at least one coordinate divergent.

The *layered normal form* regroups such a schedule: coordinates sharing
the same divergent part form a block, each block is anchored at its last
coordinate, and the anchor forms telescope into per-layer growth forms
t_1(i), ..., t_k(i).  Writing A_m for the traceless diagonal generator
with first entry m and entries -1 in coordinates 1..m (zeros after),
the anchored schedule satisfies exactly

    diag-exp( sum_l t_l(i) * A_{m_l} ) = a_{taubar(i)}

where taubar replaces every coordinate by its block anchor, and the
original schedule differs from taubar by a convergent (here: eventually
constant) residual vector.  ``exp_identity_error`` checks the displayed
identity numerically at a given index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .algebra import ExpansionRates
from .backend import Rat, rat
from .weights import GrowthSpec, block_generator, validate_block_sizes

__all__ = [
    "ClosedForm",
    "RateSchedule",
    "LayeredSchedule",
    "layered_presentation",
]


@dataclass(frozen=True)
class ClosedForm:
    """A finite sum  c_1 * i^{p_1} + ... + c_r * i^{p_r}  with rational c,
    nonnegative integer p, stored canonically (exponents strictly
    decreasing, zero coefficients dropped)."""

    terms: tuple  # ((c, p), ...) canonical

    def __post_init__(self):
        agg = {}
        for c, p in self.terms:
            c = rat(c)
            p = int(p)
            if p < 0:
                raise ValueError("negative exponent in closed form")
            agg[p] = agg.get(p, Rat(0)) + c
        canon = tuple(
            (c, p) for p, c in sorted(agg.items(), reverse=True) if c != 0
        )
        object.__setattr__(self, "terms", canon)

    # -- constructors ---------------------------------------------------

    @classmethod
    def constant(cls, c) -> "ClosedForm":
        return cls(((rat(c), 0),))

    @classmethod
    def monomial(cls, c, p) -> "ClosedForm":
        return cls(((rat(c), int(p)),))

    @classmethod
    def parse(cls, text) -> "ClosedForm":
        """Parse '2*i^2 + i - 3' style text (variable letter i)."""
        comp = text.replace(" ", "").replace("-", "+-")
        parts = [t for t in comp.split("+") if t]
        if not parts:
            raise ValueError("empty closed form in %r" % text)
        terms = []
        for term in parts:
            if "i" in term:
                coef_s, _, pow_s = term.partition("i")
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
            terms.append((coef, power))
        return cls(tuple(terms))

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other: "ClosedForm") -> "ClosedForm":
        return ClosedForm(self.terms + other.terms)

    def __sub__(self, other: "ClosedForm") -> "ClosedForm":
        return ClosedForm(self.terms + tuple((-c, p) for c, p in other.terms))

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for c, p in self.terms:
            if p == 0:
                bits.append(str(c))
                continue
            head = "i" if p == 1 else "i^%d" % p
            if c == 1:
                bits.append(head)
            elif c == -1:
                bits.append("-" + head)
            else:
                bits.append("%s*%s" % (c, head))
        return " + ".join(bits).replace("+ -", "- ")

    # -- structure -------------------------------------------------------

    def eval_exact(self, i):
        i = rat(i)
        total = Rat(0)
        for c, p in self.terms:
            total += c * i**p
        return total

    def eval_float(self, i) -> float:
        return float(self.eval_exact(i))

    @property
    def leading(self):
        """(coefficient, exponent) of the dominant term; (0, 0) for the
        zero form."""
        return self.terms[0] if self.terms else (Rat(0), 0)

    def growth_part(self) -> "ClosedForm":
        """The exponent > 0 terms."""
        return ClosedForm(tuple((c, p) for c, p in self.terms if p > 0))

    def constant_part(self):
        for c, p in self.terms:
            if p == 0:
                return c
        return Rat(0)

    def is_bounded(self) -> bool:
        return all(p == 0 for _, p in self.terms)

    def diverges(self) -> bool:
        c, p = self.leading
        return p > 0 and c > 0

    def eventually_nonnegative(self) -> bool:
        c, _ = self.leading
        return c >= 0

    def root_bound(self) -> int:
        """Integer B with no real roots in [B, inf): Cauchy's
        1 + max |a_q| / |a_lead| over the lower-order terms."""
        if not self.terms or len(self.terms) == 1:
            return 1
        lead = abs(self.terms[0][0])
        worst = max(abs(c) for c, _ in self.terms[1:])
        b = 1 + worst / lead
        out = int(b)
        return out + 1 if out < b else max(out, 1)


@dataclass(frozen=True)
class RateSchedule:
    """One closed form per coordinate 1..n-1.

    Validated so the coordinates are eventually nonnegative and eventually
    nonincreasing; every coordinate either diverges to +infinity or is
    exactly constant.  (These are the schedules whose diagonal flows admit
    the layered normal form; a bounded oscillating coordinate does not.)

    index_range, when set, is an inclusive (lo, hi) window of usable
    indices; lo may not undercut ordered_from(), so every generated rate
    vector is ordered.
    """

    forms: tuple
    index_range: object = None

    def __post_init__(self):
        forms = tuple(self.forms)
        if not forms:
            raise ValueError("need at least one coordinate")
        for f in forms:
            if not isinstance(f, ClosedForm):
                raise TypeError("RateSchedule wants ClosedForm coordinates")
            if f.is_bounded():
                if f.constant_part() < 0:
                    raise ValueError("negative constant coordinate %s" % f)
            elif not f.diverges():
                raise ValueError(
                    "coordinate %s neither constant nor divergent to +inf" % f
                )
        for r in range(len(forms) - 1):
            gap = forms[r] - forms[r + 1]
            c, _ = gap.leading
            if c < 0:
                raise ValueError(
                    "coordinates not eventually nonincreasing at position %d"
                    % (r + 1)
                )
        object.__setattr__(self, "forms", forms)
        if self.index_range is not None:
            lo, hi = (int(v) for v in self.index_range)
            if lo > hi:
                raise ValueError("empty index range (%d, %d)" % (lo, hi))
            if lo < self.ordered_from():
                raise ValueError(
                    "index range starts at %d but the coordinates are only "
                    "ordered from %d" % (lo, self.ordered_from())
                )
            object.__setattr__(self, "index_range", (lo, hi))

    @classmethod
    def parse(cls, text) -> "RateSchedule":
        """Parse '2*i, i, 3' -> three coordinate forms."""
        coords = [t.strip() for t in text.split(",")]
        if not coords or any(not t for t in coords):
            raise ValueError("empty coordinate in %r" % text)
        return cls(tuple(ClosedForm.parse(t) for t in coords))

    @property
    def n(self) -> int:
        """Ambient dimension (one more than the number of coordinates)."""
        return len(self.forms) + 1

    def eval_exact(self, i):
        return tuple(f.eval_exact(i) for f in self.forms)

    def eval_float(self, i):
        return tuple(f.eval_float(i) for f in self.forms)

    def ordered_from(self) -> int:
        """Smallest index from which the coordinates are provably
        nonnegative and nonincreasing (they are only *eventually* so).

        Beyond every gap form's Cauchy root bound the signs are locked;
        below that we test indices directly, walking down while the
        pointwise checks still hold.
        """
        gaps = [
            self.forms[r] - self.forms[r + 1] for r in range(len(self.forms) - 1)
        ]
        checks = gaps + list(self.forms)

        def ok(i):
            return all(f.eval_exact(i) >= 0 for f in checks)

        lo = max(f.root_bound() for f in checks)
        assert ok(lo)  # beyond every root, leading signs (all >= 0) rule
        while lo > 1 and ok(lo - 1):
            lo -= 1
        return lo

    def expansion_at(self, i) -> ExpansionRates:
        """Float expansion weights e^{tau_r(i)} at index i."""
        lo = self.ordered_from()
        if i < lo:
            raise ValueError(
                "schedule is ordered only from index %d; got %d" % (lo, i)
            )
        return ExpansionRates.from_rates(self.eval_float(i))

    def indices(self):
        """The declared index window as a range (requires index_range)."""
        if self.index_range is None:
            raise ValueError("schedule has no index range")
        lo, hi = self.index_range
        return range(lo, hi + 1)

    def to_json(self):
        out = {"kind": "rate-schedule", "forms": [str(f) for f in self.forms]}
        if self.index_range is not None:
            out["index_range"] = list(self.index_range)
        return out

    @classmethod
    def from_json(cls, obj) -> "RateSchedule":
        if obj.get("kind") != "rate-schedule":
            raise ValueError("not a rate-schedule payload")
        rng = obj.get("index_range")
        return cls(
            tuple(ClosedForm.parse(t) for t in obj["forms"]),
            tuple(rng) if rng is not None else None,
        )


@dataclass(frozen=True)
class LayeredSchedule:
    """Layered normal form of a rate schedule.

    block_sizes  -- anchors m_1 > m_2 > ... > m_k (one per growth class)
    growth       -- per-layer divergent forms t_l, as a GrowthSpec
    layer_forms  -- the same t_l as ClosedForm objects
    anchored     -- taubar: coordinate r replaced by its block anchor form
                    (zero form beyond m_1)
    residual     -- lim_i (tau_r(i) - taubar_r(i)), one rational per
                    coordinate; eventually-constant coordinates land here
    """

    n: int
    block_sizes: tuple
    growth: GrowthSpec
    layer_forms: tuple
    anchored: tuple
    residual: tuple

    def layer_of(self, coordinate: int) -> int:
        """1-based layer index of a coordinate 1 <= r <= m_1."""
        if not 1 <= coordinate <= self.block_sizes[0]:
            raise ValueError("coordinate outside the divergent range")
        for l, m in enumerate(self.block_sizes, start=1):
            lo = self.block_sizes[l] if l < len(self.block_sizes) else 0
            if lo < coordinate <= m:
                return l
        raise AssertionError("unreachable")

    def exp_identity_error(self, i) -> float:
        """Max relative gap, over diagonal entries, between a_{taubar(i)}
        and exp(sum_l t_l(i) A_{m_l})."""
        n = self.n
        taubar = [f.eval_float(i) for f in self.anchored]
        lhs = [math.exp(sum(taubar))] + [math.exp(-v) for v in taubar]
        gen_diag = [0.0] * n
        for t_form, m in zip(self.layer_forms, self.block_sizes):
            t = t_form.eval_float(i)
            diag = block_generator(n, m)
            for j in range(n):
                gen_diag[j] += t * float(diag.rows[j][j])
        rhs = [math.exp(v) for v in gen_diag]
        err = 0.0
        for a, b in zip(lhs, rhs):
            err = max(err, abs(a - b) / max(1.0, abs(a)))
        return err


def layered_presentation(schedule: RateSchedule) -> LayeredSchedule:
    """Regroup a rate schedule by shared divergent parts.

    Coordinates 1..m_1 are the divergent ones (validation guarantees they
    form a prefix); consecutive coordinates with identical growth parts
    share a block, and each block is anchored at its *last* coordinate.
    The layer forms telescope: t_1 is the anchor form of the innermost
    block (largest anchor index, slowest growth) and t_l is the difference
    between consecutive anchor forms, so that partial sums recover the
    anchors.  Raises ValueError when no coordinate diverges.
    """
    forms = schedule.forms
    divergent = [r for r, f in enumerate(forms, start=1) if f.diverges()]
    if not divergent:
        raise ValueError("schedule has no divergent coordinate")
    m1 = divergent[-1]
    assert divergent == list(range(1, m1 + 1))  # prefix, by validation

    # blocks: maximal runs of equal growth parts among coordinates 1..m_1
    anchors = []  # last coordinate of each run, in coordinate order
    for r in range(1, m1 + 1):
        if r == m1 or forms[r - 1].growth_part() != forms[r].growth_part():
            anchors.append(r)
    anchors.reverse()  # m_1 > m_2 > ... > m_k
    validate_block_sizes(schedule.n, anchors)

    # telescoping layer forms: partial sums equal successive anchor forms
    layer_forms = [forms[anchors[0] - 1]]
    for l in range(1, len(anchors)):
        layer_forms.append(forms[anchors[l] - 1] - forms[anchors[l - 1] - 1])
    growth = GrowthSpec(tuple(tuple(f.terms) for f in layer_forms))

    anchored = []
    residual = []
    for r, f in enumerate(forms, start=1):
        if r > m1:
            anchored.append(ClosedForm(()))
            residual.append(f.constant_part())
            continue
        anchor = min(m for m in anchors if m >= r)
        anchored.append(forms[anchor - 1])
        gap = f - forms[anchor - 1]
        assert gap.is_bounded()  # same growth part within a block
        residual.append(gap.constant_part())

    return LayeredSchedule(
        n=schedule.n,
        block_sizes=tuple(anchors),
        growth=growth,
        layer_forms=tuple(layer_forms),
        anchored=tuple(anchored),
        residual=tuple(residual),
    )
