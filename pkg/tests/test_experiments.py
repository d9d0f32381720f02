import math
from fractions import Fraction

import pytest

from latflow.backend import EXACT, FLOAT, Rat, rat
from latflow.algebra import ExactMatrix, ExpansionRates, dual_involution
from latflow.diophantine import Curve, improvability_fraction
from latflow.lattice import Tent
from latflow.sequences import RateSchedule
from latflow.experiments import (
    BasePoint,
    _aligning_element,
    empirical_measure,
    equidistribution_siegel,
    improvability_scan,
    nondivergence_scan,
    sample_grid,
    shear_invariance_scan,
    translate_lattice,
)


def test_sample_grid_equispaced_exact():
    c = Curve.parse("s", domain=(0, 1))
    pts = sample_grid(c, 5)
    assert pts == [0, Rat(1, 5), Rat(2, 5), Rat(3, 5), Rat(4, 5)]


def test_sample_grid_random_is_seeded_and_exact():
    c = Curve.parse("s", domain=(Rat(-1), Rat(1)))
    a = sample_grid(c, 10, "random", seed=0)
    b = sample_grid(c, 10, "random", seed=0)
    other = sample_grid(c, 10, "random", seed=1)
    assert a == b
    assert a != other
    # dyadic rationals in the domain, exact backend preserved
    for s in a:
        assert -1 <= s < 1
        den = int(s.denominator)
        assert den & (den - 1) == 0  # power of two
    with pytest.raises(ValueError):
        sample_grid(c, 10, "sobol")


def test_translate_lattice_unimodular_and_trivial_case():
    c = Curve.parse("0*s, 0*s")  # phi == 0
    rates = ExpansionRates((1, 1), EXACT)  # tau = 0
    lat = translate_lattice(c, rates, Rat(1, 3))
    assert lat.basis.rows == ExactMatrix.identity(3, EXACT).rows


def test_translate_lattice_doubled_partners():
    c = Curve.parse("s, s^2")
    rates = ExpansionRates((2, 2), EXACT)
    lat, par = translate_lattice(c, rates, Rat(1, 2), doubled=True)
    assert par.basis.rows == dual_involution(lat.basis).rows


def test_base_point_validation_and_resolution():
    with pytest.raises(ValueError):
        BasePoint(ExactMatrix([[2, 0], [0, 1]], EXACT))
    g0 = ExactMatrix([[1, 1], [0, 1]], EXACT)
    gi = ExactMatrix([[1, 2], [0, 1]], EXACT)
    bp = BasePoint(g0, ((4, gi),))
    assert bp.at(4).rows == gi.rows
    assert bp.at(5).rows == g0.rows
    assert BasePoint.identity(3).n == 3


def test_empirical_measure_average():
    c = Curve.parse("s")
    m = empirical_measure(c, ExpansionRates((2,), EXACT), 7)
    assert len(m) == 7
    assert m.average(lambda lat: 1.0) == 1.0
    md = empirical_measure(c, ExpansionRates((2,), EXACT), 4, doubled=True)
    assert md.average(lambda lat, par: 1.0) == 1.0


def test_aligning_element_contract():
    # z = diag(lam, g, I) with lam * head @ g^-1 = e1, i.e. g[0] = lam*head
    for head in [(3.0, 4.0), (1.0, -2.0, 2.0), (0.25,)]:
        n = len(head) + 2
        z = _aligning_element(head, n)
        lam = z.rows[0][0]
        m = len(head)
        for j in range(m):
            assert z.rows[1][1 + j] == pytest.approx(lam * head[j], rel=1e-9)
        assert z.det() == pytest.approx(1.0, abs=1e-9)
        # embedded block: identity outside the leading (m+1) square
        for i in range(m + 1, n):
            assert z.rows[i][i] == 1.0


def test_aligning_element_none_cases():
    assert _aligning_element((0.0, 0.0), 4) is None  # zero head
    assert _aligning_element((-2.0,), 3) is None  # scalar block, negative


def test_aligning_element_commutes_with_anchored_flow():
    # anchored rates are constant on the leading block, so a_i restricted
    # there is lam * identity and z commutes with it
    z = _aligning_element((3.0, 4.0), 3)
    from latflow.algebra import expanding_diagonal

    a = expanding_diagonal(ExpansionRates.from_rates((2.0, 2.0)))
    left = (z @ a).rows
    right = (a @ z).rows
    for i in range(3):
        for j in range(3):
            assert left[i][j] == pytest.approx(right[i][j], rel=1e-12, abs=1e-12)


def test_equidistribution_small_run():
    schedule = RateSchedule.parse("i")
    tent = Tent((0.0, 0.0), 2.0, 1.0, FLOAT)
    rows = equidistribution_siegel(
        Curve.parse("s"), schedule, (3, 5), 80, tent, grid="random", seed=0
    )
    assert [r.index for r in rows] == [3, 5]
    assert all(r.count == 80 for r in rows)
    assert rows[0].reference == pytest.approx(16.0 / 3.0)
    # the i = 5 average sits within a loose sanity band
    assert rows[1].rel_gap < 0.5


def test_equidistribution_doubled_squares_reference():
    schedule = RateSchedule.parse("i")
    tent = Tent((0.0, 0.0), 2.0, 1.0, FLOAT)
    rows = equidistribution_siegel(
        Curve.parse("s"), schedule, (4,), 40, tent, doubled=True, grid="random", seed=0
    )
    assert rows[0].reference == pytest.approx((16.0 / 3.0) ** 2)


def test_nondivergence_small_run():
    schedule = RateSchedule.parse("i")
    rows = nondivergence_scan(
        Curve.parse("s"), schedule, (3, 4), (0.05, 0.5), 60, grid="random", seed=0
    )
    assert len(rows) == 4
    for r in rows:
        assert 0 <= r.below <= r.count
        assert r.fraction == Fraction(r.below, r.count)
    # the 0.05 fraction can only be smaller than the 0.5 one
    by_index = {}
    for r in rows:
        by_index.setdefault(r.index, {})[r.eps] = r.fraction
    for fracs in by_index.values():
        assert fracs[0.05] <= fracs[0.5]


def test_improvability_scan_frozen_fractions():
    # scan event: the translate PAIR misses the joint avoidance set, i.e.
    # primal OR dual soluble; improvability_fraction is the stricter AND
    # event, so the scan fraction dominates it on the same grid
    curve = Curve.parse("s, s^2")
    rows_spec = [(10, 10), (100, 100)]
    rows = improvability_scan(curve, rows_spec, [Rat(1, 2)], 50)
    assert rows[0].prefix == 0 and rows[0].fraction == 1
    full = [r for r in rows if r.prefix == len(rows_spec)][0]
    assert full.fraction == Fraction(13, 25)
    both = improvability_fraction(curve, rows_spec, Rat(1, 2), 50)
    assert both == Fraction(4, 25)
    assert full.fraction >= both
    # nonincreasing along prefixes
    fracs = [r.fraction for r in sorted(rows, key=lambda r: r.prefix)]
    assert all(a >= b for a, b in zip(fracs, fracs[1:]))


def test_shear_scan_zero_twist_is_exact():
    schedule = RateSchedule.parse("i")
    tent = Tent((0.0, 0.0), 2.0, 1.0, FLOAT)
    rows = shear_invariance_scan(
        Curve.parse("s"), schedule, (4,), (0.0, 0.5), 60, tent, grid="random", seed=0
    )
    t0 = [r for r in rows if r.t == 0.0][0]
    assert t0.defect == 0.0  # same lattice list, same sum, bit for bit
    assert t0.used == 60 and t0.skipped == 0
    t5 = [r for r in rows if r.t == 0.5][0]
    assert t5.sup_f == 1.0
    assert t5.defect >= 0.0


def test_shear_scan_skips_negative_scalar_heads():
    # phi(s) = -s has derivative -1 everywhere: no aligning element exists
    # in the scalar-block case, so every sample is skipped
    schedule = RateSchedule.parse("i")
    tent = Tent((0.0, 0.0), 2.0, 1.0, FLOAT)
    with pytest.raises(ValueError):
        shear_invariance_scan(
            Curve.parse("-s"), schedule, (4,), (0.0,), 20, tent
        )
    # on a domain straddling zero, half the derivative signs survive
    mixed = Curve.parse("s^2", domain=(Rat(-1), Rat(1)))
    rows = shear_invariance_scan(
        mixed, schedule, (4,), (0.0,), 21, tent
    )
    assert rows[0].skipped > 0
    assert rows[0].used + rows[0].skipped == 21


def test_thread_determinism():
    schedule = RateSchedule.parse("i")
    tent = Tent((0.0, 0.0), 2.0, 1.0, FLOAT)
    curve = Curve.parse("s")
    eq1 = equidistribution_siegel(curve, schedule, (3,), 40, tent, threads=1)
    eq2 = equidistribution_siegel(curve, schedule, (3,), 40, tent, threads=2)
    assert eq1 == eq2
    nd1 = nondivergence_scan(curve, schedule, (3,), (0.1,), 40, threads=1)
    nd2 = nondivergence_scan(curve, schedule, (3,), (0.1,), 40, threads=2)
    assert nd1 == nd2
    im1 = improvability_scan(curve, [(10,)], [Rat(1, 2)], 30, threads=1)
    im2 = improvability_scan(curve, [(10,)], [Rat(1, 2)], 30, threads=2)
    assert im1 == im2
    sh1 = shear_invariance_scan(curve, schedule, (3,), (0.5,), 30, tent, threads=1)
    sh2 = shear_invariance_scan(curve, schedule, (3,), (0.5,), 30, tent, threads=2)
    assert sh1 == sh2
