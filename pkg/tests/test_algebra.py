import pickle
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latflow.backend import (
    EXACT,
    FLOAT,
    BackendMismatch,
    Rat,
    as_fraction,
    format_scalar,
    parse_scalar,
    rat,
    rat_ceil,
    rat_floor,
)
from latflow.algebra import (
    ExactMatrix,
    ExpansionRates,
    column_unipotent,
    dual_involution,
    doubled,
    expanding_diagonal,
    is_block_stabilizer,
    is_dual_block_stabilizer,
    reversal_permutation,
    row_unipotent,
)

from _brute import random_unimodular

rationals = st.fractions(min_value=-60, max_value=60, max_denominator=12)


def test_rat_coercions():
    assert rat("3/5") == Rat(3, 5)
    assert rat(-7) == Rat(-7)
    assert rat(rat("2")) == Rat(2)
    with pytest.raises(BackendMismatch):
        rat(0.5)  # silent float rationalization is the bug class we ban
    assert as_fraction(Rat(22, 8)).denominator == 4


def test_rat_floor_ceil():
    assert rat_floor(Rat(7, 2)) == 3
    assert rat_floor(Rat(-7, 2)) == -4
    assert rat_ceil(Rat(7, 2)) == 4
    assert rat_ceil(Rat(-7, 2)) == -3
    assert rat_floor(Rat(6)) == rat_ceil(Rat(6)) == 6


@given(rationals)
def test_scalar_roundtrip(q):
    s = format_scalar(rat(q), EXACT)
    assert parse_scalar(s, EXACT) == rat(q)


def test_matrix_exact_arithmetic():
    g = ExactMatrix([[1, 2], [3, "5/2"]], EXACT)
    assert g.det() == Rat(-7, 2)
    inv = g.inverse()
    assert (g @ inv).rows == ExactMatrix.identity(2, EXACT).rows
    # inverse of an integer unimodular matrix stays integral
    u = ExactMatrix([[2, 3], [1, 2]], EXACT)
    assert u.det() == 1
    assert all(x.denominator == 1 for row in u.inverse().rows for x in row)


def test_matrix_backend_mismatch_is_hard_error():
    a = ExactMatrix([[1, 0], [0, 1]], EXACT)
    b = ExactMatrix([[1.0, 0.0], [0.0, 1.0]], FLOAT)
    with pytest.raises(BackendMismatch):
        a @ b


def test_matrix_pickles():
    g = ExactMatrix([[1, "1/3"], [0, 1]], EXACT)
    h = pickle.loads(pickle.dumps(g))
    assert h.rows == g.rows and h.backend == g.backend


@given(
    st.lists(rationals, min_size=2, max_size=2),
    st.lists(rationals, min_size=2, max_size=2),
)
def test_row_unipotent_homomorphism(a, b):
    # u(a) u(b) = u(a + b): the shear block is additive
    ua, ub = row_unipotent(list(map(rat, a))), row_unipotent(list(map(rat, b)))
    uab = row_unipotent([rat(x) + rat(y) for x, y in zip(a, b)])
    assert (ua @ ub).rows == uab.rows
    assert ua.det() == 1


def test_column_unipotent_is_involution_image():
    # sigma(u(-s)) = column shear by s: the two translate shapes are the
    # same element seen through the outer automorphism
    shift = [rat("1/2"), rat(3)]
    got = column_unipotent(shift)
    want = dual_involution(row_unipotent([-x for x in shift]))
    assert got.rows == want.rows
    assert got.det() == 1


@settings(max_examples=40)
@given(st.integers(0, 10_000), st.integers(0, 10_000))
def test_dual_involution_properties(seed_a, seed_b):
    rng_a, rng_b = random.Random(seed_a), random.Random(seed_b)
    g = ExactMatrix(random_unimodular(rng_a, 3), EXACT)
    h = ExactMatrix(random_unimodular(rng_b, 3), EXACT)
    sg = dual_involution(g)
    # involution, det preserved up to the inverse-transpose sign structure
    assert dual_involution(sg).rows == g.rows
    assert sg.det() == g.det()
    # anti-automorphism? no: sigma(gh) = sigma(g) sigma(h) (inverse-transpose
    # conjugated by the reversal is a homomorphism)
    assert dual_involution(g @ h).rows == (sg @ dual_involution(h)).rows


def test_dual_involution_swaps_block_stabilizers():
    # [[A, *], [0, I]] with det A = 1
    g = ExactMatrix([[2, 3, 5], [1, 2, 7], [0, 0, 1]], EXACT)
    assert is_block_stabilizer(g, 2)
    assert not is_dual_block_stabilizer(g, 2)
    assert is_dual_block_stabilizer(dual_involution(g), 2)


def test_reversal_permutation():
    r = reversal_permutation(3)
    v = ExactMatrix([[1], [2], [3]], EXACT)
    assert (r @ v).rows == ((3,), (2,), (1,))
    assert abs(r.det()) == 1


def test_doubled_pairs_with_involution():
    g = ExactMatrix([[1, 1], [0, 1]], EXACT)
    a, b = doubled(g)
    assert a.rows == g.rows
    assert b.rows == dual_involution(g).rows


def test_expansion_rates_validation():
    r = ExpansionRates((4.0, 2.0, 1.0), FLOAT)
    assert r.n == 4
    assert r.total_weight() == pytest.approx(8.0)
    with pytest.raises(ValueError):
        ExpansionRates((1.0, 2.0), FLOAT)  # must be nonincreasing
    with pytest.raises(ValueError):
        ExpansionRates((2.0, 0.5), FLOAT)  # and >= 1 throughout


def test_expanding_diagonal_unimodular():
    import math

    r = ExpansionRates.from_rates((2.0, 1.0))
    d = expanding_diagonal(r)
    # diag(e^3, e^-2, e^-1): total expansion balances the contractions
    assert abs(d.det() - 1.0) < 1e-12
    assert d.rows[0][0] == pytest.approx(math.exp(3.0))
    assert d.rows[1][1] == pytest.approx(math.exp(-2.0))
