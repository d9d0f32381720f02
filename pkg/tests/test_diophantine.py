import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latflow.backend import EXACT, Rat, rat
from latflow.algebra import ExactMatrix
from latflow.diophantine import (
    CorrespondenceReport,
    Curve,
    WindowSpec,
    correspondence_check,
    dual_translate_matrix,
    improvability_fraction,
    minkowski_soluble,
    primal_translate_matrix,
    translate_vector,
    window_dual_soluble,
    window_primal_soluble,
)

import _brute

small_rat = st.fractions(min_value=-4, max_value=4, max_denominator=8)


def test_curve_parse_eval_derivative():
    c = Curve.parse("s, s^2")
    assert c.k == 2 and c.degree == 2
    assert c.eval_exact(Rat(1, 2)) == (Rat(1, 2), Rat(1, 4))
    d = c.derivative()
    assert d.eval_exact(Rat(1, 2)) == (1, 1)
    assert Curve.parse("1/2*s + 3").eval_exact(2) == (4,)
    assert c.affine_span_full()
    assert not Curve.parse("s, 2*s").affine_span_full()  # a line in the plane


def test_curve_sample_points_exact():
    c = Curve.parse("s", domain=(0, 1))
    pts = c.sample_points(4)
    assert pts == [0, Rat(1, 4), Rat(1, 2), Rat(3, 4)]


def test_window_validation():
    with pytest.raises(ValueError):
        WindowSpec((), 1)
    with pytest.raises(ValueError):
        WindowSpec((Rat(1, 2),), 1)  # weights must be >= 1
    with pytest.raises(ValueError):
        WindowSpec((2,), 2)  # radius capped at 1
    w = WindowSpec((3, 2), Rat(1, 2))
    assert w.total_weight() == 6
    assert WindowSpec.from_json(w.to_json()) == w


@settings(max_examples=60)
@given(
    st.lists(small_rat, min_size=2, max_size=2),
    st.lists(st.integers(-5, 5), min_size=3, max_size=3),
)
def test_translate_vector_matches_matrix(phi, x):
    w = WindowSpec((3, 2), Rat(1, 2))
    phi = [rat(p) for p in phi]
    closed = translate_vector(w, phi, x)
    via_matrix = (primal_translate_matrix(w, phi)).apply(x)
    assert tuple(closed) == tuple(via_matrix)
    closed_d = translate_vector(w, phi, x, dual=True)
    via_matrix_d = (dual_translate_matrix(w, phi)).apply(x)
    assert tuple(closed_d) == tuple(via_matrix_d)


def test_translate_matrices_unimodular():
    w = WindowSpec((5, 3, 2), Rat(3, 4))
    phi = (Rat(1, 3), Rat(2), Rat(-1, 2))
    assert primal_translate_matrix(w, phi).det() == 1
    assert dual_translate_matrix(w, phi).det() == 1


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**9))
def test_solubility_routes_match_brute(seed):
    rng = random.Random(seed)
    k = rng.choice((1, 2))
    xi = tuple(Rat(rng.randint(-6, 6), rng.randint(1, 6)) for _ in range(k))
    w = WindowSpec(
        tuple(rng.randint(1, 5) for _ in range(k)),
        Rat(rng.randint(1, 4), 4),
    )
    ps, pw = window_primal_soluble(xi, w)
    ds, dw = window_dual_soluble(xi, w)
    assert ps == _brute.primal_soluble(xi, w.weights, w.radius)
    assert ds == _brute.dual_soluble(xi, w.weights, w.radius)
    if ps:
        p, q = pw
        err = abs(sum(qj * xj for qj, xj in zip(q, xi)) - p)
        assert err <= w.radius / w.total_weight()
        assert all(abs(Rat(qj)) < w.radius * nj for qj, nj in zip(q, w.weights))


def test_dirichlet_guarantee_at_full_radius():
    # mu = 1: the window volume (2 mu)^{k+1} meets Minkowski's 2^{k+1}
    # threshold exactly, and the closed head face absorbs the boundary
    # case, so the system is soluble at every point
    rng = random.Random(3)
    for _ in range(200):
        k = rng.choice((1, 2, 3))
        xi = tuple(Rat(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(k))
        w = WindowSpec(tuple(rng.randint(1, 7) for _ in range(k)), 1)
        ps, _ = window_primal_soluble(xi, w)
        ds, _ = window_dual_soluble(xi, w)
        assert ps and ds


def test_minkowski_soluble_on_unimodular_forms():
    rng = random.Random(5)
    for _ in range(100):
        n = rng.choice((2, 3))
        forms = ExactMatrix(_brute.random_unimodular(rng, n), EXACT)
        alphas = tuple(Rat(rng.randint(1, 4)) for _ in range(n))
        ok, x = minkowski_soluble(forms, alphas, 1)
        assert ok
        vals = forms.apply(x)
        assert abs(vals[0]) <= alphas[0]
        assert all(abs(v) < a for v, a in zip(vals[1:], alphas[1:]))


def test_minkowski_refuses_float_backend():
    forms = ExactMatrix([[1.0, 0.0], [0.0, 1.0]], "float")
    with pytest.raises(ValueError):
        minkowski_soluble(forms, (1, 1))


def test_correspondence_random_instances():
    rng = random.Random(17)
    for _ in range(100):
        k = rng.choice((1, 2))
        xi = tuple(Rat(rng.randint(-8, 8), rng.randint(1, 8)) for _ in range(k))
        w = WindowSpec(
            tuple(rng.randint(1, 6) for _ in range(k)),
            Rat(rng.randint(2, 4), 4),
        )
        rep = correspondence_check(xi, w)
        assert isinstance(rep, CorrespondenceReport)
        assert rep.ok


def test_known_insoluble_instance():
    # radius 19/20 with integer weights (10, 2): xi = (1/20, 1/2) admits no
    # nonzero solution; this is the control row of the half-integral scan
    w = WindowSpec((10, 2), Rat(19, 20))
    soluble, _ = window_primal_soluble((Rat(1, 20), Rat(1, 2)), w)
    assert not soluble
    # brute agrees
    assert not _brute.primal_soluble((Rat(1, 20), Rat(1, 2)), (10, 2), Rat(19, 20))


def test_improvability_fraction_frozen():
    curve = Curve.parse("s, s^2")
    frac = improvability_fraction(curve, [(10, 10), (100, 100)], Rat(1, 2), 50)
    assert frac == Fraction(4, 25)


def test_improvability_fraction_monotone_in_rows():
    curve = Curve.parse("s, s^2")
    rows = [(10, 10), (100, 100), (1000, 1000)]
    fracs = [
        improvability_fraction(curve, rows[:j], Rat(1, 2), 30)
        for j in range(1, len(rows) + 1)
    ]
    assert all(a >= b for a, b in zip(fracs, fracs[1:]))
