import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from folsing.exactalg import (
    MultiPoly,
    ParseError,
    PolyError,
    Q,
    ReducibleMinimalPolynomial,
    TruncationError,
    TruncSeries,
    UnsupportedField,
    adjoin_root,
    implicit_series_solve,
    parse_poly,
    residue_at_origin,
    resultant,
    vanishing_order,
)
from folsing.exactalg.resultant import sylvester_resultant

from conftest import P

XY = ("x", "y")


def test_rationals_are_normalized():
    assert Q("6/-4") == mpq(-3, 2)
    assert Q(0).denominator == 1
    assert Q("-0/5") == 0


def test_resultant_linear_root():
    assert resultant(P("x^2 - y"), P("x - y"), "x") == P("y^2 - y")


def test_resultant_degree_zero_convention():
    assert resultant(P("x"), P("y"), "x") == P("y")


def test_resultant_common_factor_is_zero():
    # both vanish at x = 0, so the resultant is zero; sympy agrees
    r = resultant(P("3*x^2"), P("2*x*y + x^5"), "x")
    assert not r
    x, y = sympy.symbols("x y")
    assert sympy.resultant(3 * x**2, 2 * x * y + x**5, x) == 0


def test_resultant_undeclared_variable():
    with pytest.raises(PolyError):
        resultant(P("x"), P("y"), "t")


def test_resultant_matches_sympy():
    f, g = P("x^3 - 2*x*y + y^2 + 1"), P("x^2*y - x + 3*y^3")
    x, y = sympy.symbols("x y")
    ours = resultant(f, g, "x")
    theirs = sympy.Poly(sympy.resultant(x**3 - 2 * x * y + y**2 + 1, x**2 * y - x + 3 * y**3, x), y)
    assert ours.to_univariate_list("y") == [Q(str(c)) for c in reversed(theirs.all_coeffs())]


small = st.integers(-3, 3)


@st.composite
def polys(draw, max_deg=2):
    terms = {}
    for i in range(max_deg + 1):
        for j in range(max_deg + 1 - i):
            c = draw(small)
            if c:
                terms[(i, j)] = mpq(c)
    return MultiPoly.from_dict(XY, terms)


@settings(max_examples=40, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a


@settings(max_examples=30, deadline=None)
@given(polys(), polys(), polys())
def test_resultant_sign_and_multiplicativity(f, g, h):
    if f.degree_in("x") < 1 or g.degree_in("x") < 1 or h.degree_in("x") < 1:
        return
    m, n = f.degree_in("x"), g.degree_in("x")
    assert resultant(g, f, "x") == resultant(f, g, "x") * (-1) ** (m * n)
    assert resultant(f, g * h, "x") == resultant(f, g, "x") * resultant(f, h, "x")


@settings(max_examples=30, deadline=None)
@given(polys(3), polys(3))
def test_subresultant_equals_sylvester(f, g):
    if f.degree_in("x") < 1 or g.degree_in("x") < 1:
        return
    assert resultant(f, g, "x") == sylvester_resultant(f, g, "x")


def test_vanishing_order():
    assert vanishing_order(P("y^2 - y", ("y",))) == 1
    assert vanishing_order(TruncSeries([0, 0, 0, 1, 0, 0, 0, 5], 7)) == 3
    with pytest.raises(TruncationError):
        vanishing_order(TruncSeries([0, 0, 0], 2))


def test_series_read_beyond_truncation_fails():
    s = TruncSeries([1, 2], 3)
    assert s[3] == 0
    with pytest.raises(TruncationError):
        s[4]
    assert (s * TruncSeries([1], 1)).N == 1


def test_residues():
    lam = mpq(7, 3)
    assert residue_at_origin(TruncSeries([lam], 4), TruncSeries([0, -1], 4)) == -lam
    assert residue_at_origin(TruncSeries([1], 4), TruncSeries([0, 0, 1], 4)) == 0
    assert residue_at_origin(TruncSeries([0, 1, 1], 4), TruncSeries([0, 0, 1], 4)) == 1


def test_residue_needs_truncation():
    with pytest.raises(TruncationError):
        residue_at_origin(TruncSeries([1], 0), TruncSeries([0, 0, 0, 1], 3))


def test_adjoin_root_sqrt2():
    K = adjoin_root([-2, 0, 1])
    th = K.gen
    assert (1 + th) * (1 - th) == K.convert(-1)
    assert (th.inverse() * th) == K.one


def test_adjoin_root_reducible():
    with pytest.raises(ReducibleMinimalPolynomial):
        adjoin_root([0, -1, 1])


def test_adjoin_root_degree_too_large():
    with pytest.raises(UnsupportedField):
        adjoin_root([-2, 0, 0, 0, 0, 1])


def test_vieta_product():
    K = adjoin_root([mpq(1, 21), mpq(1, 3), 1])
    th = K.gen
    assert th.norm() == mpq(1, 21)
    assert th.trace() == mpq(-1, 3)
    assert th * th.conjugate() == K.convert(mpq(1, 21))


def test_cubic_norm_trace():
    K = adjoin_root([-3, 0, 0, 1], "c")
    assert K.gen.norm() == 3
    assert K.gen.trace() == 0


def test_contexts_do_not_mix():
    K1 = adjoin_root([-2, 0, 1])
    K2 = adjoin_root([-3, 0, 1])
    with pytest.raises(Exception):
        K1.gen + K2.gen


def test_implicit_solve_simple():
    s = implicit_series_solve(P("x - t^2", ("x", "t")), 5)
    assert list(s.coeffs) == [0, 0, 1, 0, 0, 0]


def test_implicit_solve_alternating():
    s = implicit_series_solve(P("x + t + x*t", ("x", "t")), 3)
    assert list(s.coeffs) == [0, -1, 1, -1]


def test_implicit_solve_hypothesis():
    with pytest.raises(ValueError):
        implicit_series_solve(P("x^2 - t", ("x", "t")), 3)


def test_implicit_solve_recomposes_to_zero():
    F = P("x + x^2*t - 3*t^2 + x*t^3 + x^3", ("x", "t"))
    N = 9
    s = implicit_series_solve(F, N)
    cs = [c.constant_term() if isinstance(c, MultiPoly) else c for c in s.coeffs]
    xt = MultiPoly.from_dict(("x", "t"), {(0, k): c for k, c in enumerate(cs) if c})
    comp = F.subs({"x": xt})
    assert all(e[1] > N for e, _ in comp.items())


def test_implicit_solve_symbolic_parameters():
    F = P("x + a*t^2 + x*t", ("x", "t", "a"))
    s = implicit_series_solve(F, 3)
    assert s[2] == P("-a", ("a",))
    assert s[3] == P("a", ("a",))


def test_parse_grammar():
    assert parse_poly("x^2 - 1/2*y", XY) == MultiPoly.from_dict(XY, {(2, 0): 1, (0, 1): mpq(-1, 2)})
    with pytest.raises(ParseError):
        parse_poly("2x", XY)
    with pytest.raises(ParseError):
        parse_poly("z + 1", XY)


def test_canonical_serialization_is_graded_lex():
    assert str(P("1 + y + x + x*y + y^2 + x^2")) == "x^2 + x*y + y^2 + x + y + 1"
