import random

import pytest
from gmpy2 import mpq

from folsing.elimination import family_generator
from folsing.exactalg import ParseError, UnsupportedField
from folsing.foliation import (
    AffineOneForm,
    ProjectiveFoliation,
    ZeroForm,
    chart_transform,
    foliation_degree,
    parse_one_form,
    pullback,
    read_fol,
    singular_locus,
    write_fol,
)
from folsing.nilcat import TakensSpec, takens_form

from conftest import P, form

XY = ("x", "y")


def test_parse_basic():
    om = form("(x^2) dx + (x + y^2) dy")
    assert om.P == P("x^2") and om.Q == P("x + y^2")


def test_parse_matches_generator():
    text = "(x^2 + y*(-4*x^3 - y^3)) dx + (x + y^2 - x^2*y - x*(-4*x^3 - y^3)) dy"
    assert form(text) == family_generator("omega_a", {"a": mpq(1)})


def test_saturation_records_removed_curve():
    om = form("(x*y) dx + (x*y) dy")
    assert om.P == P("1") and om.Q == P("1")
    assert om.removed == P("x*y")


def test_saturation_is_idempotent():
    om = form("(x^2*y - y) dx + (x*y + y) dy")
    again = AffineOneForm(om.P, om.Q)
    assert again == om and again.removed is None


def test_parse_errors():
    with pytest.raises(ParseError) as e:
        parse_one_form("(x dx")
    assert "column" in str(e.value)
    with pytest.raises((ParseError, ZeroForm)):
        parse_one_form("(0) dx + (x - x) dy")


@pytest.mark.parametrize("b", [0, 3, -1, mpq(1, 2)])
def test_degree_example_b(b):
    assert foliation_degree(family_generator("example_b", {"b": mpq(b)})) == 3


def test_degree_small():
    assert foliation_degree(form("(y) dx + (-x) dy")) == 0
    assert foliation_degree(form("(2*y) dx + (-x) dy")) == 1


def test_degree_is_chart_independent():
    for text in ["(2*y) dx + (-x) dy", "(x^2 + y) dx + (x*y - 1) dy", "(y^3 - x) dx + (x^2*y + 2) dy"]:
        fol = ProjectiveFoliation(form(text))
        for c in (1, 2):
            assert ProjectiveFoliation(chart_transform(fol, c).rename(XY)).degree == fol.degree


def test_chart_at_infinity_linear():
    fol = ProjectiveFoliation(form("(2*y) dx + (-x) dy"))
    om1 = chart_transform(fol, 1)
    # x = 1/v, y = u/v: (2u/v)(-dv/v^2) - (1/v)(du/v - u dv/v^2), times -v^3
    assert om1.is_singular_at((0, 0))
    recs = singular_locus(fol)
    assert sorted((r.chart, tuple(r.coords)) for r in recs) == [(0, (0, 0)), (1, (0, 0)), (2, (0, 0))]


def test_radial_pencil_in_other_charts():
    # the centre [0:0:1] lies outside charts 1 and 2, where the pencil
    # becomes the parallel lines u = const
    fol = ProjectiveFoliation(form("(y) dx + (-x) dy"))
    assert fol.degree == 0
    for c in (1, 2):
        om = chart_transform(fol, c)
        assert om.P.is_constant() and om.P and not om.Q
    assert len(singular_locus(fol)) == 1


def test_omega_a_single_point():
    fol = ProjectiveFoliation(family_generator("omega_a", {"a": mpq(1)}))
    recs = singular_locus(fol)
    assert len(recs) == 1
    assert recs[0].chart == 0 and tuple(recs[0].coords) == (0, 0)


def test_takens_germ_locus():
    recs = singular_locus(takens_form(TakensSpec(3, 2, (1,))))
    assert len(recs) == 1 and recs[0].nu == 1 and recs[0].mu == 2


def test_unsupported_field_is_reported():
    with pytest.raises(UnsupportedField):
        singular_locus(ProjectiveFoliation(form("(y) dx + (x^5 - x - 1) dy")))


def test_quadratic_points_are_orbits():
    fol = ProjectiveFoliation(form("(y) dx + (x^2 - 2) dy"))
    recs = singular_locus(fol)
    affine = [r for r in recs if r.chart == 0]
    assert sum(r.orbit for r in affine) == 2
    assert all(r.field.degree == 2 for r in affine)
    assert sum(r.orbit * r.mu for r in recs) == fol.degree**2 + fol.degree + 1


def test_pullback_identity():
    om = form("(x^2 + y) dx + (x*y - 1) dy")
    assert pullback(om, (P("x"), P("y"))) == om


def test_pullback_scaling_omega_a():
    lam = mpq(2)
    om1 = family_generator("omega_a", {"a": mpq(1)})
    pulled = pullback(om1, (P("x") * lam, P("y") * lam**2))
    target = family_generator("omega_a", {"a": lam**3})
    assert target.proportional_to(pulled) is not None


def test_pullback_collapse():
    with pytest.raises(Exception):
        pullback(form("(1) dx + (0) dy"), (P("0"), P("y")))


def test_example_b0_is_omega_a1():
    assert family_generator("example_b", {"b": mpq(0)}) == family_generator("omega_a", {"a": mpq(1)})


def test_locus_stable_under_linear_change():
    rng = random.Random(5)
    om = form("(x^2 - y) dx + (x*y + 2*x - 1) dy")
    base = sorted(r.mu for r in singular_locus(ProjectiveFoliation(om)))
    for _ in range(3):
        a, b = rng.randint(1, 4), rng.randint(-3, 3)
        moved = pullback(om, (P("x") * a + P("y") * b, P("y")))
        mus = sorted(r.mu for r in singular_locus(ProjectiveFoliation(moved)))
        assert mus == base


def test_fol_roundtrip(tmp_path):
    om = family_generator("example_b", {"b": mpq(3)})
    text = write_fol("example_b", om, {"b": mpq(3)})
    name, params, om2 = read_fol(text, is_text=True)
    assert name == "example_b" and params == {"b": 3} and om2 == om
    path = tmp_path / "b.fol"
    path.write_text(text)
    assert read_fol(str(path))[2] == om


def test_fol_bad_header():
    with pytest.raises(ParseError):
        read_fol("nom: x\nform: (1) dx", is_text=True)


def test_milnor_sum_property():
    for text in ["(2*y) dx + (-3*x) dy", "(x^2 - 1) dx + (y - x) dy", "(y^2 - x) dx + (x*y + 1) dy"]:
        fol = ProjectiveFoliation(form(text))
        d = fol.degree
        assert sum(r.orbit * r.mu for r in singular_locus(fol)) == d * d + d + 1
