import random

import pytest
from gmpy2 import mpq

from folsing.elimination import family_generator
from folsing.exactalg import TruncSeries
from folsing.foliation import pullback
from folsing.localsing import (
    NeedsReduction,
    algebraic_multiplicity,
    bb_grothendieck,
    bb_index,
    classify,
    cs_along_axis,
    cs_index,
    gsv_index,
    milnor_number,
    pullback_order,
    separatrix_series,
)
from folsing.nilcat import TakensSpec, takens_form

from conftest import P, form


def dual_linear(lam):
    """The form whose dual field is x d/dx + lam y d/dy."""
    return form(f"({-lam}*y) dx + (x) dy")


@pytest.mark.parametrize("n,p", [(3, 2), (5, 3), (6, 2), (8, 5)])
def test_takens_multiplicities(n, p):
    om = takens_form(TakensSpec(n, p, (1,)))
    assert algebraic_multiplicity(om) == 1
    assert milnor_number(om) == n - 1
    assert classify(om).kind == "Nilpotent"
    assert not classify(om).reduced


def test_multiplicity_examples():
    assert algebraic_multiplicity(form("(3*x^2) dx + (2*y) dy")) == 1
    assert algebraic_multiplicity(form("(x^2) dx + (y^2) dy")) == 2


def test_milnor_after_one_blowup():
    om = form("(3*x + 2*y^2) dx + (2*x*y) dy")
    assert milnor_number(om) == 3


def test_milnor_omega_a():
    assert milnor_number(family_generator("omega_a", {"a": mpq(1)})) == 13


def test_milnor_linear_invariance():
    rng = random.Random(3)
    om = form("(x^3 + y^2) dx + (x*y - y^3) dy")
    mu = milnor_number(om)
    for _ in range(5):
        a, b, c = rng.randint(1, 5), rng.randint(-4, 4), rng.randint(-4, 4)
        d = rng.choice([1, 2, 3])
        if a * d - b * c == 0:
            continue
        moved = pullback(om, (P("x") * a + P("y") * b, P("x") * c + P("y") * d))
        assert milnor_number(moved) == mu


def test_classify_resonant_node():
    cl = classify(dual_linear(2))
    assert cl.kind == "NonDegenerate" and not cl.reduced


def test_classify_saddle_node_family():
    cl = classify(family_generator("omega_a", {"a": mpq(1)}))
    assert cl.kind == "SaddleNode" and cl.reduced


def test_classification_survives_linear_change():
    om = form("(-y + x^2) dx + (x^2 + x*y) dy")
    moved = pullback(om, (P("x") + P("y") * 2, P("y")))
    assert classify(moved).kind == classify(om).kind == "SaddleNode"


def test_linear_separatrices_are_axes():
    om = dual_linear(mpq(-3, 2))
    s1 = separatrix_series(om, None, "sep1", 6)
    s2 = separatrix_series(om, None, "sep2", 6)
    for s in (s1, s2):
        assert all(c == 0 for c in s.f.coeffs)
    assert {s1.axis, s2.axis} == {"x", "y"}


def test_saddle_node_separatrices():
    om = form("(-y) dx + (x^2) dy")
    strong = separatrix_series(om, None, "strong", 6)
    weak = separatrix_series(om, None, "weak", 6)
    assert strong.axis == "y" and weak.axis == "x"
    assert weak.formal_only and not strong.formal_only


def test_euler_series():
    S = separatrix_series(form("(x - y) dx + (x^2) dy"), None, "weak", 8)
    c = S.f.coeffs
    assert c[1] == 1 and c[2] == 1
    assert all(c[i + 1] == i * c[i] for i in range(1, 8))


def test_cs_linear():
    lam = mpq(-5, 7)
    assert cs_along_axis(dual_linear(lam), "x") == lam
    assert cs_along_axis(dual_linear(lam), "y") == 1 / lam


def test_cs_strong_is_zero():
    om = form("(-y + x*y) dx + (x^2) dy")
    assert cs_index(om, separatrix_series(om, None, "strong", 8)) == 0


def test_cs_one_blowup_instance():
    lam = mpq(-4, 3)
    om = form(f"({lam - 1}*y) dx + (-x) dy")
    assert cs_along_axis(om, "x") == lam - 1


def test_cs_product_and_bb_identity():
    om = form("(-3*y + x^2) dx + (2*x + y^2) dy")
    assert classify(om).kind == "NonDegenerate"
    s1 = separatrix_series(om, None, "sep1", 12)
    s2 = separatrix_series(om, None, "sep2", 12)
    c1, c2 = cs_index(om, s1), cs_index(om, s2)
    assert c1 * c2 == 1
    assert bb_index(om) == c1 + c2 + 2


def test_gsv_linear_both_separatrices():
    om = dual_linear(mpq(-2))
    assert pullback_order(om, (TruncSeries([0, 1], 5), TruncSeries([0], 5))) == 1
    assert pullback_order(om, (TruncSeries([0], 5), TruncSeries([0, 1], 5))) == 1


def test_gsv_weak_saddle_node():
    om = form("(-y) dx + (x^2) dy")
    assert gsv_index(om, separatrix_series(om, None, "weak", 8)) == 2
    assert gsv_index(om, separatrix_series(om, None, "strong", 8)) == 1


def test_pullback_order_cusp():
    om = form("(-3*x^2) dx + (2*y) dy")
    assert pullback_order(om, (TruncSeries([0, 0, 1], 8), TruncSeries([0, 0, 0, 1], 8))) == 2


def test_pullback_order_not_invariant():
    with pytest.raises(Exception):
        pullback_order(dual_linear(2), (TruncSeries([0, 1], 5), TruncSeries([0, 1], 5)))


def test_bb_values():
    assert bb_index(dual_linear(2)) == mpq(9, 2)
    assert bb_index(form("(-y) dx + (x^2) dy")) == 4
    assert bb_index(family_generator("omega_a", {"a": mpq(1)})) == 25


def test_bb_nilpotent_needs_reduction():
    with pytest.raises(NeedsReduction):
        bb_index(takens_form(TakensSpec(5, 3, (1,))))


@pytest.mark.parametrize("text", [
    "(-3*y + x^2) dx + (2*x + y^2) dy",
    "(-y + x*y) dx + (x^2) dy",
    "(x - y) dx + (x^2) dy",
    "(-5/2*y + x^3) dx + (x + x*y) dy",
])
def test_bb_formula_against_residue(text):
    om = form(text)
    assert bb_index(om) == bb_grothendieck(om)


def test_saddle_node_family_weak_cs():
    om = family_generator("omega_a", {"a": mpq(1)})
    assert cs_index(om, separatrix_series(om, None, "weak", 30)) == -1
