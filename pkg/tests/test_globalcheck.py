import random

import pytest
from gmpy2 import mpq

from folsing.elimination import family_generator
from folsing.exactalg import Q
from folsing.foliation import ProjectiveFoliation
from folsing.globalcheck import (
    NotInvariant,
    SearchRefused,
    check_curve_sums,
    check_global_sums,
    invariant_curve_search,
    is_invariant,
    random_log_foliation,
)

from conftest import P, form


def values(rep):
    return {l.formula: (l.computed, l.expected, l.ok) for l in rep.lines}


def test_linear_global_sums():
    v = values(check_global_sums(form("(2*y) dx + (-x) dy")))
    assert v["sum of Milnor numbers"] == (3, 3, True)
    assert v["sum of Baum-Bott indices"] == (9, 9, True)


def test_omega_a_global_sums():
    rep = check_global_sums(family_generator("omega_a", {"a": mpq(1)}))
    assert rep.ok and rep.degree == 3 and len(rep.points) == 1


def test_linear_curve_sums():
    v = values(check_curve_sums(form("(2*y) dx + (-x) dy"), P("y")))
    assert v["sum of GSV indices"][:2] == (2, 2)
    assert v["sum of CS indices"][:2] == (1, 1)
    assert v["sum of mu(F,B,p)"][:2] == (2, 2)


def test_cuspidal_curve_sums():
    branches = {(0, (Q(0), Q(0))): [([0, 0, -1], [0, 0, 0, 1])]}
    rep = check_curve_sums(form("(3*x^2) dx + (2*y) dy"), P("y^2 + x^3"), branches)
    assert rep.ok


def test_curve_sums_reject_non_invariant():
    with pytest.raises(NotInvariant):
        check_curve_sums(form("(2*y) dx + (-x) dy"), P("x + y"))


def test_is_invariant_examples():
    om = form("(-3*y) dx + (x) dy")
    assert is_invariant(om, P("y"))
    assert not is_invariant(om, P("y - x^2"))
    assert is_invariant(form("(-2*y) dx + (x) dy"), P("y - x^2"))
    assert is_invariant(form("(3*x^2) dx + (2*y) dy"), P("y^2 + x^3"))


def test_is_invariant_chart_independent():
    fol = ProjectiveFoliation(form("(x*y - y) dx + (x^2 + y^2 - 1) dy"))
    # same verdicts when the curve is tested through the projective object
    assert is_invariant(fol, P("y")) == is_invariant(fol.omega, P("y"))


def test_search_omega_a():
    cert = invariant_curve_search(ProjectiveFoliation(family_generator("omega_a", {"a": mpq(1)})), 5)
    assert cert.verdict == "none"
    for r in cert.per_degree:
        dims = [d for _, d in r.dimensions]
        assert dims[-1] == 0
        assert all(a >= b for a, b in zip(dims, dims[1:]))
    assert any("6 vs d^2+d = 12" in n for n in cert.notes)


def test_search_nilpotent_unit_parameters():
    params = {"a1": mpq(0), "a2": mpq(0), "a3": mpq(0), "a4": mpq(1)}
    cert = invariant_curve_search(ProjectiveFoliation(family_generator("nilpotent_4param", params)), 5)
    assert cert.verdict == "none"
    assert any("14" in n for n in cert.notes)


def test_search_control_refused():
    fol = ProjectiveFoliation(form("(2*y) dx + (-x) dy"))
    with pytest.raises(SearchRefused):
        invariant_curve_search(fol, 1)
    assert is_invariant(fol, P("y"))


def test_search_refuses_dicritical():
    with pytest.raises(SearchRefused):
        invariant_curve_search(ProjectiveFoliation(form("(y + x^3) dx + (-x) dy")), 2)


def test_log_foliations():
    rng = random.Random(11)
    for deg in (1, 2):
        L = random_log_foliation(rng, deg)
        assert L.degree == deg
        assert check_global_sums(L.form).ok
        for F in L.lines:
            assert check_curve_sums(L.form, F).ok
