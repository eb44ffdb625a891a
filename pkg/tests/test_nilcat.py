import pytest
from gmpy2 import mpq

from folsing.localsing import algebraic_multiplicity, milnor_number
from folsing.nilcat import (
    NilcatError,
    TakensSpec,
    expected_index_table,
    grid_specs,
    nilpotent_case,
    takens_form,
    verify_nilpotent,
)

from conftest import form


def test_takens_expansion():
    assert takens_form(TakensSpec(3, 2, (1,))) == form("(3*x^2) dx + (2*y + x^2) dy")


def test_takens_mu_nu():
    om = takens_form(TakensSpec(6, 2, (1,)))
    assert milnor_number(om) == 5
    assert algebraic_multiplicity(om) == 1


@pytest.mark.parametrize("bad", [(2, 2, (1,)), (3, 1, (1,)), (3, 2, (0, 1))])
def test_spec_constraints(bad):
    with pytest.raises(NilcatError):
        TakensSpec(*bad)


@pytest.mark.parametrize("spec,case,k", [
    ((5, 3, (1,)), "1a", 2),
    ((4, 3, (1,)), "1b", 2),
    ((6, 2, (1,)), "3", 2),
    ((4, 2, (1,)), "2a", 2),
    ((4, 2, (4,)), "2b", 2),
])
def test_case_selection(spec, case, k):
    assert nilpotent_case(TakensSpec(*spec)) == (case, k)


def test_table_1a():
    t = expected_index_table("1a", 5, 3)
    e = t.expected
    assert e["CS(D2, D2^D1)"] == mpq(-1, 2)
    assert e["CS(D2, D2^D4)"] == mpq(-5, 2)
    assert e["CS(D4, D4^D3)"] == mpq(-1, 2)
    assert e["CS(D4, p')"] == mpq(-1, 10)
    assert e["BB(F,0)"] == 0


def test_table_2b():
    assert expected_index_table("2b", 6, 3).expected["BB(F,0)"] == 12


def test_table_3():
    e = expected_index_table("3", 6, 2, mu=3).expected
    assert e["GSV(F,S',0)"] == 2
    assert e["GSV(F,S'',0)"] == 4
    assert e["n - (mu+2k-1)"] == 0


def test_table_2a_needs_product():
    with pytest.raises(Exception):
        expected_index_table("2a", 4, 2)


def test_table_2a_formula():
    e = expected_index_table("2a", 4, 2, lam_prod=mpq(1, 15)).expected
    assert e["BB(F,0)"] == 8 - 2 / (4 * mpq(1, 15))


def test_corner_values_telescoping():
    # the corner indices -j/(j+1) along a chain
    e = expected_index_table("1b", 8, 5).expected
    corners = [v for key, v in e.items() if key.startswith("CS(D") and "^" in key]
    assert corners[:3] == [mpq(-1, 2), mpq(-2, 3), mpq(-3, 4)]


@pytest.mark.parametrize("spec", [(5, 3, (1,)), (4, 2, (1,)), (6, 2, (1,)), (4, 3, (1,)),
                                  (6, 3, (4,)), (9, 4, (2, 0, -1)), (10, 5, (1, 1))])
def test_verify_instances(spec):
    rep = verify_nilpotent(TakensSpec(*spec))
    assert rep.ok, rep.text()


def test_case_3_strong_separatrix_in_divisor():
    rep = verify_nilpotent(TakensSpec(6, 2, (1,)))
    assert rep.observed["strong separatrix in divisor"] == 1
    assert rep.observed["CS(D2, p'')"] == 0


def test_grid_covers_all_cases():
    cases = {nilpotent_case(s)[0] for s in grid_specs()}
    assert cases == {"1a", "1b", "2a", "2b", "3"}
