import random

import pytest
from gmpy2 import mpq

from folsing.elimination import (
    FAMILIES,
    ConstraintViolation,
    GenericSaddleForm,
    default_family_instances,
    elimination_trace,
    equivalence_check,
    family_generator,
    random_evaluation_check,
    random_params,
    series_coefficients,
    solve_conditions,
    verify_family_instance,
    weight,
)
from folsing.exactalg import parse_poly
from folsing.foliation import ProjectiveFoliation, singular_locus

from conftest import P


@pytest.fixture(scope="module")
def trace():
    return elimination_trace(13)


def R(text):
    from folsing.elimination import RING
    return parse_poly(text, RING)


def test_first_coefficients(trace):
    # the index of a_ij follows the monomial x^i y^j; the leading term
    # of the branch is fixed by the y^2 coefficient
    assert trace.c[2] == R("-a02")
    assert trace.c[3] == R("-a11") * trace.c[2]


def test_low_d_vanish(trace):
    assert not trace.d[2] and not trace.d[3]


def test_d4_condition(trace):
    d4 = trace.d[4]
    assert not d4.subs({"p03": R("-a02^2")})
    assert d4.degree_in("p03") == 1


def test_every_stage_holds(trace):
    bad = [ch.line() for ch in trace.checks if not ch.ok]
    assert not bad


def test_weights_are_homogeneous(trace):
    for j in range(4, 10):
        assert weight(trace.d[j]) == {2 * j - 2}


def test_extra_factors_recorded(trace):
    assert set(trace.extra) == {10, 11}


def test_branches(trace):
    results = solve_conditions(trace)
    assert all(r.ok for r in results), [r.line() for r in results if not r.ok]
    kinds = {r.kind for r in results}
    assert {"terminal", "dead", "extra", "split"} <= kinds
    terminal = [r for r in results if r.kind == "terminal"]
    assert len(terminal) == 2
    dead = [r for r in results if r.kind == "dead"]
    assert len(dead) >= 2


def test_terminal_a12_zero_value(trace):
    r = [b for b in solve_conditions(trace) if b.name == "a12 = 0"][0]
    assert r.d[13] == R("-4*a02^8")


def test_terminal_cube_branch_value(trace):
    # a02 = 9 s^3, a12 = 27 s^4 parametrizes 3 a02^4 = a12^3
    r = [b for b in solve_conditions(trace) if b.name == "3 a02^4 = a12^3"][0]
    a12 = R("27*s^4")
    assert r.d[13] == a12**6 * mpq(-64, 9)
    assert r.d[13] != a12**3 * mpq(-64, 9)


def test_random_evaluation(trace):
    ok, n = random_evaluation_check(trace, count=50, seed=7)
    assert ok and n == 50


def test_generic_form_specializes_to_omega_a():
    from folsing.elimination import PARAMS
    vals = {k: mpq(0) for k in PARAMS}
    vals.update({"a02": mpq(1), "a21": mpq(-1), "p30": mpq(-4), "p03": mpq(-1)})
    om = GenericSaddleForm.build().omega(vals)
    assert om == family_generator("omega_a", {"a": mpq(1)})


def test_omega_a_display():
    om = family_generator("omega_a", {"a": mpq(1)})
    phi = P("-4*x^3 - y^3")
    assert om.Q == P("x + y^2 - x^2*y") - P("x") * phi
    assert om.P == P("x^2") + P("y") * phi


@pytest.mark.parametrize("fid,params", [
    ("omega_ac", {"a": mpq(1), "c": mpq(2)}),
    ("example_b", {"b": mpq(1)}),
    ("example_b", {"b": mpq(2)}),
    ("example_sn", {"r": mpq(1), "s": mpq(1), "t": mpq(1), "w": mpq(0)}),
    ("nilpotent_4param", {"a1": mpq(0), "a2": mpq(0), "a3": mpq(0), "a4": mpq(0)}),
])
def test_domain_constraints(fid, params):
    with pytest.raises(ConstraintViolation):
        family_generator(fid, params)


@pytest.mark.parametrize("idx", range(15))
def test_default_instances(idx):
    fid, params = default_family_instances()[idx]
    rep = verify_family_instance(fid, params)
    assert rep.ok, rep.line()


def test_extension_field_instance():
    rep = verify_family_instance("omega_ac", {"a": mpq(1)})
    assert rep.ok, rep.line()


def test_printed_nilpotent_coefficient_breaks_uniqueness():
    params = {"a1": mpq(-1), "a2": mpq(1), "a3": mpq(1), "a4": mpq(1)}
    printed = family_generator("nilpotent_4param", params, printed=True)
    assert len(singular_locus(ProjectiveFoliation(printed))) > 1
    assert verify_family_instance("nilpotent_4param", params).ok


@pytest.mark.parametrize("b", [mpq(3), mpq(-2), mpq(1, 3), mpq(5, 2)])
def test_example_sn_recovers_example_b(b):
    sn = family_generator("example_sn", {"r": mpq(1), "s": b, "t": mpq(1), "w": mpq(0)})
    assert sn == family_generator("example_b", {"b": b})


def test_equivalence_b_values():
    w3 = family_generator("example_b", {"b": mpq(3)})
    wm1 = family_generator("example_b", {"b": mpq(-1)})
    assert equivalence_check(w3, w3, "diagonal").equivalent
    assert not equivalence_check(w3, wm1, "diagonal").equivalent
    assert not equivalence_check(wm1, w3, "diagonal").equivalent


def test_equivalence_nilpotent_scaling():
    a = {"a1": mpq(1), "a2": mpq(-2), "a3": mpq(3), "a4": mpq(1, 2)}
    lam = mpq(2)
    b = {"a1": lam * a["a1"], "a2": lam**2 * a["a2"], "a3": lam**3 * a["a3"], "a4": lam**5 * a["a4"]}
    om1 = family_generator("nilpotent_4param", a)
    om2 = family_generator("nilpotent_4param", b)
    res = equivalence_check(om1, om2, "diagonal")
    assert res.equivalent and res.verified
    c = dict(b)
    c["a4"] = c["a4"] + 1
    assert not equivalence_check(om1, family_generator("nilpotent_4param", c), "diagonal").equivalent


def test_equivalence_identity():
    om = family_generator("omega_a", {"a": mpq(1)})
    res = equivalence_check(om, om, "identity")
    assert res.equivalent and res.witness["k"] == 1


def test_equivalence_scaling_omega_a():
    om1 = family_generator("omega_a", {"a": mpq(1)})
    res = equivalence_check(om1, family_generator("omega_a", {"a": mpq(8)}), "scaling")
    assert res.equivalent and res.verified and res.witness["lambda"] == mpq(1, 2)
    irr = equivalence_check(om1, family_generator("omega_a", {"a": mpq(2)}), "scaling")
    assert irr.equivalent and irr.witness is None and irr.triangular


def test_equivalence_alpha_beta():
    om1 = family_generator("omega_ac", {"a": mpq(9), "c": mpq(27)})
    k = mpq(2)
    om2 = family_generator("omega_ac", {"a": 9 * k**3, "c": 27 * k**4})
    res = equivalence_check(om1, om2, "alpha_beta")
    assert res.equivalent


def test_equivalence_symmetric():
    rng = random.Random(4)
    for _ in range(3):
        b1 = random_params("example_b", rng)
        b2 = random_params("example_b", rng)
        o1, o2 = family_generator("example_b", b1), family_generator("example_b", b2)
        assert equivalence_check(o1, o2).equivalent == equivalence_check(o2, o1).equivalent


def test_unknown_map_family():
    om = family_generator("omega_a", {"a": mpq(1)})
    with pytest.raises(ValueError):
        equivalence_check(om, om, "projective")


def test_families_listed():
    assert len(FAMILIES) == 6


def test_low_coefficients_match_sympy_oracle():
    sp = pytest.importorskip("sympy")
    N = 5
    t, x = sp.symbols("t x")
    names = "a20 a11 a02 a30 a21 a12 p30 p21 p12 p03"
    a20, a11, a02, a30, a21, a12, p30, p21, p12, p03 = sp.symbols(names)
    phi = p30 * x**3 + p21 * x**2 * t + p12 * x * t**2 + p03 * t**3
    rest = a20 * x**2 + a11 * x * t + a02 * t**2 + x * (a30 * x**2 + a21 * x * t + a12 * t**2) - x * phi
    # A = x + rest = 0, iterate x <- -rest(x) modulo t^(N+1)
    xs = sp.Integer(0)
    for _ in range(N):
        xs = sp.expand(-rest.subs(x, xs))
        xs = sum(xs.coeff(t, j) * t**j for j in range(N + 1))
    Bt = sp.expand((x**2 + t * phi).subs(x, xs))
    c, d = series_coefficients(GenericSaddleForm.build(), N)
    for j in range(2, N + 1):
        assert sp.expand(sp.sympify(str(c[j]).replace("^", "**")) - xs.coeff(t, j)) == 0, j
        assert sp.expand(sp.sympify(str(d[j]).replace("^", "**")) - Bt.coeff(t, j)) == 0, j
    assert sp.expand(xs.coeff(t, 2) + a02) == 0
