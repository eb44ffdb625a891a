import pytest
from gmpy2 import mpq

from folsing.blowup import (
    InapplicableLaw,
    blow_up,
    bb_via_reduction,
    recursion_audit,
    reduce_singularity,
)
from folsing.corpus import audit_corpus
from folsing.localsing import bb_grothendieck, milnor_number
from folsing.nilcat import TakensSpec, takens_form

from conftest import P, form


def takens(n, p, U=(1,)):
    return takens_form(TakensSpec(n, p, U))


def test_radial_is_dicritical():
    res = blow_up(form("(y) dx + (-x) dy"))
    assert res.dicritical and res.divisor_singularities == []


def test_linear_node_two_points():
    res = blow_up(form("(2*y) dx + (-x) dy"))
    assert not res.dicritical
    assert sorted(r.chart for r in res.divisor_singularities) == [1, 2]


def test_cusp_chart_form():
    res = blow_up(form("(3*x^2) dx + (2*y) dy"))
    assert not res.dicritical
    assert [(r.chart, tuple(r.coords)) for r in res.divisor_singularities] == [(1, (0, 0))]
    child = res.child(res.divisor_singularities[0])
    expected = form("(3*x + 2*y^2) dx + (2*x*y) dy")
    assert child.proportional_to(expected) is not None


def test_blowup_requires_singular_center():
    with pytest.raises(Exception):
        blow_up(form("(1) dx + (x) dy"))


def test_case_1a_tree():
    tree = reduce_singularity(takens(5, 3))
    assert tree.n_blowups == 4
    assert all(n.classification.reduced for n in tree.leaves())
    vals = sorted(v for leaf in tree.leaves() for v in leaf.report.cs_divisor.values())
    assert mpq(-1, 10) in vals
    assert tree.bb() == 0


def test_case_1b_leaves():
    tree = reduce_singularity(takens(4, 3))
    last = max(tree.components)
    cs = [leaf.report.cs_divisor[last] for leaf in tree.leaves()
          if last in leaf.report.cs_divisor and not leaf.is_corner]
    assert cs == [mpq(-1, 4), mpq(-1, 4)]
    assert bb_via_reduction(tree) == 0


def test_reduced_input_has_no_blowups():
    tree = reduce_singularity(form("(3*y) dx + (x) dy"))
    assert tree.n_blowups == 0 and len(tree.leaves()) == 1


def test_case_2b_bb():
    tree = reduce_singularity(takens(6, 3, (4,)))
    assert tree.bb() == 12


def test_linear_one_blowup_fold():
    lam = mpq(-7, 3)
    om = form(f"({-lam}*y) dx + (x) dy")
    res = blow_up(om)
    kids = [bb_grothendieck(res.child(r)) for r in res.divisor_singularities]
    assert sorted(kids) == sorted([lam**2 / (lam - 1), -1 / (lam * (lam - 1))])
    assert sum(kids) + 1 == (lam + 1) ** 2 / lam


@pytest.mark.parametrize("n,p", [(4, 3), (6, 4), (4, 2), (6, 3)])
def test_nu_squared_sum(n, p):
    tree = reduce_singularity(takens(n, p))
    k = n // 2
    assert tree.sum_nu_squared() == 4 * k - 3


def test_self_intersection_ledger():
    tree = reduce_singularity(takens(7, 4))
    for cid, comp in tree.components.items():
        later = sum(1 for n in tree.centers()
                    if n.component != cid and cid in (n.on_x0, n.on_y0))
        assert comp.self_intersection == -1 - later


def test_sibling_order_does_not_matter():
    for om in [takens(6, 2, (1, 1)), takens(5, 3), form("(3*x^2 + y^3) dx + (2*y*x) dy")]:
        a = reduce_singularity(om)
        b = reduce_singularity(om, reverse_siblings=True)
        assert a.signature() == b.signature()


def test_fold_matches_residue_oracle():
    for om in [takens(7, 3), takens(5, 2, (2, 0, -1))]:
        assert reduce_singularity(om).bb() == bb_grothendieck(om)
        assert reduce_singularity(om).mu() == milnor_number(om)


def test_dicritical_fold_is_inapplicable():
    tree = reduce_singularity(form("(y) dx + (-x) dy"))
    with pytest.raises(InapplicableLaw):
        tree.bb()


def test_audit_cusp():
    rep = recursion_audit(form("(3*x^2) dx + (2*y) dy"))
    milnor = [c for c in rep.checks if c.law == "Milnor"][0]
    assert milnor.lhs == 2 and milnor.rhs == 2 and milnor.ok


def test_audit_linear_cs_and_gsv():
    lam = mpq(-5, 2)
    om = form(f"({-lam}*y) dx + (x) dy")
    rep = recursion_audit(om, curves=[("y", P("y"), [([0, 1], [0])])])
    cs = [c for c in rep.checks if c.law == "CS(y)"][0]
    gsv = [c for c in rep.checks if c.law == "GSV(y)"][0]
    assert cs.lhs == lam and cs.ok
    assert gsv.lhs == 1 and gsv.ok


def test_audit_dicritical_skips():
    rep = recursion_audit(form("(y) dx + (-x) dy"))
    assert rep.dicritical and all(c.ok is None for c in rep.checks)


def test_audit_corpus_all_hold():
    corpus = audit_corpus()
    assert len(corpus) >= 10
    for name, om, curves in corpus:
        rep = recursion_audit(om, curves=curves)
        assert rep.ok, (name, rep.text())


def test_tree_exports():
    tree = reduce_singularity(takens(5, 3))
    d = tree.to_dict()
    assert len(d["components"]) == 4
    assert "blow-up" in tree.to_text()
