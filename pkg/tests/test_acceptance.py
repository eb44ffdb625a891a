"""Acceptance criteria 1-8.

Each criterion is a function returning (ok, detail).  Under pytest every
criterion prints one line ``criterion N: PASS|FAIL  detail``; running this
file directly prints the same lines.
"""

import random
import sys
import time
from functools import lru_cache

import pytest
from gmpy2 import mpq

from folsing.blowup import recursion_audit
from folsing.corpus import audit_corpus, log_foliation_corpus
from folsing.elimination import (
    FAMILY_TYPE,
    RING,
    default_family_instances,
    elimination_trace,
    equivalence_check,
    family_generator,
    random_evaluation_check,
    solve_conditions,
    verify_family_instance,
)
from folsing.exactalg import parse_poly
from folsing.foliation import ProjectiveFoliation, parse_one_form, singular_locus
from folsing.globalcheck import (
    SearchRefused,
    check_curve_sums,
    check_global_sums,
    invariant_curve_search,
    is_invariant,
)
from folsing.nilcat import grid_specs, run_grid


@lru_cache(maxsize=None)
def family_reports():
    out = []
    for fid, params in default_family_instances():
        t0 = time.perf_counter()
        rep = verify_family_instance(fid, params)
        out.append((fid, params, rep, time.perf_counter() - t0))
    return out


def criterion_1():
    reps = family_reports()
    fids = {fid for fid, *_ in reps}
    bad = [r.line() for _, _, r, _ in reps
           if not (r.degree == 3 and r.points == 1 and r.mu == 13 and r.kind == FAMILY_TYPE[r.fid])]
    slow = [r.fid for _, _, r, dt in reps if dt > 60]
    ok = not bad and not slow and len(fids) == 6
    return ok, f"{len(reps)} instances over {len(fids)} families; one point, mu = 13, d = 3, type as advertised" + (
        f"; failures: {bad}" if bad else "") + (f"; over 1 min: {slow}" if slow else "")


def criterion_2():
    reps = family_reports()
    bad = [r.line() for _, _, r, _ in reps if r.bb != 25 or (r.cs_weak is not None and r.cs_weak != -1)]
    methods = sorted({r.bb_method for _, _, r, _ in reps})
    return not bad, f"BB = 25 at every instance via {', '.join(methods)}; weak CS = -1 on saddle-nodes" + (
        f"; failures: {bad}" if bad else "")


def criterion_3():
    t0 = time.perf_counter()
    reps = run_grid(grid_specs())
    dt = time.perf_counter() - t0
    bad = [str(r.spec) for r in reps if not r.ok]
    cases = sorted({r.case for r in reps})
    return not bad and dt < 300, f"{len(reps) - len(bad)}/{len(reps)} grid cells match, cases {cases}, {dt:.1f} s" + (
        f"; mismatches: {bad}" if bad else "")


def criterion_4():
    corpus = audit_corpus()
    laws = {"Milnor": 0, "Baum-Bott": 0, "CS": 0, "GSV": 0}
    bad = []
    for name, om, curves in corpus:
        rep = recursion_audit(om, curves=curves)
        if not rep.ok:
            bad.append(name)
        for c in rep.checks:
            if c.ok:
                laws[c.law.split("(")[0]] += 1
    ok = not bad and len(corpus) >= 10 and all(laws.values())
    counts = ", ".join(f"{k} {v}" for k, v in laws.items())
    return ok, f"{len(corpus)} germs; exact checks per law: {counts}" + (f"; failures: {bad}" if bad else "")


def criterion_5():
    bad = []
    for fid, params in default_family_instances():
        cert = invariant_curve_search(ProjectiveFoliation(family_generator(fid, params)), 5)
        stable = all(r.dimensions[-1][1] == 0 for r in cert.per_degree)
        if cert.verdict != "none" or not stable:
            bad.append(fid)
    saddle = ProjectiveFoliation(parse_one_form("(2*y) dx + (-3*x) dy"))
    try:
        invariant_curve_search(saddle, 1)
        refused = False
    except SearchRefused:
        refused = True
    exact = ProjectiveFoliation(parse_one_form("(3*x^2) dx + (2*y) dy"))
    controls = refused and is_invariant(saddle, parse_poly("y")) and is_invariant(
        exact, parse_poly("y^2 + x^3"))
    ok = not bad and controls
    return ok, ("no invariant curve of degree <= 5 at all 15 instances, zero-dimensional stabilized spaces; "
                "controls: search refused on the linear saddle, y and y^2 + x^3 confirmed invariant") + (
        f"; failures: {bad}" if bad else "")


def criterion_6():
    trace = elimination_trace(13)
    stage_ok = all(ch.ok for ch in trace.checks)
    branches = solve_conditions(trace)
    br_ok = all(b.ok for b in branches)
    rand_ok, n = random_evaluation_check(trace, count=50, seed=0)
    term = {b.name: b for b in branches if b.kind == "terminal"}
    a02 = parse_poly("a02", RING)
    a12_sub = parse_poly("27*s^4", RING)
    t1 = term["a12 = 0"].d[13] == a02**8 * -4
    t2 = term["3 a02^4 = a12^3"].d[13] == a12_sub**6 * mpq(-64, 9)
    printed_holds = term["3 a02^4 = a12^3"].d[13] == a12_sub**3 * mpq(-64, 9)
    dead = [b for b in branches if b.kind == "dead"]
    ok = stage_ok and br_ok and rand_ok and t1 and t2 and len(dead) >= 2
    return ok, (f"d4..d11 equivalences, a02^4 +- a12^3 contexts, {len(dead)} dead branches (d13 = 0), "
                f"terminal d13 = -4 a02^8 and -64 a12^6/9 (the printed -64 a12^3/9 "
                f"{'holds' if printed_holds else 'fails: weight 12 against 24'}); "
                f"{n} random specializations agree")


def criterion_7():
    checks = {}
    checks["b=0 is omega_a(1)"] = family_generator("example_b", {"b": mpq(0)}) == family_generator(
        "omega_a", {"a": mpq(1)})
    rng = random.Random(7)
    bs = [mpq(3), mpq(-1), mpq(1, 2)] + [mpq(rng.randint(-9, 9), rng.randint(1, 4)) for _ in range(3)]
    bs = [b for b in bs if b not in (0, 1, 2)]
    checks["example_sn recovers example_b"] = all(
        family_generator("example_sn", {"r": mpq(1), "s": b, "t": mpq(1), "w": mpq(0)})
        == family_generator("example_b", {"b": b}) for b in bs)
    a = {"a1": mpq(1), "a2": mpq(-2), "a3": mpq(3), "a4": mpq(1, 2)}
    lam = mpq(-3)
    b = {"a1": lam * a["a1"], "a2": lam**2 * a["a2"], "a3": lam**3 * a["a3"], "a4": lam**5 * a["a4"]}
    res = equivalence_check(family_generator("nilpotent_4param", a), family_generator("nilpotent_4param", b))
    checks["nilpotent scaling witness"] = res.equivalent and bool(res.verified)
    om1 = family_generator("omega_a", {"a": mpq(1)})
    res = equivalence_check(om1, family_generator("omega_a", {"a": mpq(27)}), "scaling")
    checks["omega_a scaling witness"] = res.equivalent and bool(res.verified)
    ac1 = family_generator("omega_ac", {"a": mpq(9), "c": mpq(27)})
    ac2 = family_generator("omega_ac", {"a": mpq(72), "c": mpq(432)})
    checks["omega_ac alpha-beta witness"] = equivalence_check(ac1, ac2, "alpha_beta").equivalent
    pairs = [(mpq(3), mpq(-1)), (mpq(1, 2), mpq(3)), (mpq(0), mpq(-1))]
    checks["b1 != b2 rejected"] = all(
        not equivalence_check(family_generator("example_b", {"b": x}), family_generator("example_b", {"b": y}),
                              "diagonal").equivalent for x, y in pairs)
    checks["b1 = b2 accepted"] = all(
        equivalence_check(family_generator("example_b", {"b": x}), family_generator("example_b", {"b": x}),
                          "diagonal").equivalent for x, _ in pairs)
    bad = [k for k, v in checks.items() if not v]
    return not bad, "; ".join(checks) + (f"; failures: {bad}" if bad else "")


def criterion_8():
    corpus = log_foliation_corpus(20)
    degs = [L.degree for L in corpus]
    bad, lines = [], 0
    for i, L in enumerate(corpus):
        fol = ProjectiveFoliation(L.form)
        recs = singular_locus(fol)
        if not all(r.field.degree == 1 and r.classification.kind == "NonDegenerate" for r in recs):
            bad.append(f"#{i} locus")
        if not check_global_sums(fol).ok:
            bad.append(f"#{i} global")
        for F in L.lines:
            lines += 1
            if not check_curve_sums(fol, F).ok:
                bad.append(f"#{i} line {F}")
    ok = not bad and len(corpus) == 20 and set(degs) == {1, 2}
    return ok, (f"20 logarithmic foliations ({degs.count(1)} of degree 1, {degs.count(2)} of degree 2): "
                f"sum formulas for mu and BB hold; GSV, CS and mu(F,B) sums hold on {lines} invariant lines") + (
        f"; failures: {bad}" if bad else "")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


def _line(k, ok, detail):
    return f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.parametrize("k", range(1, 9))
def test_criterion(k, capsys):
    ok, detail = CRITERIA[k - 1]()
    with capsys.disabled():
        sys.stdout.write("\n" + _line(k, ok, detail) + "\n")
    assert ok, detail


if __name__ == "__main__":
    status = 0
    for k, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        print(_line(k, ok, detail), flush=True)
        status |= not ok
    sys.exit(status)
