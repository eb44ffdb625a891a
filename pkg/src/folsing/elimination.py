"""Saddle-node elimination chain, the degree-3 example families and
diagonal equivalence searches.

The generic saddle-node form is

    A dy + B dx,  A = x + A2 + x*(a30 x^2 + a21 x y + a12 y^2) - x*phi,
                  B = x^2 + y*phi,

with A2 = a20 x^2 + a11 x y + a02 y^2 and phi = p30 x^3 + ... + p03 y^3.
The curve A = 0 is a graph x = x(t), y = t; the coefficients d_j of
B(x(t), t) govern the Milnor number, which is 13 exactly when d_2..d_12
vanish and d_13 does not.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field as dc_field

from gmpy2 import mpq

from .exactalg import (
    QQ,
    AlgebraicScalar,
    MultiPoly,
    NotDivisible,
    TruncSeries,
    adjoin_root,
    fmt_scalar,
    implicit_series_solve,
    parse_poly,
)
from .exactalg.numbers import rational_nth_root
from .foliation import AffineOneForm, FoliationError, ProjectiveFoliation, pullback, singular_locus

log = logging.getLogger(__name__)

PARAMS = ("a20", "a11", "a02", "a30", "a21", "a12", "p30", "p21", "p12", "p03")
# quasi-homogeneous weights for (x, y) -> (l x, l^2 y); d_j has weight 2j - 2
WEIGHTS = {"a20": 1, "a11": 2, "a02": 3, "a30": 2, "a21": 3, "a12": 4,
           "p30": 3, "p21": 4, "p12": 5, "p03": 6, "s": 1, "u": 0, "w": 0}
RING = PARAMS + ("s", "u", "w")
SERIES_GENS = ("x", "t") + RING


class EliminationError(Exception):
    pass


class ConstraintViolation(FoliationError):
    """Family parameters outside the admissible domain."""


def _v(name, gens=RING):
    return MultiPoly.var(gens, name)


def _c(value, gens=RING):
    return MultiPoly.const(gens, value)


def weight(p: MultiPoly):
    """Set of weighted degrees of the monomials of p."""
    ws = set()
    for exps, _ in p.items():
        ws.add(sum(WEIGHTS.get(g, 0) * e for g, e in zip(p.gens, exps)))
    return ws


# ------------------------------------------------------------ generic form
@dataclass
class GenericSaddleForm:
    """Parameters stay symbolic; ``A`` and ``B`` live on (x, t, params)."""

    A: MultiPoly
    B: MultiPoly

    @classmethod
    def build(cls) -> "GenericSaddleForm":
        phi = "(p30*x^3 + p21*x^2*t + p12*x*t^2 + p03*t^3)"
        A = parse_poly(
            f"x + a20*x^2 + a11*x*t + a02*t^2 + x*(a30*x^2 + a21*x*t + a12*t^2) - x*{phi}",
            SERIES_GENS,
        )
        B = parse_poly(f"x^2 + t*{phi}", SERIES_GENS)
        return cls(A, B)

    def specialize(self, values: dict) -> "GenericSaddleForm":
        """Substitute parameters by polynomials in RING (or scalars)."""
        m = {k: (v.with_gens(SERIES_GENS) if isinstance(v, MultiPoly) else v) for k, v in values.items()}
        return GenericSaddleForm(self.A.subs(m), self.B.subs(m))

    def omega(self, values: dict) -> AffineOneForm:
        """The affine 1-form A dy + B dx for numeric parameter values."""
        m = dict(values)
        m["s"] = m.get("s", 0)
        for g in PARAMS:
            m.setdefault(g, 0)
        A = _drop_to_xy(self.A.subs(m))
        B = _drop_to_xy(self.B.subs(m))
        return AffineOneForm(B, A)


def _drop_to_xy(p: MultiPoly) -> MultiPoly:
    out = {}
    ix, it = p.gens.index("x"), p.gens.index("t")
    for exps, c in p.items():
        if any(e for k, e in enumerate(exps) if k not in (ix, it)):
            raise EliminationError("parameters left unassigned")
        out[(exps[ix], exps[it])] = c
    return MultiPoly.from_dict(("x", "y"), out, p.field)


def series_coefficients(form: GenericSaddleForm, N: int = 13):
    """(c, d): x(t) = sum c_j t^j solves A(x(t), t) = 0 and
    B(x(t), t) = sum d_j t^j, both up to t^N."""
    xs = implicit_series_solve(form.A, N, "x", "t")
    params = xs.coeffs[0].gens
    zero = MultiPoly.zero(params, xs.coeffs[0].field)
    one = zero + 1
    acc = TruncSeries([zero], N, "t")
    for kx, cx in sorted(form.B.coefficients_in("x").items()):
        col = [zero] * (N + 1)
        for kt, c in cx.coefficients_in("t").items():
            if kt <= N:
                col[kt] = c.with_gens(params)
        acc = acc + TruncSeries(col, N, "t") * (xs ** kx if kx else TruncSeries([one], N, "t"))
    c = {j: xs[j] for j in range(N + 1)}
    d = {j: acc[j] for j in range(N + 1)}
    return c, d


# ------------------------------------------------------------ rational substitution
def _factor_table():
    a02, a12 = _v("a02"), _v("a12")
    return [
        ("a02", a02, 0),
        ("a02^4+a12^3", a02**4 + a12**3, 10),
        ("a02^4-a12^3", a02**4 - a12**3, 11),
    ]


def allowed_factors(stage: int):
    """Factors known to be nonzero when d_stage is solved: a02 throughout,
    a02^4 + a12^3 from d_10 on, a02^4 - a12^3 from d_11 on."""
    return [(n, f) for n, f, j in _factor_table() if j <= stage]


def subs_rational(p: MultiPoly, var: str, num: MultiPoly, den: MultiPoly) -> MultiPoly:
    """Numerator of p(var = num/den) after clearing den^deg."""
    D = p.degree_in(var)
    if D <= 0:
        return p
    out = MultiPoly.zero(p.gens, p.field)
    for k, ck in p.coefficients_in(var).items():
        out = out + ck * num**k * den ** (D - k)
    return out


def strip_factors(p: MultiPoly, allowed):
    """Remove the allowed factors; return (monic core, {factor name: power}, content)."""
    powers = {}
    if not p:
        return p, powers, mpq(0)
    for name, f in allowed:
        while True:
            try:
                q = p.exact_div(f)
            except NotDivisible:
                break
            p = q
            powers[name] = powers.get(name, 0) + 1
    lc = p.leading_term()[1]
    return p * (1 / lc), powers, lc


# ------------------------------------------------------------ ledger
@dataclass
class Condition:
    """d_j = 0  <=>  var = num/den (den a product of allowed factors)."""

    j: int
    var: str
    num: MultiPoly
    den: MultiPoly
    display: str

    def target(self) -> MultiPoly:
        return self.den * _v(self.var) - self.num


def _p(text):
    return parse_poly(text, RING)


CONDITION_LEDGER = [
    Condition(4, "p03", _p("-a02^2"), _p("1"), "p03 = -a02^2"),
    Condition(5, "p12", _p("-2*a02*a11"), _p("1"), "p12 = -2 a02 a11"),
    Condition(6, "p21", _p("-a11^2 + 2*a12 - 2*a02*a20"), _p("1"), "p21 = -a11^2 + 2 a12 - 2 a02 a20"),
    Condition(7, "p30", _p("-2*(a02 + a11*a20 - a21)"), _p("1"), "p30 = -2 (a02 + a11 a20 - a21)"),
    Condition(8, "a30", _p("2*a02^2*a11 - a12^2 + a02^2*a20^2"), _p("2*a02^2"),
              "a30 = (2 a02^2 a11 - a12^2 + a02^2 a20^2)/(2 a02^2)"),
    Condition(9, "a20", _p("-a11*a12^2 + a02*a12*a21"), _p("a02^3"),
              "a20 = (-a11 a12^2 + a02 a12 a21)/a02^3"),
    Condition(10, "a21", _p("-a02^6 + 3*a02^4*a11*a12 + a02^2*a12^3 + a11*a12^4"), _p("a02*(a02^4 + a12^3)"),
              "a21 = (-a02^6 + 3 a02^4 a11 a12 + a02^2 a12^3 + a11 a12^4)/(a02 (a02^4 + a12^3))"),
    Condition(11, "a11", _p("-3*a02^4*a12^2 - a12^5"), _p("a02^2*(a02^4 - a12^3)"),
              "a11 = -(3 a02^4 a12^2 + a12^5)/(a02^2 (a02^4 - a12^3))"),
]

# the d_11 display as printed, without the a02^2 in the denominator
PRINTED_D11 = Condition(11, "a11", _p("-3*a02^4*a12^2 - a12^5"), _p("a02^4 - a12^3"),
                        "a11 = (-3 a02^4 a12^2 - a12^5)/(a02^4 - a12^3)")


@dataclass
class StageCheck:
    j: int
    claim: str
    ok: bool
    detail: str = ""

    def line(self) -> str:
        return f"d{self.j}: {self.claim} [{'ok' if self.ok else 'FAIL'}]" + (f"  ({self.detail})" if self.detail else "")


@dataclass
class EliminationTrace:
    N: int
    c: dict
    d: dict
    ledger: list
    reduced: dict = dc_field(default_factory=dict)
    extra: dict = dc_field(default_factory=dict)
    checks: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(ch.ok for ch in self.checks)

    def text(self) -> str:
        out = [f"c{j} = {self.c[j]}" for j in (2, 3, 4)]
        out += [ch.line() for ch in self.checks]
        return "\n".join(out)


def _stage_check(dj: MultiPoly, cond: Condition):
    """Split the stripped d_j as (unit) * target * extra.  Returns
    (divides, extra factor or None, detail)."""
    allowed = allowed_factors(cond.j)
    core, powers, lc = strip_factors(dj, allowed)
    tcore, _, _ = strip_factors(cond.target(), allowed)
    try:
        q = core.exact_div(tcore)
    except NotDivisible:
        return False, None, f"target does not divide; degree {dj.degree_in(cond.var)} in {cond.var}"
    detail = f"unit {fmt_scalar(lc)}" + "".join(f"*({n})^{k}" for n, k in powers.items())
    if q.is_constant():
        return True, None, detail
    return True, q, detail + f"; extra factor {q}"


def apply_condition(p: MultiPoly, cond: Condition) -> MultiPoly:
    out = subs_rational(p, cond.var, cond.num, cond.den)
    if out:
        out, _, _ = strip_factors(out, allowed_factors(cond.j))
    return out


def elimination_trace(N: int = 13) -> EliminationTrace:
    """Series coefficients and the staged condition chain d_4 .. d_11."""
    form = GenericSaddleForm.build()
    c, d = series_coefficients(form, N)
    trace = EliminationTrace(N, c, d, list(CONDITION_LEDGER))
    trace.checks.append(StageCheck(2, "d2 = d3 = 0 identically", not d[2] and not d[3]))
    cur = {j: d[j] for j in range(4, N + 1)}
    for cond in [c for c in CONDITION_LEDGER if c.j <= N]:
        ok, extra, detail = _stage_check(cur[cond.j], cond)
        claim = f"= 0 <=> {cond.display}"
        if extra is not None:
            claim += " or the extra factor vanishes"
            trace.extra[cond.j] = extra
        trace.checks.append(StageCheck(cond.j, claim, ok, detail))
        if cond.j == 11:
            ok2, _, _ = _stage_check(cur[11], PRINTED_D11)
            trace.checks.append(StageCheck(
                11, "the printed a11 without a02^2 in the denominator is not a root", not ok2,
                "its weight is 8, a11 has weight 2"))
        trace.reduced[f"d{cond.j}"] = cur[cond.j]
        for j in range(cond.j + 1, N + 1):
            cur[j] = apply_condition(cur[j], cond)
    for j in range(min(CONDITION_LEDGER[-1].j, N) + 1, N + 1):
        trace.reduced[f"d{j}"] = cur[j]
    return trace


# ------------------------------------------------------------ branches
@dataclass
class BranchResult:
    name: str
    kind: str  # "terminal", "dead", "extra" or "split"
    claim: str
    ok: bool
    note: str = ""
    d: dict = dc_field(default_factory=dict, repr=False)

    def line(self) -> str:
        s = f"{self.kind}: {self.name}: {self.claim} [{'ok' if self.ok else 'FAIL'}]"
        return s + (f"  ({self.note})" if self.note else "")


def _resolve(assign: dict, ledger) -> dict:
    """Apply the ledger backwards to express every parameter in the free ones."""
    vals = dict(assign)
    for cond in reversed(ledger):
        if cond.var in vals:
            continue
        num = cond.num.subs(vals)
        den = cond.den.subs(vals)
        if not den:
            raise EliminationError(f"denominator of {cond.var} vanishes on the branch")
        try:
            vals[cond.var] = num.exact_div(den)
        except NotDivisible as exc:
            raise EliminationError(f"{cond.var} is not polynomial on this branch") from exc
    return vals


def _branch_d(values, N=13):
    form = GenericSaddleForm.build().specialize(values)
    _, d = series_coefficients(form, N)
    return d


def _all_zero(d, upto):
    return all(not d[j] for j in range(2, upto + 1))


def _proportional_mod(p: MultiPoly, q: MultiPoly, unit_names=("s",)):
    """p = const * monomial(unit_names) * q ?"""
    if not p or not q:
        return False
    allowed = [(n, _v(n)) for n in unit_names]
    cp, _, _ = strip_factors(p, allowed)
    cq, _, _ = strip_factors(q, allowed)
    return cp == cq


def solve_conditions(trace: EliminationTrace | None = None):
    """Terminal, dead and extra branches, each recomputed from scratch on a
    polynomial parametrization of the branch locus."""
    trace = trace or elimination_trace()
    s, u, w = _v("s"), _v("u"), _v("w")
    a02, a12 = _v("a02"), _v("a12")
    pre10 = [c for c in trace.ledger if c.j < 10]
    upto10 = [c for c in trace.ledger if c.j <= 10]
    out = []

    # the split of d12 after the full ledger
    core, _, _ = strip_factors(trace.reduced["d12"], allowed_factors(12))
    target = a12 * (3 * a02**4 - a12**3)
    try:
        split_ok = core.exact_div(target).is_constant()
    except NotDivisible:
        split_ok = False
    out.append(BranchResult("d12 after the ledger", "split", "= unit * a12 (3 a02^4 - a12^3)", split_ok,
                            f"stripped d12 = {core}"))

    # terminal: a12 = 0
    vals = _resolve({"a12": _c(0)}, trace.ledger)
    d = _branch_d(vals)
    ok = _all_zero(d, 12) and d[13] == -4 * a02**8
    out.append(BranchResult("a12 = 0", "terminal", "d2..d12 = 0, d13 = -4 a02^8", ok, f"d13 = {d[13]}", d))

    # terminal: 3 a02^4 = a12^3, a02 = 9 s^3, a12 = 27 s^4
    vals = _resolve({"a02": 9 * s**3, "a12": 27 * s**4}, trace.ledger)
    d = _branch_d(vals)
    k = d[13].coeff(tuple(24 if g == "s" else 0 for g in d[13].gens))
    ok = _all_zero(d, 12) and k != 0 and d[13] == k * s**24
    note = (f"d13 = {fmt_scalar(k)} s^24 = {fmt_scalar(k / mpq(27) ** 6)} a12^6"
            f" = {fmt_scalar(k / mpq(9) ** 8)} a02^8 = {fmt_scalar(k / mpq(27) ** 3 / mpq(9) ** 4)} a12^3 a02^4")
    out.append(BranchResult("3 a02^4 = a12^3", "terminal", "d2..d12 = 0, d13 != 0", ok, note, d))

    # extra factor of d10: a02^2 - a02 a21 + a11 a12 = 0, via a11 = a02 u, a12 = a02 w
    E = trace.extra.get(10)
    vals = _resolve({"a11": a02 * u, "a12": a02 * w, "a21": a02 + a02 * u * w}, pre10)
    d = _branch_d(vals, 20)
    on_locus = E is not None and not E.subs(vals)
    out.append(BranchResult("extra factor of d10", "extra", "d2..d20 all vanish (mu > 13)",
                            on_locus and _all_zero(d, 20), f"factor {E}", d))

    # extra factor of d11: a02^2 = a11 a12, via a11 = u^2, a02 = u^2 w, a12 = u^2 w^2
    vals = _resolve({"a11": u**2, "a02": u**2 * w, "a12": u**2 * w**2}, upto10)
    d = _branch_d(vals, 20)
    inside = E is not None and not E.subs(vals)
    out.append(BranchResult("extra factor of d11", "extra", "lies on the d10 extra locus; d2..d20 vanish",
                            inside and _all_zero(d, 20), f"factor {trace.extra.get(11)}", d))

    # on a02^4 + a12^3 = 0 the reduced d10 becomes the printed simplified display
    sub = {"a02": s**3, "a12": -(s**4), "a11": u * s**2, "a21": w * s**3}
    d10 = trace.reduced["d10"].subs(sub)
    a02_, a12_, a11_, a21_ = (sub[k] for k in ("a02", "a12", "a11", "a21"))
    d10s = a02_ * (a02_**2 - a11_ * a12_) * a21_ + a11_**2 * a12_**2 + a12_**3
    out.append(BranchResult("a02^4 + a12^3 = 0", "split",
                            "d10 = unit * (a02 (a02^2 - a11 a12) a21 + a11^2 a12^2 + a12^3)",
                            _proportional_mod(d10, d10s), ""))

    # dead: a02^4 + a12^3 = 0 (a02 = s^3, a12 = -s^4), a02^2 = a11 a12, a21 = 2 a02
    vals = _resolve({"a02": s**3, "a12": -(s**4), "a11": -(s**2), "a21": 2 * s**3}, pre10)
    d = _branch_d(vals)
    out.append(BranchResult("a02^4 + a12^3 = 0, a02^2 = a11 a12, a21 = 2 a02", "dead", "d13 = 0",
                            _all_zero(d, 13), "", d))

    # the printed "d12 = a02 a12^2 (a21 - 2 a02)^3" on that sub-branch, a21 = w s^3 free
    vals = _resolve({"a02": s**3, "a12": -(s**4), "a11": -(s**2), "a21": w * s**3}, pre10)
    d = _branch_d(vals)
    disp = (s**3 * s**8 * (w * s**3 - 2 * s**3) ** 3).with_gens(d[11].gens)
    out.append(BranchResult("a02^4 + a12^3 = 0, a02^2 = a11 a12", "dead",
                            "a02 a12^2 (a21 - 2 a02)^3 is exactly d11 (printed with index 12)",
                            _all_zero(d, 10) and d[11] == disp, f"d12 = {d[12]}", d))

    # dead: a02^4 + a12^3 = 0, a02^2 != a11 a12 (a11 = u s^2, u != -1); a21 from the simplified d10
    a21 = (1 - u) * s**3
    rel = (s**3 * (s**6 - u * s**2 * -(s**4))) * a21 + (u**2 * s**4 * s**8 - s**12)
    vals = _resolve({"a02": s**3, "a12": -(s**4), "a11": u * s**2, "a21": a21}, pre10)
    d = _branch_d(vals)
    out.append(BranchResult("a02^4 + a12^3 = 0, a02^2 != a11 a12", "dead", "a21 solves the simplified d10; d13 = 0",
                            not rel and _all_zero(d, 13), "", d))

    # dead: a02^4 = a12^3 (a02 = s^3, a12 = s^4, a11 = u s^2), a21 from d10;
    # d11 = 0 forces u = 1 and then d12 = d13 = 0
    vals = _resolve({"a02": s**3, "a12": s**4, "a11": u * s**2}, upto10)
    d = _branch_d(vals)
    forced = _proportional_mod(d[11], ((u - 1) ** 2).with_gens(d[11].gens))
    d1 = _branch_d({k: v.subs({"u": 1}) for k, v in vals.items()})
    out.append(BranchResult("a02^4 = a12^3", "dead", "d11 = unit (a11 a12 - a02^2)^2, then d12 = d13 = 0",
                            _all_zero(d, 10) and forced and _all_zero(d1, 13), f"d11 = {d[11]}", d))
    return out


def random_evaluation_check(trace: EliminationTrace, count: int = 50, seed: int = 0):
    """Compare the symbolic d_j with d_j recomputed from numerically
    specialized forms at random rational parameter points."""
    rng = random.Random(seed)
    bad = 0
    form = GenericSaddleForm.build()
    for _ in range(count):
        pt = {g: mpq(rng.randint(-9, 9), rng.randint(1, 5)) for g in PARAMS}
        pt["s"] = mpq(0)
        _, dn = series_coefficients(form.specialize(pt), trace.N)
        for j in range(2, trace.N + 1):
            sym = trace.d[j].subs(pt)
            if sym != dn[j]:
                bad += 1
    return bad == 0, count


# ------------------------------------------------------------ families
FAMILIES = ("omega_a", "omega_ac", "example_b", "example_sn", "nilpotent_4param", "nilpotent_3param")
FAMILY_TYPE = {
    "omega_a": "SaddleNode",
    "omega_ac": "SaddleNode",
    "example_b": "SaddleNode",
    "example_sn": "SaddleNode",
    "nilpotent_4param": "Nilpotent",
    "nilpotent_3param": "Nilpotent",
}


def _form_from_terms(dy_terms, dx_terms) -> AffineOneForm:
    """Build P dx + Q dy from lists of (coeff, i, j) meaning coeff x^i y^j."""
    def build(terms):
        data = {}
        field = QQ
        for c, i, j in terms:
            if isinstance(c, AlgebraicScalar):
                field = c.field
            data[(i, j)] = data.get((i, j), 0) + c
        data = {k: v for k, v in data.items() if v}
        return MultiPoly.from_dict(("x", "y"), data, field)

    P, Qp = build(dx_terms), build(dy_terms)
    if P.field != Qp.field:
        P, Qp = P.to_field(Qp.field) if P.field is QQ else P, Qp.to_field(P.field) if Qp.field is QQ else Qp
    return AffineOneForm(P, Qp, saturate=False)


def _mul_terms(c, i, j, terms):
    return [(c * cc, i + ii, j + jj) for cc, ii, jj in terms]


def _q(v):
    if isinstance(v, AlgebraicScalar):
        return v
    return mpq(v)


def _nonzero(name, v):
    if not v:
        raise ConstraintViolation(f"{name} must be nonzero")


def family_generator(fid: str, params: dict, printed: bool = False) -> AffineOneForm:
    """The 1-form of a family instance (affine chart).

    For nilpotent_4param the x^2 y coefficient of phi is taken as
    -a2 a1 + a1^3 + a3, the weighted-homogeneous reading; ``printed=True``
    uses a1^2 instead, which breaks the scaling symmetry and, for most
    parameters, the uniqueness of the singular point.
    """
    p = {k: _q(v) for k, v in params.items()}
    if fid == "omega_a":
        a = p["a"]
        _nonzero("a", a)
        phi = [(-4 * a, 3, 0), (-(a * a), 0, 3)]
        dy = [(1, 1, 0), (a, 0, 2), (-a, 2, 1)] + _mul_terms(-1, 1, 0, phi)
        dx = [(1, 2, 0)] + _mul_terms(1, 0, 1, phi)
        return _form_from_terms(dy, dx)
    if fid == "omega_ac":
        a = p["a"]
        _nonzero("a", a)
        c = p.get("c")
        if c is None:
            c = cube_root_3a4(a)
        if c**3 != 3 * a**4:
            raise ConstraintViolation("c^3 = 3 a^4 required")
        A2 = [(5 * c / a, 2, 0), (3 * c * c / (a * a), 1, 1), (a, 0, 2)]
        A3 = [(15 * c * c / (a * a), 3, 0), (14 * a, 2, 1), (c, 1, 2)]
        phi = [(-64 * a, 3, 0), (-35 * c, 2, 1), (-18 * a**3 / c, 1, 2), (-(a * a), 0, 3)]
        dy = [(1, 1, 0)] + A2 + A3 + _mul_terms(-1, 1, 0, phi)
        dx = [(1, 2, 0)] + _mul_terms(1, 0, 1, phi)
        return _form_from_terms(dy, dx)
    if fid == "example_b":
        b = p["b"]
        if b in (1, 2):
            raise ConstraintViolation("b must avoid 1 and 2")
        al = (1 + b - b * b) / (b - 1)
        be = (b - 2) ** 2 / (1 - b)
        ga = 1 - b
        cub = [(be, 3, 0), (ga, 0, 3)]
        dy = [(1, 1, 0), (1, 0, 2), (al, 2, 1)] + _mul_terms(1, 1, 0, cub)
        dx = [(1, 2, 0), (b, 1, 2)] + _mul_terms(-1, 0, 1, cub)
        return _form_from_terms(dy, dx)
    if fid == "example_sn":
        r, s, t, w = p["r"], p["s"], p["t"], p.get("w", mpq(0))
        for n in ("r", "s", "t"):
            _nonzero(n, p[n])
        if r * t == s:
            raise ConstraintViolation("rt != s required")
        al = t * w * w * (r * t - s) / (s * s)
        be = (s**4 - r * s**3 * t - r * r * s * s * t * t + s * s * t * w**3 - 2 * r * s * t * t * w**3
              + r * r * t**3 * w**3) / (s * s * (r * t - s))
        A2 = [(al, 2, 0), (w, 1, 1), (r, 0, 2)]
        A32 = [(t * w * (4 * r * t - 3 * s) / s, 2, 0), (be, 1, 1), (r * al, 0, 2)]
        B3 = [(t * w * (3 * s - 2 * r * t) / s, 2, 1), (s, 1, 2)]
        phi = [(t * (2 * r * t - s) ** 2 / (r * t - s), 3, 0), (2 * t * (r * t - s) * w * w / s, 2, 1),
               ((r * t - s) * (s + 2 * r * t) * w / s, 1, 2), (r * (r * t - s), 0, 3)]
        dy = [(1, 1, 0)] + A2 + _mul_terms(1, 1, 0, A32) + _mul_terms(1, 1, 0, phi)
        dx = [(t, 2, 0)] + B3 + _mul_terms(-1, 0, 1, phi)
        return _form_from_terms(dy, dx)
    if fid == "nilpotent_4param":
        a1, a2, a3, a4 = p["a1"], p["a2"], p["a3"], p["a4"]
        _nonzero("a4", a4)
        mid = a1 * a1 if printed else a1**3
        phi = [(a1 * a1 - a2, 3, 0), (-a2 * a1 + mid + a3, 2, 1), (a1 * a3, 1, 2), (a4, 0, 3)]
        dy = [(1, 0, 1), (1, 2, 0), (2 * a1, 1, 1), (a1, 3, 0), (a2, 2, 1), (-a3, 1, 2)] + _mul_terms(-1, 1, 0, phi)
        dx = [(1, 1, 1), (1, 3, 0), (a1, 2, 1), (a1 * a1 - a2, 1, 2), (a3, 0, 3)] + _mul_terms(1, 0, 1, phi)
        return _form_from_terms(dy, dx)
    if fid == "nilpotent_3param":
        a1, a2, a3 = p["a1"], p["a2"], p["a3"]
        _nonzero("a2", a2)
        _nonzero("a3", a3)
        A2 = [(1, 2, 0), (2 * a1 + a2, 1, 1)]
        A3 = [(a1, 3, 0), ((4 * a1 * a1 + 3 * a1 * a2 + 3 * a3) / 3, 2, 1),
              (a1 * (2 * a1 * a1 - 9 * a2 * a2 + 18 * a3) / 54, 1, 2), (-a2 * a2 * (a1 * a1 + 18 * a3) / 36, 0, 3)]
        B3 = [(1, 3, 0), (a1 + a2, 2, 1), (-(a1 * a1 + 3 * a3) / 3, 1, 2), (-a1 * (a1 * a1 + 9 * a3) / 27, 0, 3)]
        phi = [(-(2 * a1 * a1 + a1 * a2 + 6 * a3) / 6, 3, 0),
               (-a2 * (2 * a1**4 + 36 * a1 * a1 * a3 + 81 * a3 * a3) / 324, 0, 3),
               (-(20 * a1**3 + 27 * a1 * a1 * a2 + 9 * a1 * (a2 * a2 + 8 * a3) + 81 * a2 * a3) / 54, 2, 1),
               (-(4 * a1**4 + 10 * a1**3 * a2 + 3 * a1 * a1 * (a2 * a2 + 12 * a3) + 90 * a1 * a2 * a3
                  + 54 * a2 * a2 * a3) / 108, 1, 2)]
        dy = [(1, 0, 1)] + A2 + A3 + _mul_terms(-1, 1, 0, phi)
        dx = [(1, 1, 1)] + B3 + _mul_terms(1, 0, 1, phi)
        return _form_from_terms(dy, dx)
    raise ValueError(f"unknown family {fid!r}; choose from {', '.join(FAMILIES)}")


def cube_root_3a4(a):
    """c with c^3 = 3 a^4: rational when possible, else a generator of Q(c)."""
    v = 3 * a**4
    r = rational_nth_root(v, 3) if not isinstance(v, AlgebraicScalar) else None
    if r is not None:
        return r
    K = adjoin_root([-v, 0, 0, 1], "c")
    return K.gen


def random_params(fid: str, rng: random.Random) -> dict:
    """A random admissible small-rational parameter draw."""
    def q(nonzero=False):
        while True:
            v = mpq(rng.randint(-6, 6), rng.randint(1, 3))
            if v or not nonzero:
                return v

    if fid == "omega_a":
        return {"a": q(True)}
    if fid == "omega_ac":
        k = q(True)
        return {"a": 9 * k**3, "c": 27 * k**4}
    if fid == "example_b":
        while True:
            b = q()
            if b not in (1, 2):
                return {"b": b}
    if fid == "example_sn":
        while True:
            r, s, t, w = q(True), q(True), q(True), q()
            if r * t != s:
                return {"r": r, "s": s, "t": t, "w": w}
    if fid == "nilpotent_4param":
        return {"a1": q(), "a2": q(), "a3": q(), "a4": q(True)}
    if fid == "nilpotent_3param":
        return {"a1": q(), "a2": q(True), "a3": q(True)}
    raise ValueError(fid)


@dataclass
class FamilyReport:
    fid: str
    params: dict
    degree: int
    points: int
    mu: int | None
    kind: str | None
    bb: object
    bb_method: str
    cs_weak: object = None

    @property
    def ok(self) -> bool:
        base = self.degree == 3 and self.points == 1 and self.mu == 13 and self.kind == FAMILY_TYPE[self.fid]
        return base and self.bb == 25 and (self.cs_weak is None or self.cs_weak == -1)

    def line(self) -> str:
        ps = ", ".join(f"{k}={fmt_scalar(v)}" for k, v in self.params.items())
        cs = f", CS(weak) = {fmt_scalar(self.cs_weak)}" if self.cs_weak is not None else ""
        return (f"{self.fid}({ps}): d = {self.degree}, points = {self.points}, mu = {self.mu}, "
                f"{self.kind}, BB = {fmt_scalar(self.bb)} ({self.bb_method}){cs} [{'ok' if self.ok else 'FAIL'}]")


def verify_family_instance(fid: str, params: dict) -> FamilyReport:
    from .blowup import reduce_singularity
    from .localsing import bb_grothendieck, cs_index, separatrix_series

    om = family_generator(fid, params)
    fol = ProjectiveFoliation(om)
    recs = singular_locus(fol)
    total = sum(r.orbit for r in recs)
    if total != 1:
        return FamilyReport(fid, params, fol.degree, total, None, None, None, "skipped")
    rec = recs[0]
    kind = rec.classification.kind
    local = fol.chart(rec.chart).translate(rec.coords) if any(rec.coords) else fol.chart(rec.chart)
    local = local if local.gens == ("x", "y") else local.rename(("x", "y"))
    cs_weak = None
    if kind == "SaddleNode":
        S = separatrix_series(local, None, "weak", N=2 * rec.mu + 4)
        cs_weak = cs_index(local, S)
        bb = 2 * rec.mu + cs_weak
        method = "2 mu + lambda"
    else:
        tree = reduce_singularity(local)
        bb = tree.bb()
        g = bb_grothendieck(local)
        if g != bb:
            raise EliminationError(f"reduction fold {bb} disagrees with the residue {g}")
        method = "reduction fold, residue agrees"
    return FamilyReport(fid, params, fol.degree, total, rec.mu, kind, bb, method, cs_weak)


def default_family_instances():
    """The fixed certification corpus: the spec'd rational instances plus seeded draws."""
    rng = random.Random(2024)
    inst = [("omega_a", {"a": mpq(1)}), ("omega_ac", {"a": mpq(9), "c": mpq(27)})]
    inst += [("example_b", {"b": mpq(b)}) for b in (0, 3, -1, mpq(1, 2))]
    inst += [("example_sn", random_params("example_sn", rng)) for _ in range(3)]
    inst += [("nilpotent_4param", random_params("nilpotent_4param", rng)) for _ in range(3)]
    inst += [("nilpotent_3param", random_params("nilpotent_3param", rng)) for _ in range(3)]
    return inst


# ------------------------------------------------------------ equivalence
MAP_FAMILIES = {
    # name: (exponents of a, exponents of b, constraints [(exponent vector, value)])
    "identity": ((), (), []),
    "scaling": ((1,), (2,), []),
    "diagonal": ((1, 0), (0, 1), []),
    "alpha_beta": ((3, 2), (2, 1), [((4, 3), mpq(1))]),
}


@dataclass
class EquivalenceResult:
    family: str
    verdict: str  # "witness" or "none in family"
    system: list
    witness: dict | None = None
    verified: bool | None = None
    triangular: list = dc_field(default_factory=list)

    @property
    def equivalent(self) -> bool:
        return self.verdict == "witness"

    def text(self) -> str:
        s = f"{self.family}: {self.verdict}"
        if self.witness:
            s += " " + ", ".join(f"{k} = {fmt_scalar(v)}" for k, v in self.witness.items())
        if self.verified is not None:
            s += " (pullback checked)" if self.verified else " (pullback FAILED)"
        if self.witness is None and self.triangular:
            s += " over C; triangular system:"
            for eq in self.triangular:
                s += "\n  " + eq
        return s


def _terms(om: AffineOneForm):
    out = {}
    for (i, j), c in om.P.items():
        out[("dx", i, j)] = c
    for (i, j), c in om.Q.items():
        out[("dy", i, j)] = c
    return out


def _hnf(rows, rhs):
    """Integer row reduction of the binomial system z^row = rhs; returns
    (pivot rows, consistent)."""
    rows = [list(r) for r in rows]
    rhs = list(rhs)
    ncols = len(rows[0]) if rows else 0
    piv = []
    top = 0
    for col in range(ncols):
        while True:
            nz = [i for i in range(top, len(rows)) if rows[i][col]]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(rows[i][col]))
            rows[top], rows[i0] = rows[i0], rows[top]
            rhs[top], rhs[i0] = rhs[i0], rhs[top]
            done = True
            for i in range(top + 1, len(rows)):
                if rows[i][col]:
                    q = rows[i][col] // rows[top][col]
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[top])]
                    rhs[i] = rhs[i] / rhs[top] ** q if q >= 0 else rhs[i] * rhs[top] ** (-q)
                    if rows[i][col]:
                        done = False
            if done:
                piv.append((col, rows[top], rhs[top]))
                top += 1
                break
    consistent = all(rhs[i] == 1 for i in range(top, len(rows)))
    return piv, consistent


def equivalence_check(om1: AffineOneForm, om2: AffineOneForm, family: str = "diagonal") -> EquivalenceResult:
    """Search h in the map family with h^* om2 = k om1 (k a nonzero constant)."""
    if family not in MAP_FAMILIES:
        raise ValueError(f"unsupported map family {family!r}")
    ea, eb, constraints = MAP_FAMILIES[family]
    n = len(ea)
    t1, t2 = _terms(om1), _terms(om2)
    if set(t1) != set(t2):
        return EquivalenceResult(family, "none in family", ["supports differ"])
    rows, rhs, sysl = [], [], []
    for key in sorted(t1):
        kind, i, j = key
        pa, pb = (i + 1, j) if kind == "dx" else (i, j + 1)
        rows.append([pa * ea[z] + pb * eb[z] for z in range(n)] + [-1])
        rhs.append(t1[key] / t2[key])
        sysl.append(f"a^{pa} b^{pb} / k = {fmt_scalar(rhs[-1])}")
    for vec, val in constraints:
        rows.append(list(vec) + [0])
        rhs.append(val)
    piv, consistent = _hnf(rows, rhs)
    if not consistent:
        return EquivalenceResult(family, "none in family", sysl)
    names = [f"z{z + 1}" for z in range(n)] + ["k"]
    if family == "scaling":
        names[0] = "lambda"
    elif family == "diagonal":
        names[:2] = ["a", "b"]
    elif family == "alpha_beta":
        names[:2] = ["alpha", "beta"]
    tri = []
    for col, row, r in piv:
        mono = " ".join(
            f"{names[c]}^{e}" if e != 1 else names[c] for c, e in enumerate(row) if e
        )
        tri.append(f"{mono} = {fmt_scalar(r)}")
    vals = [mpq(1)] * (n + 1)
    rational = True
    for col, row, r in reversed(piv):
        rest = mpq(1)
        for c2 in range(col + 1, n + 1):
            if row[c2]:
                rest = rest * vals[c2] ** row[c2]
        target = r / rest
        g = row[col]
        root = rational_nth_root(target, abs(g)) if not isinstance(target, AlgebraicScalar) else None
        if root is None:
            rational = False
            vals[col] = None
            break
        vals[col] = root if g > 0 else 1 / root
    if not rational:
        return EquivalenceResult(family, "witness", sysl, None, None, tri)
    witness = dict(zip(names, vals))
    a = mpq(1)
    b = mpq(1)
    for z in range(n):
        a = a * vals[z] ** ea[z]
        b = b * vals[z] ** eb[z]
    pulled = pullback(om2, (MultiPoly.var(("x", "y"), "x") * a, MultiPoly.var(("x", "y"), "y") * b))
    k = vals[n]
    verified = pulled.P == om1.P * k and pulled.Q == om1.Q * k
    return EquivalenceResult(family, "witness", sysl, witness, verified)
