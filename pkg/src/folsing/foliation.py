"""Polynomial 1-forms on the charts of the projective plane.

A foliation of P^2 is stored through its principal affine chart (x, y); the
two other standard charts are

    chart 1:  x = 1/v, y = u/v      (covers the line at infinity except [0:1:0])
    chart 2:  x = u/v, y = 1/v      (its origin is the point [0:1:0])

Singular points are collected from chart 0, from chart 1 on {v = 0} and from
the chart-2 origin, a disjoint cover of P^2, so no point is listed twice.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .exactalg import (
    QQ,
    MultiPoly,
    Q,
    UnsupportedField,
    adjoin_root,
    fmt_scalar,
    parse_form_parts,
    poly_gcd,
    resultant,
)
from .exactalg.parse import ParseError
from .exactalg import univariate as uni
from .exactalg import AlgebraicScalar

CHART_NAMES = {0: "affine (x, y)", 1: "x = 1/v, y = u/v", 2: "x = u/v, y = 1/v"}
CHART_GENS = {0: ("x", "y"), 1: ("u", "v"), 2: ("u", "v")}


class FoliationError(Exception):
    pass


class ZeroForm(FoliationError):
    pass


class AffineOneForm:
    """omega = P dx + Q dy, saturated (gcd(P, Q) = 1).

    Any common factor found at construction is divided out and kept in
    ``removed`` (the removed curve, normalized to leading coefficient 1).
    """

    __slots__ = ("P", "Q", "removed")

    def __init__(self, P: MultiPoly, Q: MultiPoly, saturate: bool = True, removed=None):
        if P.gens != Q.gens:
            Q = Q.with_gens(P.gens)
        if not P and not Q:
            raise ZeroForm("the zero 1-form does not define a foliation")
        self.removed = removed
        if saturate:
            g = poly_gcd(P, Q)
            if not g.is_constant():
                P = P.exact_div(g)
                Q = Q.exact_div(g)
                self.removed = g if removed is None else removed * g
        self.P = P
        self.Q = Q

    @property
    def gens(self):
        return self.P.gens

    @property
    def field(self):
        from .exactalg import common_field

        return common_field(self.P.field, self.Q.field)

    def __eq__(self, other):
        return isinstance(other, AffineOneForm) and self.P == other.P and self.Q == other.Q

    def __hash__(self):
        return hash((self.P, self.Q))

    def __repr__(self):
        return f"AffineOneForm({self.text()})"

    def text(self) -> str:
        a, b = self.gens
        return f"({self.P}) d{a} + ({self.Q}) d{b}"

    def dual(self):
        """Components of the dual vector field v = Q d/dx - P d/dy."""
        return self.Q, -self.P

    def wedge(self, F: MultiPoly) -> MultiPoly:
        """Coefficient of dF ^ omega on dx ^ dy."""
        a, b = self.gens
        return F.diff(a) * self.Q - F.diff(b) * self.P

    def scaled(self, c) -> "AffineOneForm":
        return AffineOneForm(self.P * c, self.Q * c, saturate=False, removed=self.removed)

    def normalized(self) -> "AffineOneForm":
        """Scale so the grlex-leading coefficient of P (or Q if P = 0) is 1."""
        lead = self.P if self.P else self.Q
        _, c = lead.leading_term()
        return self.scaled(1 / c)

    def proportional_to(self, other: "AffineOneForm"):
        """The scalar c with other = c * self, or None."""
        a = self.normalized()
        b = other.normalized()
        if a.P != b.P or a.Q != b.Q:
            return None
        lead_self = self.P if self.P else self.Q
        lead_other = other.P if other.P else other.Q
        m, c1 = lead_self.leading_term()
        return lead_other.terms.get(m) / c1

    def translate(self, point) -> "AffineOneForm":
        """The form in coordinates centred at ``point`` (a pair of scalars)."""
        a, b = self.gens
        shifts = {a: point[0], b: point[1]}
        return AffineOneForm(self.P.translate(shifts), self.Q.translate(shifts), saturate=False)

    def rename(self, gens) -> "AffineOneForm":
        mapping = dict(zip(self.gens, gens))
        return AffineOneForm(self.P.rename(mapping), self.Q.rename(mapping), saturate=False)

    def swap(self) -> "AffineOneForm":
        """Exchange the roles of the two coordinates."""
        a, b = self.gens
        m = {a: b, b: a}
        P = self.P.rename(m).with_gens(self.gens)
        Qn = self.Q.rename(m).with_gens(self.gens)
        return AffineOneForm(Qn, P, saturate=False)

    def truncate(self, order: int) -> "AffineOneForm":
        return AffineOneForm(self.P.truncate(order), self.Q.truncate(order), saturate=False)

    def is_singular_at(self, point) -> bool:
        a, b = self.gens
        vals = {a: point[0], b: point[1]}
        return not self.P.evaluate(vals) and not self.Q.evaluate(vals)


def make_form(P, Q, gens=("x", "y")) -> AffineOneForm:
    return AffineOneForm(_as_poly(P, gens), _as_poly(Q, gens))


def _as_poly(p, gens):
    if isinstance(p, MultiPoly):
        return p.with_gens(gens) if p.gens != tuple(gens) else p
    if isinstance(p, str):
        from .exactalg import parse_poly

        return parse_poly(p, gens)
    return MultiPoly.const(gens, p)


def parse_one_form(text: str, params=None, gens=("x", "y")) -> AffineOneForm:
    """Parse ``(P) dx + (Q) dy``; the result is saturated."""
    P, Qp = parse_form_parts(text, gens, params)
    if not P and not Qp:
        raise ParseError("the form is identically zero", text, 0)
    return AffineOneForm(P, Qp)


def foliation_degree(omega: AffineOneForm) -> int:
    """Degree of the foliation of P^2 extending the affine form."""
    D = max(omega.P.degree(), omega.Q.degree())
    a, b = omega.gens
    PD = omega.P.homogeneous_part(D)
    QD = omega.Q.homogeneous_part(D)
    x = MultiPoly.var(omega.gens, a)
    y = MultiPoly.var(omega.gens, b)
    if not (x * PD + y * QD):
        return D - 1
    return D


def _chart_form(omega: AffineOneForm, chart: int) -> AffineOneForm:
    if chart == 0:
        return omega
    P, Qp = omega.P, omega.Q
    D = max(P.degree(), Qp.degree())
    gens = ("u", "v")
    u = MultiPoly.var(gens, "u")
    v = MultiPoly.var(gens, "v")

    def hat(F, xs, ys):
        # v^D * F(xs/v, ys/v), computed term by term
        out = MultiPoly.zero(gens, F.field)
        for (i, j), c in F.items():
            out = out + c * xs**i * ys**j * v ** (D - i - j)
        return out

    if chart == 1:
        Ph = hat(P, MultiPoly.const(gens, 1), u)
        Qh = hat(Qp, MultiPoly.const(gens, 1), u)
        return AffineOneForm(v * Qh, -(Ph + u * Qh))
    if chart == 2:
        Ph = hat(P, u, MultiPoly.const(gens, 1))
        Qh = hat(Qp, u, MultiPoly.const(gens, 1))
        return AffineOneForm(v * Ph, -(u * Ph + Qh))
    raise ValueError(f"unknown chart {chart}")


def to_chart0(chart: int, point):
    """Map chart coordinates of a finite point to affine (x, y); None at infinity."""
    a, b = point
    if chart == 0:
        return (a, b)
    if not b:
        return None
    if chart == 1:
        return (1 / b, a / b)
    return (a / b, 1 / b)


def from_chart0(chart: int, point):
    x, y = point
    if chart == 0:
        return (x, y)
    if chart == 1:
        return None if not x else (y / x, 1 / x)
    return None if not y else (x / y, 1 / y)


@dataclass
class ProjectiveFoliation:
    """A foliation of P^2 given by its principal chart form."""

    omega: AffineOneForm
    name: str = ""
    degree: int = dc_field(init=False)
    chart_forms: dict = dc_field(init=False, repr=False)

    def __post_init__(self):
        if self.omega.gens != ("x", "y"):
            self.omega = self.omega.rename(("x", "y"))
        self.degree = foliation_degree(self.omega)
        self.chart_forms = {c: _chart_form(self.omega, c) for c in (0, 1, 2)}

    transitions = {
        (0, 1): "u = y/x, v = 1/x",
        (0, 2): "u = x/y, v = 1/y",
        (1, 2): "u2 = 1/u1, v2 = v1/u1",
    }

    def chart(self, c: int) -> AffineOneForm:
        return self.chart_forms[c]


def chart_transform(fol: ProjectiveFoliation, chart: int) -> AffineOneForm:
    if chart not in (0, 1, 2):
        raise ValueError(f"unknown chart {chart}")
    return fol.chart_forms[chart]


@dataclass
class SingularPointRecord:
    chart: int
    coords: tuple
    field: object = QQ
    orbit: int = 1
    nu: int | None = None
    mu: int | None = None
    classification: object = None
    note: str = ""

    def affine(self):
        return to_chart0(self.chart, self.coords)

    def label(self) -> str:
        a, b = self.coords
        g = CHART_GENS[self.chart]
        s = f"chart {self.chart}: {g[0]} = {fmt_scalar(a)}, {g[1]} = {fmt_scalar(b)}"
        if self.orbit > 1:
            s += f"  (+{self.orbit - 1} conjugate(s))"
        return s


def _roots_of_factor(f, name="theta"):
    """All roots of a monic irreducible rational factor that lie in one field.

    Linear: the rational root.  Quadratic: both roots in Q(theta).  Degree 3
    or 4: one representative theta (orbit size = degree).  Returns
    ``(field, [roots], orbit)``.
    """
    d = len(f) - 1
    if d == 1:
        return QQ, [-f[0] / f[1]], 1
    if d > 4:
        raise UnsupportedField(
            f"coordinate field of degree {d} unsupported (irreducible factor "
            f"{MultiPoly.from_univariate_list(('t',), 't', list(f))})"
        )
    K = adjoin_root(f, name)
    th = K.gen
    if d == 2:
        other = -th - f[1]
        return K, [th, other], 1
    return K, [th], d


def _common_roots_univariate(f_list, g_list):
    """Common roots (as (field, root, orbit) triples) of two rational univariate polys."""
    if not f_list and not g_list:
        raise FoliationError("both polynomials vanish identically")
    if not f_list:
        h = uni.monic(g_list)
    elif not g_list:
        h = uni.monic(f_list)
    else:
        h = uni.gcd_(f_list, g_list)
    if len(h) <= 1:
        return []
    if any(isinstance(v, AlgebraicScalar) and not v.is_rational() for v in h):
        return field_roots(h)
    h = [Q(v) for v in h]
    _, facs = uni.factor_over_q(h)
    out = []
    for fac, _m in facs:
        K, roots, orbit = _roots_of_factor(fac)
        for r in roots:
            out.append((K, r, orbit))
    return out


def affine_zeros(P: MultiPoly, Qp: MultiPoly):
    """Common zeros of two coprime bivariate rational polynomials.

    A shear y -> y + c x is applied (c = 0, 1, -1, 2, ...) until every
    irreducible factor of the resultant pins down its points linearly, so
    each point's coordinates live in the field generated by one root.
    Returns a list of (field, (a, b), orbit).
    """
    a, b = P.gens
    for c in (0, 1, -1, 2, -2, 3, 5, 7):
        ok, pts = _try_shear(P, Qp, c)
        if ok:
            return pts
    raise FoliationError("no admissible shear found for root extraction")


def _try_shear(P, Qp, c):
    a, b = P.gens
    X = MultiPoly.var(P.gens, a)
    Y = MultiPoly.var(P.gens, b)
    if c:
        # new coords (X, Y') with Y' = y + c x, i.e. y = Y' - c X
        sub = {b: Y - X * c}
        Ps, Qs = P.subs(sub), Qp.subs(sub)
    else:
        Ps, Qs = P, Qp
    r = resultant(Ps, Qs, a)
    if not r:
        raise FoliationError("the two polynomials share a common factor")
    rl = r.to_univariate_list(b)
    if len(rl) <= 1:
        return True, []
    if P.field is QQ:
        _, facs = uni.factor_over_q([Q(v) for v in rl])
        groups = []
        for fac, _m in facs:
            K, roots, orbit = _roots_of_factor(fac)
            groups.append((K, roots, orbit))
    else:
        KP = P.field
        groups = []
        for K, root, orbit in field_roots(rl):
            if K is QQ:
                K, root = KP, KP.convert(root)
            elif K is not KP:
                raise UnsupportedField("roots outside the coefficient field")
            groups.append((K, [root], orbit))
    pts = []
    for K, roots, orbit in groups:
        # substitute Y' = root into both, gcd over K in X
        for yr in roots:
            fP = Ps.to_field(K).subs({b: yr}).to_univariate_list(a)
            fQ = Qs.to_field(K).subs({b: yr}).to_univariate_list(a)
            fP = uni.strip([K.convert(v) if K is not QQ else v for v in fP])
            fQ = uni.strip([K.convert(v) if K is not QQ else v for v in fQ])
            if not fP and not fQ:
                return False, None
            h = uni.gcd_(fP, fQ) if fP and fQ else uni.monic(fP or fQ)
            if len(h) <= 1:
                continue  # spurious factor from vanishing leading coefficients
            if len(h) > 2:
                return False, None
            xr = -h[0] / h[1]
            yorig = yr - xr * c
            pts.append((K, (xr, yorig), orbit))
    return True, pts


def singular_locus(fol, invariants: bool = True):
    """All singular points of a projective foliation (or of an affine germ).

    For an ``AffineOneForm`` only the affine chart is searched.  With
    ``invariants`` each record carries nu, mu and the classification.
    """
    records = []
    if isinstance(fol, AffineOneForm):
        charts = {0: fol}
        projective = False
    else:
        charts = fol.chart_forms
        projective = True
    om0 = charts[0]
    for K, pt, orbit in affine_zeros(om0.P, om0.Q):
        records.append(SingularPointRecord(0, pt, K, orbit))
    if projective:
        om1 = charts[1]
        P1 = om1.P.subs({"v": 0}).to_univariate_list("u")
        Q1 = om1.Q.subs({"v": 0}).to_univariate_list("u")
        if not P1 and not Q1:
            raise FoliationError("line at infinity is contained in the singular set")
        for K, r, orbit in _common_roots_univariate(P1, Q1):
            records.append(SingularPointRecord(1, (r, K.zero), K, orbit))
        om2 = charts[2]
        if om2.is_singular_at((0, 0)):
            records.append(SingularPointRecord(2, (Q(0), Q(0)), QQ, 1))
    if invariants:
        from .localsing import algebraic_multiplicity, classify, milnor_number

        for rec in records:
            om = charts[rec.chart]
            rec.nu = algebraic_multiplicity(om, rec.coords)
            rec.mu = milnor_number(om, rec.coords)
            rec.classification = classify(om, rec.coords, mu=rec.mu)
    records.sort(key=_record_key)
    return records


def _record_key(rec):
    def sk(v):
        if hasattr(v, "coeffs"):
            return tuple((int(c.numerator), int(c.denominator)) for c in v.coeffs)
        q = Q(v)
        return ((int(q.numerator), int(q.denominator)),)

    return (rec.chart, sk(rec.coords[0]), sk(rec.coords[1]))


def pullback(omega: AffineOneForm, mapping) -> AffineOneForm:
    """h^* omega for h = (f, g) given as a pair of polynomials in omega's gens."""
    a, b = omega.gens
    f, g = (_as_poly(m, omega.gens) for m in mapping)
    sub = {a: f, b: g}
    Ph = omega.P.subs(sub)
    Qh = omega.Q.subs(sub)
    newP = Ph * f.diff(a) + Qh * g.diff(a)
    newQ = Ph * f.diff(b) + Qh * g.diff(b)
    if not newP and not newQ:
        raise ZeroForm("the map collapses the form")
    return AffineOneForm(newP, newQ)


# --------------------------------------------------------------- .fol files
def read_fol(path_or_text: str, is_text: bool = False):
    """Parse a .fol file: ``name:``, ``params:`` and ``form:`` header lines.

    The form may continue on following indented lines.  Returns
    ``(name, params, AffineOneForm)``.
    """
    if is_text:
        text = path_or_text
    else:
        with open(path_or_text, encoding="utf-8") as fh:
            text = fh.read()
    name = ""
    params = {}
    form_lines = []
    current = None
    for raw in text.splitlines():
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line[0].isspace() and current == "form":
            form_lines.append(line.strip())
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise ParseError(f"expected 'key: value' header, got {line!r}", text, text.find(line))
        key = key.strip()
        rest = rest.strip()
        current = key
        if key == "name":
            name = rest
        elif key == "params":
            for item in filter(None, (s.strip() for s in rest.split(","))):
                k, eq, v = item.partition("=")
                if not eq:
                    raise ParseError(f"bad parameter assignment {item!r}", text, text.find(item))
                params[k.strip()] = Q(v.strip())
        elif key == "form":
            form_lines.append(rest)
        else:
            raise ParseError(f"unknown header {key!r}", text, text.find(line))
    if not form_lines:
        raise ParseError("missing form: header", text, len(text))
    omega = parse_one_form(" ".join(form_lines), params)
    return name, params, omega


def write_fol(name: str, omega: AffineOneForm, params=None) -> str:
    lines = [f"name: {name}"]
    if params:
        lines.append("params: " + ", ".join(f"{k} = {fmt_scalar(v)}" for k, v in params.items()))
    lines.append(f"form: ({omega.P}) dx")
    lines.append(f"  + ({omega.Q}) dy")
    return "\n".join(lines) + "\n"


def field_roots(coeffs):
    """Roots of a univariate polynomial with coefficients in Q or one Q(theta).

    Returns (field, root, orbit) triples, one per distinct root (per Galois
    orbit for irrational rational-coefficient roots of degree 3 or 4).  Over
    an extension K only roots lying in K are supported; others raise
    UnsupportedField.
    """
    from .exactalg import AlgebraicScalar

    coeffs = uni.strip(list(coeffs))
    if len(coeffs) <= 1:
        return []
    K = None
    for c in coeffs:
        if isinstance(c, AlgebraicScalar) and not c.is_rational():
            K = c.field
            break
    if K is None:
        rat = [Q(c) for c in coeffs]
        _, facs = uni.factor_over_q(rat)
        out = []
        for fac, _m in facs:
            F, roots, orbit = _roots_of_factor(fac)
            out.extend((F, r, orbit) for r in roots)
        return out
    # norm down to Q: Res_theta(T(v, theta), m(theta))
    gens = ("v", "theta")
    T = MultiPoly.zero(gens)
    for i, c in enumerate(coeffs):
        cc = K.convert(c).coeffs
        for j, q in enumerate(cc):
            if q:
                T = T + MultiPoly.from_dict(gens, {(i, j): q})
    m = MultiPoly.from_dict(gens, {(0, j): q for j, q in enumerate(K.minpoly)})
    norm = resultant(T, m, "theta").to_univariate_list("v")
    _, facs = uni.factor_over_q([Q(v) for v in norm])
    Kco = [K.convert(c) for c in coeffs]
    out = []
    for fac, _m in facs:
        h = uni.gcd_(Kco, [K.convert(c) for c in fac])
        if len(h) <= 1:
            continue
        if len(h) > 2:
            raise UnsupportedField("roots outside the current coordinate field")
        r = -h[0] / h[1]
        out.append((K, r, 1))
    return out
