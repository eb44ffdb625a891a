"""Global index sums on P^2 and the search for invariant algebraic curves."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field as dc_field

from gmpy2 import mpq

from .blowup import InapplicableLaw, cs_of_curve, reduce_singularity
from .exactalg import AlgebraicScalar, MultiPoly, TruncationError, TruncSeries, fmt_scalar
from .foliation import AffineOneForm, FoliationError, ProjectiveFoliation, singular_locus
from .localsing import (
    at_origin,
    bb_grothendieck,
    bb_index,
    eval_on_curve,
    milnor_number,
    pullback_order,
)

log = logging.getLogger(__name__)


class SearchRefused(FoliationError):
    """The curve search preconditions do not hold."""


class NotInvariant(FoliationError):
    pass


def _plain(v):
    if isinstance(v, AlgebraicScalar) and v.is_rational():
        return v.to_rational()
    return v


def _orbit_sum(items):
    """Sum values over points, expanding Galois-orbit representatives by trace."""
    total = mpq(0)
    for orbit, v in items:
        if orbit > 1:
            v = v.trace() if isinstance(v, AlgebraicScalar) else v * orbit
        total = total + v
    return _plain(total)


# ------------------------------------------------------------ sum reports
@dataclass
class SumLine:
    formula: str
    computed: object
    expected: object
    expression: str

    @property
    def ok(self) -> bool:
        return _plain(self.computed) == _plain(self.expected)

    def text(self) -> str:
        return (
            f"{self.formula}: computed {fmt_scalar(self.computed)}, expected {self.expression} = "
            f"{fmt_scalar(self.expected)} [{'ok' if self.ok else 'FAIL'}]"
        )


@dataclass
class SumReport:
    degree: int
    lines: list
    points: list = dc_field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(l.ok for l in self.lines)

    def text(self) -> str:
        head = [f"degree {self.degree}, {len(self.points)} singular point record(s)"]
        head += [f"  {p}" for p in self.points]
        return "\n".join(head + [l.text() for l in self.lines])


def _as_projective(fol) -> ProjectiveFoliation:
    if isinstance(fol, ProjectiveFoliation):
        return fol
    if isinstance(fol, AffineOneForm):
        return ProjectiveFoliation(fol)
    raise TypeError("expected a ProjectiveFoliation or an AffineOneForm")


def local_bb(om: AffineOneForm, point):
    """BB at a point: closed formula when reduced, otherwise the residue oracle
    cross-checked with the reduction fold when that applies."""
    local = at_origin(om, point)
    try:
        return bb_index(local), "formula"
    except Exception:
        pass
    g = _plain(bb_grothendieck(local))
    try:
        t = reduce_singularity(local)
        f = t.bb()
        if f != g:
            raise FoliationError(f"BB fold {f} disagrees with the residue {g}")
        return g, "residue+reduction"
    except InapplicableLaw:
        return g, "residue"


def check_global_sums(fol) -> SumReport:
    """Sum of Milnor numbers and of BB indices against their closed forms."""
    fol = _as_projective(fol)
    d = fol.degree
    recs = singular_locus(fol)
    mus, bbs, pts = [], [], []
    for rec in recs:
        om = fol.chart(rec.chart)
        bb, how = local_bb(om, rec.coords)
        mus.append((rec.orbit, rec.mu))
        bbs.append((rec.orbit, bb))
        pts.append(f"{rec.label()}: mu={rec.mu}, BB={fmt_scalar(_plain(bb))} ({how}), {rec.classification}")
    lines = [
        SumLine("sum of Milnor numbers", _orbit_sum(mus), d * d + d + 1, "d^2+d+1"),
        SumLine("sum of Baum-Bott indices", _orbit_sum(bbs), (d + 2) ** 2, "(d+2)^2"),
    ]
    return SumReport(d, lines, pts)


# ---------------------------------------------------------- curves
def curve_in_chart(C: MultiPoly, chart: int) -> MultiPoly:
    """The affine curve C(x, y) = 0 written in chart 1 or 2 (coordinates (u, v) named (x, y))."""
    if chart == 0:
        return C
    m = C.degree()
    gens = C.gens
    u = MultiPoly.var(gens, gens[0])
    v = MultiPoly.var(gens, gens[1])
    out = MultiPoly.zero(gens, C.field)
    for (i, j), c in C.items():
        if chart == 1:
            out = out + c * u**j * v ** (m - i - j)
        else:
            out = out + c * u**i * v ** (m - i - j)
    return out


def _chart_form_xy(fol: ProjectiveFoliation, chart: int) -> AffineOneForm:
    om = fol.chart(chart)
    return om if om.gens == ("x", "y") else om.rename(("x", "y"))


def is_invariant(fol, F: MultiPoly) -> bool:
    """True iff F divides dF ^ omega in every chart."""
    if isinstance(fol, AffineOneForm):
        charts = [(0, fol)]
    else:
        fol = _as_projective(fol)
        charts = [(c, _chart_form_xy(fol, c)) for c in (0, 1, 2)]
    F = F.with_gens(("x", "y")) if F.gens != ("x", "y") else F
    for chart, om in charts:
        Fc = curve_in_chart(F, chart)
        if Fc.is_constant():
            continue
        w = om.wedge(Fc)
        if w and not Fc.divides(w):
            return False
    return True


def smooth_branch(C: MultiPoly, N: int):
    """Parametrization (x(t), y(t)) of {C = 0} at a smooth point at the origin."""
    cx = C.diff("x").constant_term()
    cy = C.diff("y").constant_term()
    if not cx and not cy:
        raise FoliationError("the curve is singular here; supply its branches")
    swap = not cy
    lin = cy if not swap else cx
    G = C if not swap else C.rename({"x": "y", "y": "x"}).with_gens(("x", "y"))
    field = G.field
    coeffs = [field.zero]
    for k in range(1, N + 1):
        f = TruncSeries(coeffs + [field.zero], k)
        t = TruncSeries([field.zero, field.one], k)
        val = eval_on_curve(G, t, f)[k]
        coeffs.append(-val / lin)
    t = TruncSeries([field.zero, field.one], N)
    f = TruncSeries(coeffs, N)
    return (f, t) if swap else (t, f)


def _local_curve(C: MultiPoly, point):
    shifts = {"x": point[0], "y": point[1]}
    return C.translate(shifts)


def check_curve_sums(fol, C: MultiPoly, branches=None) -> SumReport:
    """GSV, CS and multiplicity sums along an invariant curve C (affine equation).

    ``branches`` maps (chart, coords) of a singular point of C to a list of
    branch parametrizations centred at that point; smooth points are handled
    automatically.  At a singular point of C with r branches the GSV index
    is obtained as sum_B mu(F, B) - mu(C) - r + 1.
    """
    fol = _as_projective(fol)
    C = C.with_gens(("x", "y")) if C.gens != ("x", "y") else C
    if not is_invariant(fol, C):
        raise NotInvariant("the curve is not invariant by the foliation")
    d, m = fol.degree, C.degree()
    branches = dict(branches or {})
    gs, cs, ms, pts = [], [], [], []
    for rec in singular_locus(fol, invariants=False):
        Cc = curve_in_chart(C, rec.chart)
        if Cc.is_constant():
            continue
        local = _local_curve(Cc, rec.coords)
        if local.constant_term():
            continue
        om = at_origin(_chart_form_xy(fol, rec.chart), rec.coords)
        key = (rec.chart, tuple(rec.coords))
        smooth = bool(local.diff("x").constant_term() or local.diff("y").constant_term())
        if smooth:
            brs = None
        else:
            brs = _lookup(branches, key)
            if brs is None:
                raise FoliationError(f"singular point of C at {rec.label()}: branch parametrizations required")
        mu_fb, cs_val = _curve_point(om, local, brs)
        r = 1 if smooth else len(brs)
        mu_c = 0 if smooth else milnor_number(AffineOneForm(local.diff("x"), local.diff("y"), saturate=False))
        gsv = sum(mu_fb) - mu_c - r + 1
        gs.append((rec.orbit, gsv))
        cs.append((rec.orbit, cs_val))
        ms.append((rec.orbit, sum(mu_fb)))
        pts.append(f"{rec.label()}: GSV={gsv}, CS={fmt_scalar(_plain(cs_val))}, mu(F,B)={mu_fb}")
    chi = _euler_normalization(C, branches, fol)
    lines = [
        SumLine("sum of GSV indices", _orbit_sum(gs), m * (d + 2) - m * m, "m(d+2)-m^2"),
        SumLine("sum of CS indices", _orbit_sum(cs), m * m, "m^2"),
        SumLine("sum of mu(F,B,p)", _orbit_sum(ms), chi + m * (d - 1), "chi(normalization)+m(d-1)"),
    ]
    return SumReport(d, lines, pts)


def _lookup(branches, key):
    for k, v in branches.items():
        if k[0] == key[0] and all(_plain(a) == _plain(b) for a, b in zip(k[1], key[1])):
            return v
    return None


def _curve_point(om, local, brs):
    exact_N = 16
    while True:
        try:
            use = brs if brs is not None else [smooth_branch(local, exact_N)]
            mus = [pullback_order(om, _pair(b, exact_N)) for b in use]
            cs = cs_of_curve(om, local, use)
            return mus, cs
        except TruncationError:
            exact_N *= 2
            if exact_N > 1024:
                raise


def _pair(b, N):
    if isinstance(b[0], TruncSeries):
        return b
    return TruncSeries(list(b[0]), N), TruncSeries(list(b[1]), N)


def _euler_normalization(C, branches, fol):
    """chi of the normalization of an irreducible curve: 2 - 2g with the
    genus from the degree-genus formula minus the delta invariants (2 delta =
    mu + r - 1 at each singular point)."""
    m = C.degree()
    total_delta2 = 0
    for rec in singular_locus(_as_projective(fol), invariants=False):
        Cc = curve_in_chart(C, rec.chart)
        local = _local_curve(Cc, rec.coords)
        if Cc.is_constant() or local.constant_term():
            continue
        if local.diff("x").constant_term() or local.diff("y").constant_term():
            continue
        brs = _lookup(branches, (rec.chart, tuple(rec.coords)))
        mu_c = milnor_number(AffineOneForm(local.diff("x"), local.diff("y"), saturate=False))
        total_delta2 += (mu_c + len(brs) - 1) * rec.orbit
    # singular points of an invariant curve are singular points of F
    return 3 * m - m * m + total_delta2


# ------------------------------------------------------ curve search
@dataclass
class DegreeResult:
    degree: int
    N: int
    dimensions: list
    candidates: list
    verdicts: list


@dataclass
class CurveSearchCertificate:
    m_max: int
    point: tuple
    chart: int
    kind: str
    branches: int
    per_degree: list
    verdict: str
    notes: list = dc_field(default_factory=list)

    def text(self) -> str:
        lines = [
            f"unique singular point {self.point} (chart {self.chart}), {self.kind}; {self.branches} separatrix branch(es)"
        ]
        for r in self.per_degree:
            dims = ", ".join(f"N={n}:{dim}" for n, dim in r.dimensions)
            lines.append(f"  degree {r.degree}: N={r.N}, dimensions [{dims}], candidates {len(r.candidates)}")
        lines += [f"  note: {n}" for n in self.notes]
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines)


def _nullspace(rows, ncols):
    """Basis of the right kernel of a matrix over a field (rows of scalars)."""
    A = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [mpq(0)] * ncols
        v[fcol] = mpq(1)
        for i, pc in enumerate(pivots):
            v[pc] = -A[i][fcol]
        basis.append(v)
    return basis


def _monomials(m):
    return [(i, s - i) for s in range(m + 1) for i in range(s, -1, -1)]


def _branches_at(om_local: AffineOneForm, N: int):
    """Root-local parametrizations of all separatrix branches, exact to t^N."""
    N0 = max(32, 2 * N)
    while True:
        tree = reduce_singularity(om_local, N0=N0)
        if any(c.dicritical for c in tree.components.values()):
            raise SearchRefused("the singularity is dicritical")
        out = []
        short = False
        for leaf, role in tree.free_separatrices():
            psi = tree.branch_at(leaf, role)[0]
            if min(psi[0].N, psi[1].N) < N:
                short = True
                break
            out.append(psi)
        if not short:
            return tree, [(a.truncate(N), b.truncate(N)) for a, b in out]
        N0 *= 2
        if N0 > 4096:
            raise SearchRefused("separatrix jets could not be made long enough")


def invariant_curve_search(fol, m_max: int | None = None) -> CurveSearchCertificate:
    """Certify that no invariant algebraic curve of degree <= m_max exists.

    Every invariant algebraic curve passes through a singular point, and at
    a unique singular point each of its local branches is a separatrix.  For
    each single separatrix branch psi the degree-m polynomials F with
    F(psi) = 0 mod t^(N+1) form a linear space; if it is zero for every branch,
    no curve of degree m exists.
    """
    fol = _as_projective(fol)
    recs = singular_locus(fol)
    if len(recs) != 1 or recs[0].orbit != 1:
        raise SearchRefused("the search requires a unique singular point")
    rec = recs[0]
    d = fol.degree
    m_max = d + 2 if m_max is None else m_max
    om = at_origin(_chart_form_xy(fol, rec.chart), rec.coords)
    notes = [f"mu = {rec.mu}"]
    kind = rec.classification.kind
    if kind == "Nilpotent":
        notes.append(f"n = mu + 1 = {rec.mu + 1} (d^2+d+2 = {d * d + d + 2})")
    if kind == "SaddleNode":
        notes.append(f"GSV bound floor((d+2)^2/4) = {(d + 2) ** 2 // 4} vs d^2+d = {d * d + d}")
    per = [_search_degree(fol, om, rec, m) for m in range(1, m_max + 1)]
    found = [c for r in per for c, ok in zip(r.candidates, r.verdicts) if ok]
    verdict = "found: " + "; ".join(str(f) for f in found) if found else "none"
    nbr = len(_branches_at(om, 2)[1])
    coords = tuple(fmt_scalar(c) for c in rec.coords)
    return CurveSearchCertificate(m_max, coords, rec.chart, kind, nbr, per, verdict, notes)


def _search_degree(fol, om, rec, m):
    mons = _monomials(m)
    ncols = len(mons)
    N = ncols + 4
    dims = []
    prev = None
    stable = 0
    while True:
        tree, brs = _branches_at(om, N)
        dim_total = 0
        spaces = []
        for psi in brs:
            cols = _monomial_columns(psi, mons, rec)
            rows = [[col[k] for col in cols] for k in range(N + 1)]
            basis = _nullspace(rows, ncols)
            spaces.append(basis)
            dim_total += len(basis)
        dims.append((N, dim_total))
        if dim_total == 0:
            return DegreeResult(m, N, dims, [], [])
        stable = stable + 1 if dim_total == prev else 0
        prev = dim_total
        if stable >= 2 and N > ncols:
            break
        N *= 2
        if N > 512:
            break
    cands, verdicts = [], []
    for basis in spaces:
        for v in basis:
            F = MultiPoly.from_dict(("x", "y"), {e: c for e, c in zip(mons, v) if c})
            cands.append(F)
            verdicts.append(is_invariant(fol, F))
    return DegreeResult(m, N, dims, cands, verdicts)


def _monomial_columns(psi, mons, rec):
    """Series of each affine monomial x^i y^j along a chart branch."""
    xs, ys = psi
    a, b = rec.coords
    X = xs + a
    Y = ys + b
    N = min(xs.N, ys.N)
    one = TruncSeries([mpq(1)], N)
    # affine coordinates in terms of chart coordinates, homogenized by v^m
    if rec.chart == 0:
        base = (X, Y, one)
    elif rec.chart == 1:
        base = (one, X, Y)  # x = 1/v, y = u/v: x^i y^j v^m = u^j v^(m-i-j)
    else:
        base = (X, one, Y)  # x = u/v, y = 1/v
    cols = []
    m = max(i + j for i, j in mons)
    for i, j in mons:
        s = base[0] ** i * base[1] ** j * base[2] ** (m - i - j)
        cols.append(s)
    return cols


# ------------------------------------------------------ random test fields
@dataclass
class LogFoliation:
    """F_1...F_k * sum(lambda_i dF_i / F_i) over affine rational lines F_i."""

    lines: list
    residues: list
    form: AffineOneForm

    @property
    def degree(self) -> int:
        return ProjectiveFoliation(self.form).degree


def log_form(lines, residues) -> AffineOneForm:
    P = MultiPoly.zero(("x", "y"))
    Qp = MultiPoly.zero(("x", "y"))
    for i, (F, lam) in enumerate(zip(lines, residues)):
        rest = MultiPoly.const(("x", "y"), 1)
        for j, G in enumerate(lines):
            if j != i:
                rest = rest * G
        P = P + rest * F.diff("x") * lam
        Qp = Qp + rest * F.diff("y") * lam
    return AffineOneForm(P, Qp)


def random_log_foliation(rng, degree: int, tries: int = 200) -> LogFoliation:
    """A logarithmic foliation of the given degree (1 or 2) whose singular
    points are all rational and non-degenerate.

    Draws degree + 1 affine lines with small integer coefficients and nonzero
    rational residues with nonzero sum, so the line at infinity is invariant
    too; rejects draws that violate the requirements.
    """
    if degree not in (1, 2):
        raise ValueError("log foliations are drawn for degree 1 or 2 only")
    x = MultiPoly.var(("x", "y"), "x")
    y = MultiPoly.var(("x", "y"), "y")
    for _ in range(tries):
        lines = []
        for _ in range(degree + 1):
            a, b = rng.choice([(1, 0), (0, 1)] + [(1, k) for k in (-2, -1, 1, 2, 3)])
            c = rng.randint(-3, 3)
            lines.append(x * a + y * b + c)
        residues = [mpq(rng.choice([-3, -2, -1, 1, 2, 3, 5]), rng.randint(1, 3)) for _ in lines]
        if sum(residues) == 0:
            continue
        try:
            om = log_form(lines, residues)
            fol = ProjectiveFoliation(om)
            if fol.degree != degree:
                continue
            recs = singular_locus(fol)
        except FoliationError:
            continue
        if all(r.orbit == 1 and r.field.degree == 1 and r.classification.kind == "NonDegenerate" for r in recs):
            return LogFoliation(lines, residues, om)
    raise FoliationError("no admissible logarithmic foliation drawn")
