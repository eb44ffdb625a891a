"""Local invariants of a singular point of omega = P dx + Q dy.

The dual vector field is v = Q d/dx - P d/dy throughout, so that
omega(v) = 0.  All functions accept a point ``p`` (pair of scalars, possibly
in a number field) and work with the form translated to the origin.
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
    TruncationError,
    TruncSeries,
    UnsupportedField,
    adjoin_root,
    fmt_scalar,
    resultant,
    residue_at_origin,
)
from .exactalg.numbers import rational_sqrt
from .exactalg import univariate as uni
from .foliation import AffineOneForm, FoliationError

log = logging.getLogger(__name__)


class LocalError(FoliationError):
    pass


class NeedsReduction(LocalError):
    """The requested index is not defined by a closed formula at this point."""


def at_origin(omega: AffineOneForm, p=None) -> AffineOneForm:
    if p is None or (not p[0] and not p[1]):
        return omega
    return omega.translate(p)


# ------------------------------------------------------------------ basics
def algebraic_multiplicity(omega: AffineOneForm, p=None) -> int:
    om = at_origin(omega, p)
    degs = [f.min_degree() for f in (om.P, om.Q) if f]
    return min(degs)


def _nonisolated_check(P, Q):
    from .exactalg import poly_gcd

    g = poly_gcd(P, Q)
    if not g.is_constant() and not g.constant_term():
        raise LocalError("non-isolated zero: a common factor passes through the point")


def _milnor_shear(P, Q, c):
    """ord_y Res_x after the change y -> y + c x, or None if the shear is inadmissible."""
    a, b = P.gens
    X = MultiPoly.var(P.gens, a)
    Y = MultiPoly.var(P.gens, b)
    Ps = P.subs({b: Y + X * c})
    Qs = Q.subs({b: Y + X * c})
    # one of the two must have a constant leading coefficient in x
    ok = False
    for F in (Ps, Qs):
        if not F:
            return None
        lc = F.coefficients_in(a)[F.degree_in(a)]
        if lc.is_constant():
            ok = True
    if not ok:
        return None
    # on {y = 0} the only common zero must be x = 0
    f0 = Ps.subs({b: 0}).to_univariate_list(a)
    g0 = Qs.subs({b: 0}).to_univariate_list(a)
    if not f0 and not g0:
        return None
    h = uni.gcd_(f0, g0) if (f0 and g0) else uni.monic(f0 or g0)
    if len(h) > 1 and any(h[i] for i in range(len(h) - 1)):
        return None
    r = resultant(Ps, Qs, a)
    if not r:
        raise LocalError("non-isolated zero: resultant vanishes identically")
    return r.min_degree_in(b) if r.involves(b) or r.constant_term() else 0


def milnor_number(omega: AffineOneForm, p=None, seed: int = 0) -> int:
    """Local intersection multiplicity of P and Q at p, cross-checked by two shears."""
    om = at_origin(omega, p)
    P, Q = om.P, om.Q
    if P.constant_term() or Q.constant_term():
        return 0
    rng = random.Random(seed)
    values = []
    tried = set()
    attempts = 0
    while len(values) < 2:
        attempts += 1
        if attempts > 60:
            _nonisolated_check(P, Q)
            raise LocalError("no admissible shear found for the Milnor number")
        c = mpq(rng.randint(-40, 40), rng.randint(1, 9))
        if c in tried:
            continue
        tried.add(c)
        m = _milnor_shear(P, Q, c)
        if m is not None:
            values.append(m)
    if values[0] != values[1]:
        raise LocalError(f"internal error: shears disagree on the Milnor number {values}")
    return values[0]


# ----------------------------------------------------------- classification
@dataclass
class Classification:
    kind: str  # NonDegenerate | SaddleNode | Nilpotent | OtherDegenerate
    reduced: bool
    trace: object = None
    det: object = None
    eigen: tuple | None = None
    mu: int | None = None

    def __str__(self):
        s = self.kind
        if self.kind == "NonDegenerate":
            if self.eigen:
                s += f"(eigenvalues {fmt_scalar(self.eigen[0])}, {fmt_scalar(self.eigen[1])})"
            else:
                s += f"(trace {fmt_scalar(self.trace)}, det {fmt_scalar(self.det)})"
        if self.mu is not None and self.kind == "SaddleNode":
            s += f"(mu={self.mu})"
        return s + (" reduced" if self.reduced else " non-reduced")


def linear_part(om: AffineOneForm):
    """Jacobian of the dual field at the origin: [[Q_x, Q_y], [-P_x, -P_y]]."""
    a, b = om.gens
    P1 = om.P.homogeneous_part(1)
    Q1 = om.Q.homogeneous_part(1)
    qa = Q1.coeff((1, 0))
    qb = Q1.coeff((0, 1))
    pa = P1.coeff((1, 0))
    pb = P1.coeff((0, 1))
    return [[qa, qb], [-pa, -pb]]


def _eigenvalues(T, D):
    """Roots of z^2 - T z + D in the field of T, D, or None if irrational."""
    disc = T * T - 4 * D
    if isinstance(disc, AlgebraicScalar):
        if disc.is_rational():
            disc = disc.to_rational()
        else:
            return None
    r = rational_sqrt(disc) if disc >= 0 else None
    if r is None:
        return None
    return ((T + r) / 2, (T - r) / 2)


def is_positive_rational_ratio(T, D) -> bool:
    """Whether the eigenvalue ratio lies in Q_{>0} (T^2/D = r + 1/r + 2)."""
    s = T * T / D - 2
    if isinstance(s, AlgebraicScalar):
        if not s.is_rational():
            return False
        s = s.to_rational()
    if s < 2:
        return False
    return rational_sqrt(s * s - 4) is not None


def classify(omega: AffineOneForm, p=None, mu=None) -> Classification:
    om = at_origin(omega, p)
    if om.P.constant_term() or om.Q.constant_term():
        raise LocalError("point is not singular")
    J = linear_part(om)
    T = J[0][0] + J[1][1]
    D = J[0][0] * J[1][1] - J[0][1] * J[1][0]
    if not any(J[i][j] for i in range(2) for j in range(2)):
        return Classification("OtherDegenerate", False, T, D, mu=mu)
    if D:
        eig = _eigenvalues(T, D)
        reduced = not is_positive_rational_ratio(T, D)
        return Classification("NonDegenerate", reduced, T, D, eig, mu=1)
    if T:
        if mu is None:
            mu = milnor_number(om)
        return Classification("SaddleNode", True, T, D, (T, T * 0), mu=mu)
    return Classification("Nilpotent", False, T, D, mu=mu)


# ------------------------------------------------------------ series tools
def eval_on_curve(F: MultiPoly, xs: TruncSeries, ys: TruncSeries) -> TruncSeries:
    """F(xs(t), ys(t)) as a truncated series."""
    a, b = F.gens
    N = min(xs.N, ys.N)
    zero = TruncSeries([F.field.zero], N)
    one = TruncSeries([F.field.one], N)
    cols = F.as_list_in(b)
    acc = zero
    ypow = one
    for j, cj in enumerate(cols):
        if cj:
            lst = cj.to_univariate_list(a) if cj.involves(a) or cj.constant_term() else []
            # Horner in xs
            h = zero
            for c in reversed(lst):
                h = h * xs + c
            acc = acc + h * ypow
        if j < len(cols) - 1:
            ypow = ypow * ys
    return acc


def _identity_series(N, field=QQ):
    return TruncSeries([field.zero, field.one], N)


# ------------------------------------------------------------- separatrices
@dataclass
class SeparatrixSeries:
    """A smooth formal branch through the origin.

    ``axis == "x"``: the graph y = f(x); ``axis == "y"``: the graph x = f(y).
    ``f`` includes the linear (slope) term.
    """

    axis: str
    f: TruncSeries
    role: str
    formal_only: bool = False
    form: AffineOneForm | None = dc_field(default=None, repr=False)

    @property
    def N(self):
        return self.f.N

    def parametrization(self, N=None):
        """(x(t), y(t)) for the branch."""
        f = self.f if N is None else self.f.truncate(N)
        t = _identity_series(f.N, _series_field(f))
        return (t, f) if self.axis == "x" else (f, t)

    def refine(self, N: int) -> "SeparatrixSeries":
        if self.form is None:
            raise LocalError("separatrix has no source form to refine from")
        return _graph_separatrix(self.form, self.axis, self.f[1], N, self.role, self.formal_only)


def _series_field(s: TruncSeries):
    for c in s.coeffs:
        if isinstance(c, AlgebraicScalar):
            return c.field
    return QQ


def _graph_separatrix(om: AffineOneForm, axis: str, slope, N: int, role: str, formal_only=False):
    """Solve the invariance equation for y = slope*x + sum c_k x^k (axis "x")."""
    work = om if axis == "x" else om.swap()
    P, Q = work.P, work.Q
    J = linear_part(work)
    # Q_x, Q_y at 0 are J[0][0], J[0][1]; P_y = -J[1][1]
    qx, qy, py = J[0][0], J[0][1], -J[1][1]
    field = work.field
    if isinstance(slope, AlgebraicScalar):
        field = slope.field
    coeffs = [field.zero, field.convert(slope) if field is not QQ else mpq(slope)]
    for k in range(2, N + 1):
        alpha = py + qy * slope + k * (qx + qy * slope)
        fk = TruncSeries(coeffs + [field.zero], k)
        xs = _identity_series(k, field)
        E = eval_on_curve(P, xs, fk) + eval_on_curve(Q, xs, fk) * _derivative_keep(fk)
        beta = E[k]
        if not alpha:
            if beta:
                raise LocalError(f"resonance blocks the separatrix at order {k}")
            coeffs.append(field.zero)
            continue
        coeffs.append(-beta / alpha)
    f = TruncSeries(coeffs, N)
    return SeparatrixSeries(axis, f, role, formal_only, om)


def _derivative_keep(f: TruncSeries) -> TruncSeries:
    """f' with the same nominal truncation (the top coefficient is then unknown
    but multiplies an order >= 1 factor in every use here)."""
    c = [f.coeffs[i] * i for i in range(1, f.N + 1)]
    return TruncSeries(c + [c[0] * 0 if c else mpq(0)], f.N)


def _eigvec(J, lam):
    a, b = J[0]
    c, d = J[1]
    if b:
        return (b, lam - a)
    if c:
        return (lam - d, c)
    return (1, 0) if lam == a else (0, 1)


def _split_eigen(T, D):
    """Eigenvalues, adjoining a square root when the base field is Q."""
    eig = _eigenvalues(T, D)
    if eig is not None:
        return eig
    if isinstance(T, AlgebraicScalar) or isinstance(D, AlgebraicScalar):
        raise UnsupportedField("eigenvalues need a second extension (towers unsupported)")
    disc = T * T - 4 * D
    K = adjoin_root([-disc, 0, 1], "s")
    r = K.gen
    return ((r + T) / 2, (-r + T) / 2)


def separatrix_directions(om: AffineOneForm):
    """Role -> (direction vector, eigenvalue) for a reduced point at the origin."""
    cl = classify(om)
    J = linear_part(om)
    if cl.kind == "NonDegenerate":
        if not J[0][1] or not J[1][0]:
            # triangular: the diagonal holds the eigenvalues
            l1, l2 = J[0][0], J[1][1]
        else:
            l1, l2 = _split_eigen(cl.trace, cl.det)
        if l1 == l2:
            raise LocalError("equal eigenvalues: not a reduced point")
        return {"sep1": (_eigvec(J, l1), l1), "sep2": (_eigvec(J, l2), l2)}, cl
    if cl.kind == "SaddleNode":
        T = cl.trace
        return {"strong": (_eigvec(J, T), T), "weak": (_eigvec(J, T * 0), T * 0)}, cl
    raise NeedsReduction(f"{cl.kind} point has no closed-form separatrix structure")


def separatrix_series(omega: AffineOneForm, p=None, role="weak", N: int = 10) -> SeparatrixSeries:
    om = at_origin(omega, p)
    dirs, cl = separatrix_directions(om)
    if role not in dirs:
        raise LocalError(f"role {role!r} unavailable; choose from {sorted(dirs)}")
    (e1, e2), _lam = dirs[role]
    formal = cl.kind == "SaddleNode" and role == "weak"
    if e1:
        slope = e2 * (1 / (mpq(e1) if isinstance(e1, int) else e1))
        return _graph_separatrix(om, "x", slope, N, role, formal)
    return _graph_separatrix(om, "y", mpq(0), N, role, formal)


def axis_separatrix(omega: AffineOneForm, axis: str, N: int = 4, role="axis") -> SeparatrixSeries:
    """The coordinate axis {y = 0} (axis "x") or {x = 0} (axis "y") as a branch.

    The axis must be invariant.
    """
    om = omega
    a, b = om.gens
    if axis == "x":
        restricted = om.P.subs({b: 0})
    else:
        restricted = om.Q.subs({a: 0})
    if restricted:
        raise LocalError(f"the axis {{{b if axis == 'x' else a} = 0}} is not invariant")
    field = om.field
    return SeparatrixSeries(axis, TruncSeries([field.zero], N), role, False, None)


# -------------------------------------------------------------------- CS
def _cs_once(om: AffineOneForm, S: SeparatrixSeries):
    work = om if S.axis == "x" else om.swap()
    a, b = work.gens
    f = S.f
    xs = _identity_series(f.N, _series_field(f))
    fp = f.derivative()
    Py = work.P.diff(b)
    Qy = work.Q.diff(b)
    A = eval_on_curve(Py, xs, f).truncate(f.N - 1) + eval_on_curve(Qy, xs, f).truncate(f.N - 1) * fp
    B = eval_on_curve(work.Q, xs, f)
    return -residue_at_origin(A, B)


def cs_index(omega: AffineOneForm, S: SeparatrixSeries, p=None):
    """Camacho-Sad index of the smooth branch S (straighten, then residue).

    When S can be refined, the truncation is doubled until two consecutive
    values agree.
    """
    om = at_origin(omega, p)
    if S.form is None:
        # exact branch (an invariant axis): one exact evaluation suffices
        N = S.N
        while True:
            try:
                S2 = SeparatrixSeries(S.axis, TruncSeries(list(S.f.coeffs), N), S.role)
                return _cs_once(om, S2)
            except TruncationError:
                N *= 2
                if N > 4096:
                    raise
    N = max(S.N, 4)
    prev = None
    while True:
        cur = S if S.N == N else S.refine(N)
        try:
            val = _cs_once(om, cur)
        except TruncationError:
            val = None
        if val is not None and prev is not None and val == prev:
            log.debug("cs_index stabilized at N=%d: %s", N, val)
            return val
        prev = val
        N *= 2
        if N > 2048:
            raise LocalError("CS index did not stabilize")


def cs_along_axis(omega: AffineOneForm, axis: str, p=None):
    """CS index of an invariant coordinate axis through p."""
    om = at_origin(omega, p)
    return cs_index(om, axis_separatrix(om, axis))


# ------------------------------------------------------------------- GSV
def pullback_order(omega: AffineOneForm, psi, p=None) -> int:
    """Order in t of a(t) where v(psi(t)) = a(t) psi'(t).

    ``psi`` is a pair of TruncSeries (or a SeparatrixSeries).  The
    consistency equation is verified to the available precision.
    """
    om = at_origin(omega, p)
    if isinstance(psi, SeparatrixSeries):
        psi = psi.parametrization()
    xs, ys = psi
    Qv = eval_on_curve(om.Q, xs, ys)
    Pv = eval_on_curve(om.P, xs, ys)
    xp = xs.derivative()
    yp = ys.derivative()
    # invariance: P x' + Q y' = 0 to the known order
    M = min(Qv.N, Pv.N, xp.N, yp.N)
    inv = Pv.truncate(M) * xp.truncate(M) + Qv.truncate(M) * yp.truncate(M)
    if not inv.is_zero():
        raise LocalError("parametrization is not invariant (consistency equation fails)")
    for num, den in ((Qv, xp), (-Pv, yp)):
        try:
            k = _order(den)
        except TruncationError:
            continue
        return _order(num) - k
    raise TruncationError("truncation insufficient for the pullback order")


def _order(s: TruncSeries) -> int:
    for i, c in enumerate(s.coeffs):
        if c:
            return i
    raise TruncationError(f"order exceeds truncation {s.N}")


def gsv_index(omega: AffineOneForm, S: SeparatrixSeries, p=None) -> int:
    om = at_origin(omega, p)
    N = max(S.N, 8)
    while True:
        cur = S if (S.form is None or S.N == N) else S.refine(N)
        if S.form is None and cur.N != N:
            cur = SeparatrixSeries(S.axis, TruncSeries(list(S.f.coeffs), N), S.role)
        try:
            return pullback_order(om, cur)
        except TruncationError:
            N *= 2
            if N > 4096:
                raise


# -------------------------------------------------------------------- BB
def bb_index(omega: AffineOneForm, p=None):
    """Baum-Bott index at a non-degenerate point or a saddle-node."""
    om = at_origin(omega, p)
    cl = classify(om)
    if cl.kind == "NonDegenerate":
        return cl.trace * cl.trace / cl.det
    if cl.kind == "SaddleNode":
        mu = milnor_number(om)
        S = separatrix_series(om, None, "weak", N=2 * mu + 4)
        lam = cs_index(om, S)
        return 2 * mu + lam
    raise NeedsReduction(f"{cl.kind} point: use reduction (bb_via_reduction)")


def bb_grothendieck(omega: AffineOneForm, p=None):
    """Baum-Bott index as the Grothendieck residue of (tr Dv)^2 / (v1 v2).

    Uses the transformation law with s(x) = Res_y(v1, v2) and
    r(y) = Res_x(v1, v2) and their cofactor matrix.  Valid at any isolated
    singular point; serves as an independent oracle.
    """
    om = at_origin(omega, p)
    a, b = om.gens
    v1, v2 = om.Q, -om.P
    h = (v1.diff(a) + v2.diff(b)) ** 2
    s, g1, g2 = resultant(v1, v2, b, cofactors=True)  # g1 v1 + g2 v2 = s(x)
    r, h1, h2 = resultant(v1, v2, a, cofactors=True)  # h1 v1 + h2 v2 = r(y)
    if not s or not r:
        raise LocalError("non-isolated singular point")
    detA = g1 * h2 - g2 * h1
    H = h * detA
    sl = s.to_univariate_list(a)
    rl = r.to_univariate_list(b)
    m = uni.order(sl)
    n = uni.order(rl)
    if m == 0 or n == 0:
        raise LocalError("point is not singular")
    st = TruncSeries(sl[m:], m - 1, "x").inverse()
    rt = TruncSeries(rl[n:], n - 1, "y").inverse()
    total = om.field.zero
    for (i, j), c in H.items():
        if i < m and j < n:
            total = total + c * st[m - 1 - i] * rt[n - 1 - j]
    return total
