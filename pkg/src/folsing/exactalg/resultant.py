"""Resultants by the subresultant PRS, with optional cofactor tracking.

Polynomials are viewed as univariate in ``var`` with MultiPoly coefficients
(on the same generators, with ``var`` absent).  All divisions performed by
the algorithm are exact.
"""

from __future__ import annotations

from .poly import MultiPoly, PolyError


def _lc(c):
    return c[-1]


def _trim(c):
    while c and not c[-1]:
        c.pop()
    return c


def _prem(a, b, zero):
    """Pseudo-remainder and pseudo-quotient: lc(b)^(da-db+1) a = q b + r."""
    a = list(a)
    db = len(b) - 1
    lb = b[-1]
    delta = len(a) - len(b)
    q = [zero] * (delta + 1)
    e = delta + 1
    while len(a) - 1 >= db and a:
        shift = len(a) - 1 - db
        la = a[-1]
        q = [c * lb for c in q]
        q[shift] = q[shift] + la
        a = [c * lb for c in a]
        for j, bj in enumerate(b):
            a[shift + j] = a[shift + j] - la * bj
        e -= 1
        _trim(a)
    if e > 0:
        f = lb**e
        a = [c * f for c in a]
        q = [c * f for c in q]
    return _trim(a), q


def _exact(a, d):
    if isinstance(d, MultiPoly):
        if d.is_constant():
            return a / d.constant_term()
        return a.exact_div(d)
    return a / d


def _lift(poly, var, coeffs):
    """Rebuild a polynomial from coefficient polys of var^k."""
    x = MultiPoly.var(poly.gens, var, poly.field)
    out = MultiPoly.zero(poly.gens, poly.field)
    xp = MultiPoly.const(poly.gens, 1)
    for c in coeffs:
        out = out + c * xp
        xp = xp * x
    return out


def resultant(f: MultiPoly, g: MultiPoly, var: str, cofactors: bool = False):
    """Res_var(f, g) via the subresultant PRS.

    Sign rule: ``resultant(g, f) == (-1)**(deg f * deg g) * resultant(f, g)``
    (the Sylvester-matrix convention).  With ``cofactors=True`` returns
    ``(res, u, v)`` with ``u*f + v*g == res``.
    """
    if var not in f.gens:
        raise PolyError(f"{var} is not a declared variable of {f.gens}")
    if f.gens != g.gens:
        g = g.with_gens(f.gens)
    if not f or not g:
        raise ValueError("resultant of a zero polynomial")
    gens = f.gens
    one = MultiPoly.const(gens, 1)
    zero = MultiPoly.zero(gens)
    A = f.as_list_in(var)
    B = g.as_list_in(var)
    da, db = len(A) - 1, len(B) - 1
    ua, va, ub, vb = one, zero, zero, one
    s = 1
    if da < db:
        A, B = B, A
        da, db = db, da
        ua, va, ub, vb = ub, vb, ua, va
        if da % 2 and db % 2:
            s = -s
    if db == 0:
        if da == 0:
            if cofactors:
                raise ValueError("cofactors undefined when both inputs are free of var")
            return one * s
        res = B[0] ** da
        if not cofactors:
            return res * s
        fac = B[0] ** (da - 1)
        return res * s, ub * fac * s, vb * fac * s
    gg = one
    h = one
    while True:
        delta = len(A) - len(B)
        if (len(A) - 1) % 2 and (len(B) - 1) % 2:
            s = -s
        R, q = _prem(A, B, zero)
        lb = B[-1]
        if cofactors:
            e = lb ** (delta + 1)
            qp = _lift(f, var, q)
            ur = ua * e - qp * ub
            vr = va * e - qp * vb
        A, ua, va = B, ub, vb
        if not R:
            if cofactors:
                return zero, zero, zero
            return zero
        div = gg * h**delta
        B = [_exact(c, div) for c in R]
        if cofactors:
            ub = _exact(ur, div)
            vb = _exact(vr, div)
        gg = A[-1]
        if delta == 1:
            h = gg
        elif delta > 1:
            h = _exact(gg**delta, h ** (delta - 1))
        if len(B) - 1 <= 0:
            break
    da = len(A) - 1
    lb = B[0]
    if da == 1:
        res = lb
    else:
        res = _exact(lb**da, h ** (da - 1))
    if not cofactors:
        return res * s
    # the last remainder B0 = ub f + vb g; res = B0 * (B0/h)^(da-1)
    if da == 1:
        return res * s, ub * s, vb * s
    den = h ** (da - 1)
    fac = lb ** (da - 1)
    return res * s, _exact(ub * fac, den) * s, _exact(vb * fac, den) * s


def sylvester_resultant(f: MultiPoly, g: MultiPoly, var: str):
    """Determinant of the Sylvester matrix (slow oracle for tests)."""
    A = f.as_list_in(var)
    B = g.as_list_in(var)
    m, n = len(A) - 1, len(B) - 1
    size = m + n
    if size == 0:
        return MultiPoly.const(f.gens, 1)
    zero = MultiPoly.zero(f.gens)
    rows = []
    for i in range(n):
        row = [zero] * size
        for j, c in enumerate(reversed(A)):
            row[i + j] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for j, c in enumerate(reversed(B)):
            row[i + j] = c
        rows.append(row)
    return _det(rows)


def _det(rows):
    """Fraction-free Bareiss determinant over a polynomial ring."""
    n = len(rows)
    M = [list(r) for r in rows]
    sign = 1
    prev = None
    for k in range(n - 1):
        if not M[k][k]:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return M[0][0] * 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                M[i][j] = num if prev is None else _exact(num, prev)
        prev = M[k][k]
    return M[n - 1][n - 1] * sign


def discriminant(f: MultiPoly, var: str):
    d = f.degree_in(var)
    lc = f.coefficients_in(var)[d]
    r = resultant(f, f.diff(var), var)
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return _exact(r, lc) * sign


def poly_gcd(f: MultiPoly, g: MultiPoly, var: str | None = None) -> MultiPoly:
    """Greatest common divisor (monic in grlex leading term).

    Bivariate/multivariate via primitive PRS recursion on ``var``; the content
    recursion runs over the remaining generators.
    """
    if not f:
        return g.primitive() if g else g
    if not g:
        return f.primitive()
    used = [v for v in f.gens if f.involves(v) or g.involves(v)]
    if not used:
        return MultiPoly.const(f.gens, 1, f.field if f.field == g.field else None)
    if var is None:
        var = used[0]
    if not f.involves(var) and not g.involves(var):
        rest = [v for v in used if v != var]
        return poly_gcd(f, g, rest[0])
    cf = _content(f, var)
    cg = _content(g, var)
    cgcd = _gcd_list([cf, cg], var)
    pf = _exact(f, cf)
    pg = _exact(g, cg)
    A = pf.as_list_in(var)
    B = pg.as_list_in(var)
    if len(A) < len(B):
        A, B = B, A
    zero = MultiPoly.zero(f.gens, f.field)
    while len(B) > 1:
        R, _ = _prem(A, B, zero)
        if not R:
            A = B
            B = []
            break
        rp = _lift(f, var, R)
        rp = _exact(rp, _content(rp, var))
        A, B = B, rp.as_list_in(var)
    if B:
        # last nonzero remainder is constant in var: primitive parts coprime
        prim = MultiPoly.const(f.gens, 1)
    else:
        prim = _lift(f, var, A)
        prim = _exact(prim, _content(prim, var))
    return (prim * cgcd).primitive()


def _content(p: MultiPoly, var: str) -> MultiPoly:
    coeffs = [c for c in p.as_list_in(var) if c]
    return _gcd_list(coeffs, var)


def _gcd_list(polys, var):
    polys = [q for q in polys if q]
    if not polys:
        raise ValueError("content of the zero polynomial")
    g = polys[0]
    for q in polys[1:]:
        if g.is_constant():
            break
        rest = [v for v in g.gens if v != var and (g.involves(v) or q.involves(v))]
        if not rest:
            g = MultiPoly.const(g.gens, 1)
            break
        g = poly_gcd(g, q, rest[0])
    if g.is_constant():
        return MultiPoly.const(polys[0].gens, 1)
    return g.primitive()
