"""Dense univariate polynomials over Q or Q(theta).

Polynomials are plain lists of coefficients, constant term first, with no
trailing zeros (the zero polynomial is ``[]``).
"""

from __future__ import annotations

from math import gcd, lcm

from gmpy2 import mpq

from .numbers import Q, rational_sqrt


def strip(c):
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return c


def deg(c) -> int:
    return len(c) - 1


def add(a, b):
    n = max(len(a), len(b))
    return strip([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def sub(a, b):
    n = max(len(a), len(b))
    return strip([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
    return strip(out)


def scale(a, c):
    return strip([x * c for x in a])


def divmod_(a, b):
    a = strip(a)
    b = strip(b)
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    if len(a) < len(b):
        return [], a
    q = [0] * (len(a) - len(b) + 1)
    inv = 1 / b[-1]
    a = list(a)
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] * inv
        q[shift] = c
        for j, bj in enumerate(b):
            a[shift + j] = a[shift + j] - c * bj
        a = strip(a)
    return strip(q), a


def monic(a):
    a = strip(a)
    if not a:
        return a
    inv = 1 / a[-1]
    return [x * inv for x in a]


def gcd_(a, b):
    a, b = strip(a), strip(b)
    while b:
        _, r = divmod_(a, b)
        a, b = b, r
    return monic(a)


def deriv(a):
    return strip([a[i] * i for i in range(1, len(a))])


def evaluate(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def compose_linear(a, shift):
    """a(t + shift) by Horner."""
    out = []
    for c in reversed(a):
        out = add(mul(out, [shift, 1]), [c])
    return out


def order(a) -> int:
    for i, c in enumerate(a):
        if c:
            return i
    raise ValueError("zero polynomial has no order")


def squarefree_part(a):
    a = strip(a)
    if len(a) <= 1:
        return monic(a)
    g = gcd_(a, deriv(a))
    q, r = divmod_(a, g)
    assert not r
    return monic(q)


def _integer_primitive(coeffs):
    """Scale rational coefficients to coprime integers."""
    qs = [Q(c) for c in coeffs]
    den = 1
    for c in qs:
        den = lcm(den, int(c.denominator))
    ints = [int(c * den) for c in qs]
    g = 0
    for v in ints:
        g = gcd(g, v)
    g = g or 1
    return [v // g for v in ints]


def _divisors(n: int):
    from sympy import divisors

    return divisors(abs(n))


def rational_roots(coeffs):
    """Distinct rational roots of a rational polynomial, by divisor trial on the
    integer-cleared polynomial."""
    c = strip([Q(x) for x in coeffs])
    if len(c) <= 1:
        return []
    roots = []
    k = 0
    while c[k] == 0:
        k += 1
    if k:
        roots.append(mpq(0))
    c = c[k:]
    if len(c) <= 1:
        return roots
    ints = _integer_primitive(c)
    a0, an = ints[0], ints[-1]
    seen = set()
    for p in _divisors(a0):
        for q in _divisors(an):
            for s in (1, -1):
                r = mpq(s * p, q)
                if r in seen:
                    continue
                seen.add(r)
                if evaluate(c, r) == 0:
                    roots.append(r)
    return sorted(roots)


def quartic_quadratic_factor(coeffs):
    """For a quartic over Q without rational roots, return a monic rational
    quadratic factor (coefficient list) or None if it is irreducible.

    Uses the resolvent cubic of the depressed quartic.
    """
    c = [Q(x) for x in strip(coeffs)]
    assert len(c) == 5
    lead = c[-1]
    c = [x / lead for x in c]
    a3 = c[3]
    h = a3 / 4
    # depressed: z^4 + P z^2 + Qd z + R with x = z - h
    shifted = compose_linear(c, -h)
    shifted = shifted + [0] * (5 - len(shifted))
    R, Qd, P = shifted[0], shifted[1], shifted[2]
    candidates = []
    if Qd == 0:
        disc = rational_sqrt(P * P - 4 * R)
        if disc is not None:
            candidates.append((mpq(0), (P - disc) / 2, (P + disc) / 2))
        r = rational_sqrt(R)
        if r is not None:
            for beta in (r, -r):
                al = rational_sqrt(2 * beta - P)
                if al is not None and al != 0:
                    candidates.append((al, beta, beta))
    else:
        resolvent = [-Qd * Qd, P * P - 4 * R, 2 * P, mpq(1)]
        for z in rational_roots(resolvent):
            al = rational_sqrt(z) if z > 0 else None
            if al is None:
                continue
            beta = (al * al + P - Qd / al) / 2
            gamma = (al * al + P + Qd / al) / 2
            candidates.append((al, beta, gamma))
    for al, beta, gamma in candidates:
        f1 = [beta, al, mpq(1)]
        f2 = [gamma, -al, mpq(1)]
        if mul(f1, f2) == strip(shifted):
            # undo the shift z = x + h
            return compose_linear(f1, h)
    return None


def factor_over_q(coeffs):
    """Factor a rational polynomial into monic irreducibles over Q.

    Returns ``(leading_coefficient, [(factor, multiplicity), ...])`` with
    factors as coefficient lists sorted by (degree, coefficients).
    """
    from sympy import Poly, QQ as SQQ, Symbol

    c = strip([Q(x) for x in coeffs])
    if not c:
        raise ValueError("cannot factor the zero polynomial")
    z = Symbol("z")
    rep = [SQQ(int(v.numerator), int(v.denominator)) for v in reversed(c)]
    poly = Poly.from_list(rep, z, domain=SQQ)
    lc, factors = poly.factor_list()
    out = []
    for f, mult in factors:
        fc = [mpq(int(v.numerator), int(v.denominator)) for v in reversed(f.all_coeffs())]
        out.append((monic(fc), mult))
    out.sort(key=lambda fm: (len(fm[0]), [(v.numerator, v.denominator) for v in fm[0]]))
    return Q(c[-1]), out
