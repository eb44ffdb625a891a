"""Coefficient fields: the rationals and simple algebraic extensions Q(theta).

Rationals are ``gmpy2.mpq`` values (always in lowest terms with a positive
denominator).  Elements of Q(theta) are :class:`AlgebraicScalar` instances
tied to one :class:`NumberField`; arithmetic between two different fields
raises :class:`ContextMismatch`.
"""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from gmpy2 import mpq, mpz


class ExactAlgError(Exception):
    """Base class for errors raised by the exact arithmetic layer."""


class ContextMismatch(ExactAlgError):
    pass


class ReducibleMinimalPolynomial(ExactAlgError):
    pass


class UnsupportedField(ExactAlgError):
    """A computation needs an extension the engine does not support."""


def Q(value) -> mpq:
    """Convert ints, Fractions, mpq and ``"p/q"`` strings to a rational."""
    if isinstance(value, type(mpq())):
        return value
    if isinstance(value, (int, type(mpz()))):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/")
            if int(den) == 0:
                raise ZeroDivisionError(value)
            return mpq(int(num), int(den))
        return mpq(int(text))
    if isinstance(value, AlgebraicScalar):
        return value.to_rational()
    raise TypeError(f"cannot convert {value!r} to a rational")


def is_rational(value) -> bool:
    return isinstance(value, (int, type(mpq()), type(mpz()), Fraction))


def rational_sqrt(q) -> mpq | None:
    """Exact square root of a non-negative rational, or None."""
    q = Q(q)
    if q < 0:
        return None
    n, d = int(q.numerator), int(q.denominator)
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return mpq(rn, rd)
    return None


def rational_nth_root(q, n: int) -> mpq | None:
    q = Q(q)
    if q == 0:
        return mpq(0)
    sign = 1
    if q < 0:
        if n % 2 == 0:
            return None
        sign, q = -1, -q

    def iroot(m):
        r = int(round(float(m) ** (1.0 / n))) if m < 2**1000 else int(m ** (1.0 / n))
        for cand in (r - 1, r, r + 1):
            if cand >= 0 and cand**n == m:
                return cand
        lo, hi = 0, 1
        while hi**n <= m:
            hi *= 2
        while lo < hi:
            mid = (lo + hi) // 2
            if mid**n < m:
                lo = mid + 1
            else:
                hi = mid
        return lo if lo**n == m else None

    a, b = iroot(int(q.numerator)), iroot(int(q.denominator))
    if a is None or b is None:
        return None
    return sign * mpq(a, b)


def fmt_rational(q) -> str:
    q = Q(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


class RationalField:
    """The field Q; a singleton (``QQ``)."""

    degree = 1
    name = "QQ"

    def convert(self, value):
        if isinstance(value, AlgebraicScalar):
            return value.to_rational()
        return Q(value)

    @property
    def zero(self):
        return mpq(0)

    @property
    def one(self):
        return mpq(1)

    def __repr__(self):
        return "QQ"

    def __reduce__(self):
        return (_get_qq, ())


QQ = RationalField()


def _get_qq():
    return QQ


def _poly_mulmod(a, b, modulus):
    """Product of coefficient lists a*b reduced modulo a monic ``modulus``."""
    n = len(modulus) - 1
    prod = [mpq(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    prod[i + j] += ai * bj
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for j in range(n):
                prod[k - n + j] -= c * modulus[j]
        prod[k] = mpq(0)
    out = prod[:n] + [mpq(0)] * (n - len(prod[:n]))
    return tuple(out[:n])


def _strip(c):
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return c


def _poly_divmod(a, b):
    a = _strip(a)
    b = _strip(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [mpq(0)] * max(len(a) - len(b) + 1, 1)
    inv = 1 / b[-1]
    while len(a) >= len(b) and a:
        shift = len(a) - len(b)
        c = a[-1] * inv
        q[shift] = c
        for j, bj in enumerate(b):
            a[shift + j] -= c * bj
        a = _strip(a)
    return q, a


def _rational_roots_small(coeffs):
    """Rational roots of a small-degree polynomial given by rational coefficients."""
    from .univariate import rational_roots

    return rational_roots(list(coeffs))


def check_irreducible(coeffs) -> None:
    """Raise ReducibleMinimalPolynomial unless the monic polynomial (low->high
    coefficients, degree 2..4) is irreducible over Q."""
    deg = len(coeffs) - 1
    if deg < 2:
        raise ReducibleMinimalPolynomial("minimal polynomial must have degree >= 2")
    if deg > 4:
        raise UnsupportedField(
            "nested/large extensions unsupported at desk scale (degree > 4)"
        )
    if _rational_roots_small(coeffs):
        raise ReducibleMinimalPolynomial(f"polynomial {list(coeffs)} has a rational root")
    if deg == 4:
        from .univariate import quartic_quadratic_factor

        if quartic_quadratic_factor(list(coeffs)) is not None:
            raise ReducibleMinimalPolynomial(
                f"quartic {list(coeffs)} splits into rational quadratics"
            )


class NumberField:
    """Q(theta) with theta a root of a monic irreducible polynomial of degree 2..4.

    ``minpoly`` is the coefficient list, constant term first.
    """

    def __init__(self, minpoly, name: str = "theta", check: bool = True):
        coeffs = [Q(c) for c in minpoly]
        coeffs = _strip(coeffs)
        if not coeffs or coeffs[-1] != 1:
            raise ValueError("minimal polynomial must be monic")
        if check:
            check_irreducible(coeffs)
        self.minpoly = tuple(coeffs)
        self.degree = len(coeffs) - 1
        self.name = name
        self._key = (self.minpoly, name)

    def __eq__(self, other):
        return isinstance(other, NumberField) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"NumberField({self.minpoly_str()})"

    def minpoly_str(self) -> str:
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.minpoly[k]
            if not c:
                continue
            mono = "" if k == 0 else (self.name if k == 1 else f"{self.name}^{k}")
            if mono and c == 1:
                term = mono
            elif mono and c == -1:
                term = "-" + mono
            elif mono:
                term = f"{fmt_rational(c)}*{mono}"
            else:
                term = fmt_rational(c)
            parts.append(term)
        return " + ".join(parts).replace("+ -", "- ")

    def convert(self, value) -> "AlgebraicScalar":
        if isinstance(value, AlgebraicScalar):
            if value.field != self:
                raise ContextMismatch(f"{value.field!r} vs {self!r}")
            return value
        c = [mpq(0)] * self.degree
        c[0] = Q(value)
        return AlgebraicScalar(self, tuple(c))

    @property
    def zero(self):
        return AlgebraicScalar(self, (mpq(0),) * self.degree)

    @property
    def one(self):
        return self.convert(1)

    @property
    def gen(self) -> "AlgebraicScalar":
        c = [mpq(0)] * self.degree
        c[1] = mpq(1)
        return AlgebraicScalar(self, tuple(c))

    def element(self, coeffs) -> "AlgebraicScalar":
        c = [Q(x) for x in coeffs] + [mpq(0)] * self.degree
        if any(c[self.degree:]):
            _, c = _poly_divmod(c, list(self.minpoly))
            c = c + [mpq(0)] * self.degree
        return AlgebraicScalar(self, tuple(c[: self.degree]))


def adjoin_root(minpoly, name: str = "theta") -> NumberField:
    """Return the extension Q(theta), theta a root of ``minpoly``.

    ``minpoly`` is either a coefficient list (constant term first) or a
    univariate MultiPoly over Q; a non-monic input is scaled to monic.
    """
    from .poly import MultiPoly

    if isinstance(minpoly, MultiPoly):
        if len(minpoly.gens) != 1:
            raise ValueError("minimal polynomial must be univariate")
        coeffs = minpoly.to_univariate_list(minpoly.gens[0])
        coeffs = [Q(c) for c in coeffs]
    else:
        coeffs = [Q(c) for c in minpoly]
    coeffs = _strip(coeffs)
    if not coeffs:
        raise ValueError("zero polynomial")
    lead = coeffs[-1]
    coeffs = [c / lead for c in coeffs]
    return NumberField(coeffs, name=name)


def _foreign(other) -> bool:
    """Polynomials and series handle scalar arithmetic themselves."""
    return hasattr(other, "terms") or hasattr(other, "coeffs") and not isinstance(other, AlgebraicScalar)


class AlgebraicScalar:
    """An element of a NumberField, stored as a coefficient vector in theta."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field: NumberField, coeffs):
        self.field = field
        self.coeffs = coeffs

    def _coerce(self, other):
        if isinstance(other, AlgebraicScalar):
            if other.field != self.field:
                raise ContextMismatch(f"cannot mix {self.field!r} and {other.field!r}")
            return other.coeffs
        c = [mpq(0)] * self.field.degree
        c[0] = Q(other)
        return c

    def __add__(self, other):
        if _foreign(other):
            return NotImplemented
        o = self._coerce(other)
        return AlgebraicScalar(self.field, tuple(a + b for a, b in zip(self.coeffs, o)))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicScalar(self.field, tuple(-a for a in self.coeffs))

    def __sub__(self, other):
        if _foreign(other):
            return NotImplemented
        o = self._coerce(other)
        return AlgebraicScalar(self.field, tuple(a - b for a, b in zip(self.coeffs, o)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _foreign(other):
            return NotImplemented
        if not isinstance(other, AlgebraicScalar):
            q = Q(other)
            return AlgebraicScalar(self.field, tuple(a * q for a in self.coeffs))
        o = self._coerce(other)
        return AlgebraicScalar(self.field, _poly_mulmod(self.coeffs, o, self.field.minpoly))

    __rmul__ = __mul__

    def inverse(self) -> "AlgebraicScalar":
        if not self:
            raise ZeroDivisionError("inverse of zero in number field")
        # extended Euclid: s*a + t*m = 1
        m = list(self.field.minpoly)
        r0, r1 = m, _strip(self.coeffs)
        s0, s1 = [mpq(0)], [mpq(1)]
        while len(r1) > 1:
            q, r = _poly_divmod(r0, r1)
            qs = [mpq(0)] * (len(q) + len(s1))
            for i, qi in enumerate(q):
                for j, sj in enumerate(s1):
                    qs[i + j] += qi * sj
            s2 = [
                (s0[i] if i < len(s0) else 0) - (qs[i] if i < len(qs) else 0)
                for i in range(max(len(s0), len(qs)))
            ]
            r0, r1, s0, s1 = r1, r, s1, _strip(s2) or [mpq(0)]
        if not r1:
            raise ZeroDivisionError("element not invertible (minimal polynomial reducible?)")
        c = r1[0]
        return self.field.element([x / c for x in s1])

    def __truediv__(self, other):
        if isinstance(other, AlgebraicScalar):
            return self * other.inverse()
        q = Q(other)
        if q == 0:
            raise ZeroDivisionError("division by zero")
        return AlgebraicScalar(self.field, tuple(a / q for a in self.coeffs))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.field.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, AlgebraicScalar):
            return self.field == other.field and self.coeffs == other.coeffs
        if is_rational(other):
            return self.coeffs[0] == other and not any(self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        if not any(self.coeffs[1:]):
            return hash(self.coeffs[0])
        return hash((self.field, self.coeffs))

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_rational(self) -> mpq:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return self.coeffs[0]

    def _mult_matrix(self):
        n = self.field.degree
        cols = []
        basis = [mpq(0)] * n
        for k in range(n):
            e = list(basis)
            e[k] = mpq(1)
            cols.append(_poly_mulmod(self.coeffs, e, self.field.minpoly))
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def trace(self) -> mpq:
        m = self._mult_matrix()
        return sum((m[i][i] for i in range(len(m))), mpq(0))

    def norm(self) -> mpq:
        m = [row[:] for row in self._mult_matrix()]
        n = len(m)
        det = mpq(1)
        for col in range(n):
            piv = next((r for r in range(col, n) if m[r][col]), None)
            if piv is None:
                return mpq(0)
            if piv != col:
                m[col], m[piv] = m[piv], m[col]
                det = -det
            det *= m[col][col]
            for r in range(col + 1, n):
                f = m[r][col] / m[col][col]
                if f:
                    for c in range(col, n):
                        m[r][c] -= f * m[col][c]
        return det

    def conjugate(self) -> "AlgebraicScalar":
        """The Galois conjugate in a quadratic field (theta -> -m1 - theta)."""
        if self.field.degree != 2:
            raise UnsupportedField("conjugation is only available in quadratic fields")
        a, b = self.coeffs
        m1 = self.field.minpoly[1]
        # a + b*theta' with theta' = -m1 - theta
        return AlgebraicScalar(self.field, (a - b * m1, -b))

    def __repr__(self):
        return f"AlgebraicScalar({self})"

    def __str__(self):
        name = self.field.name
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else (name if k == 1 else f"{name}^{k}")
            if mono and c == 1:
                parts.append(mono)
            elif mono and c == -1:
                parts.append("-" + mono)
            elif mono:
                parts.append(f"{fmt_rational(c)}*{mono}")
            else:
                parts.append(fmt_rational(c))
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")


def fmt_scalar(value) -> str:
    if isinstance(value, AlgebraicScalar):
        if value.is_rational():
            return fmt_rational(value.coeffs[0])
        return f"[{value}]"
    return fmt_rational(value)


def scalar_field(value):
    return value.field if isinstance(value, AlgebraicScalar) else QQ


def common_field(*fields):
    """The common coefficient field of several fields (QQ embeds everywhere)."""
    result = QQ
    for f in fields:
        if f is QQ or f == QQ:
            continue
        if result is QQ:
            result = f
        elif result != f:
            raise ContextMismatch(f"cannot mix {result!r} and {f!r}")
    return result
