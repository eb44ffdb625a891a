"""Truncated univariate power series with exact coefficients.

A ``TruncSeries`` knows its coefficients c_0..c_N and nothing beyond; asking
for c_k with k > N raises ``TruncationError`` instead of returning zero.
Coefficients may be scalars or MultiPoly (symbolic parameters).
"""

from __future__ import annotations

from gmpy2 import mpq

from .poly import MultiPoly


class TruncationError(Exception):
    """A coefficient beyond the known truncation was requested."""


def _is_zero(c) -> bool:
    return not c


class TruncSeries:
    __slots__ = ("var", "coeffs", "N")

    def __init__(self, coeffs, N: int, var: str = "t"):
        if N < 0:
            raise ValueError("truncation order must be non-negative")
        c = [mpq(v) if isinstance(v, int) else v for v in list(coeffs)[: N + 1]]
        zero = _zero_like(c)
        c.extend([zero] * (N + 1 - len(c)))
        self.coeffs = tuple(c)
        self.N = N
        self.var = var

    @classmethod
    def from_poly(cls, p, N: int, var: str = "t"):
        """Series of a univariate polynomial (MultiPoly or coefficient list)."""
        if isinstance(p, MultiPoly):
            p = p.to_univariate_list(var if var in p.gens else None)
        return cls(list(p), N, var)

    def __getitem__(self, k: int):
        if k < 0:
            return _zero_like(self.coeffs)
        if k > self.N:
            raise TruncationError(f"coefficient {k} requested beyond truncation {self.N}")
        return self.coeffs[k]

    def truncate(self, N: int) -> "TruncSeries":
        if N > self.N:
            raise TruncationError("cannot extend a truncated series")
        return TruncSeries(self.coeffs[: N + 1], N, self.var)

    def _other(self, other):
        if isinstance(other, TruncSeries):
            return other
        return TruncSeries([other], self.N, self.var)

    def __add__(self, other):
        o = self._other(other)
        N = min(self.N, o.N)
        return TruncSeries([self.coeffs[i] + o.coeffs[i] for i in range(N + 1)], N, self.var)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries([-c for c in self.coeffs], self.N, self.var)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return TruncSeries([c * other for c in self.coeffs], self.N, self.var)
        N = min(self.N, other.N)
        a, b = self.coeffs, other.coeffs
        zero = _zero_like(a)
        out = [zero] * (N + 1)
        nz_a = [i for i in range(N + 1) if a[i]]
        nz_b = [j for j in range(N + 1) if b[j]]
        for i in nz_a:
            ai = a[i]
            for j in nz_b:
                if i + j > N:
                    break
                out[i + j] = out[i + j] + ai * b[j]
        return TruncSeries(out, N, self.var)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = TruncSeries([_one_like(self.coeffs)], self.N, self.var)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def inverse(self) -> "TruncSeries":
        """Multiplicative inverse; the constant term must be an invertible scalar."""
        c0 = self.coeffs[0]
        if isinstance(c0, MultiPoly):
            if not c0.is_constant() or not c0:
                raise ZeroDivisionError("constant term not an invertible scalar")
            inv0 = 1 / c0.constant_term()
        else:
            if not c0:
                raise ZeroDivisionError("series with zero constant term is not invertible")
            inv0 = 1 / c0
        out = [self.coeffs[0] * 0 + inv0]
        for k in range(1, self.N + 1):
            acc = self.coeffs[k] * out[0]
            for j in range(1, k):
                cj = self.coeffs[k - j]
                if cj:
                    acc = acc + cj * out[j]
            out.append(-acc * inv0)
        return TruncSeries(out, self.N, self.var)

    def __truediv__(self, other):
        if isinstance(other, TruncSeries):
            return self * other.inverse()
        return self * (1 / other)

    def shift_down(self, k: int) -> "TruncSeries":
        """Divide by var^k; the first k coefficients must vanish."""
        for i in range(k):
            if self.coeffs[i]:
                raise ValueError("series not divisible by the requested power")
        return TruncSeries(self.coeffs[k:], self.N - k, self.var)

    def shift_up(self, k: int) -> "TruncSeries":
        zero = _zero_like(self.coeffs)
        return TruncSeries([zero] * k + list(self.coeffs), self.N + k, self.var)

    def derivative(self) -> "TruncSeries":
        if self.N == 0:
            raise TruncationError("derivative of an order-0 truncation is unknown")
        return TruncSeries([self.coeffs[i] * i for i in range(1, self.N + 1)], self.N - 1, self.var)

    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        """self(inner(t)); inner must have zero constant term."""
        if inner.coeffs[0]:
            raise ValueError("inner series must vanish at the origin")
        N = min(self.N, inner.N)
        acc = TruncSeries([self.coeffs[N]], N, self.var)
        for k in range(N - 1, -1, -1):
            acc = acc * inner + self.coeffs[k]
        return acc.truncate(N) if acc.N > N else acc

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, TruncSeries):
            N = min(self.N, other.N)
            return all(self.coeffs[i] == other.coeffs[i] for i in range(N + 1))
        return NotImplemented

    def __hash__(self):
        return hash((self.N, self.coeffs))

    def __repr__(self):
        terms = [f"({c})*{self.var}^{i}" for i, c in enumerate(self.coeffs) if c]
        return "TruncSeries(" + (" + ".join(terms) or "0") + f" + O({self.var}^{self.N + 1}))"


def _zero_like(coeffs):
    for c in coeffs:
        if isinstance(c, MultiPoly):
            return MultiPoly.zero(c.gens, c.field)
    for c in coeffs:
        return c * 0
    return mpq(0)


def _one_like(coeffs):
    for c in coeffs:
        if isinstance(c, MultiPoly):
            return MultiPoly.const(c.gens, 1, c.field)
    for c in coeffs:
        return c * 0 + 1
    return mpq(1)


def vanishing_order(s) -> int:
    """Smallest exponent with a nonzero coefficient.

    For a TruncSeries whose known coefficients all vanish this raises
    ``TruncationError`` (the caller must raise N); it never returns N + 1.
    """
    if isinstance(s, TruncSeries):
        for i, c in enumerate(s.coeffs):
            if c:
                return i
        raise TruncationError(f"order exceeds truncation {s.N}")
    if isinstance(s, MultiPoly):
        if not s:
            raise ValueError("zero polynomial has no vanishing order")
        return s.min_degree()
    for i, c in enumerate(s):
        if c:
            return i
    raise ValueError("zero polynomial has no vanishing order")


def residue_at_origin(num, den):
    """Coefficient of var^-1 in the Laurent expansion of num/den at 0."""
    if not isinstance(den, TruncSeries):
        k0 = vanishing_order(den)
        den = TruncSeries.from_poly(den, max(_poly_len(den), 2 * k0 + 1))
    if not isinstance(num, TruncSeries):
        num = TruncSeries.from_poly(num, max(_poly_len(num), den.N))
    k = vanishing_order(den)
    # num/den = var^-k * num / u with u = den / var^k a unit
    if k == 0:
        return _zero_like(num.coeffs)
    needed = k - 1
    if num.N < needed or den.N - k < needed:
        raise TruncationError("insufficient truncation to determine the residue")
    u = den.shift_down(k).truncate(needed)
    q = num.truncate(needed) * u.inverse()
    return q[needed]


def _poly_len(p):
    if isinstance(p, MultiPoly):
        return max(p.degree(), 0)
    if isinstance(p, (list, tuple)):
        return max(len(p) - 1, 0)
    return 0


def implicit_series_solve(F: MultiPoly, N: int, x: str = "x", t: str = "t") -> TruncSeries:
    """The series x(t) with F(x(t), t) = 0 mod t^(N+1), x(0) = 0.

    Requires F(0, 0) = 0 and dF/dx(0, 0) a nonzero scalar.  Other generators
    of F are symbolic parameters; the coefficients of x(t) are MultiPoly in
    them.  Newton iteration doubles the precision each step.
    """
    gens = F.gens
    at0 = {g: 0 for g in (x, t)}
    F0 = F.subs(at0)
    if F0:
        raise ValueError("implicit function hypothesis violated: F(0,0) != 0")
    Fx = F.diff(x)
    fx0 = Fx.subs(at0)
    if not fx0 or not fx0.is_constant():
        raise ValueError("implicit function hypothesis violated: dF/dx(0,0) is not a nonzero scalar")
    params = tuple(g for g in gens if g not in (x, t))
    zero = MultiPoly.zero(params, F.field)

    def coeff_series(P):
        """P as a polynomial in x whose coefficients are series in t."""
        out = {}
        for kx, cx in P.coefficients_in(x).items():
            ct = cx.coefficients_in(t)
            top = max(ct)
            lst = [zero] * (top + 1)
            for kt, c in ct.items():
                lst[kt] = c.with_gens(params) if params else c.with_gens(())
            out[kx] = lst
        return out

    Fc = coeff_series(F)
    Fxc = coeff_series(Fx)

    def evaluate(coeffs, xs, prec):
        acc = TruncSeries([zero], prec, t)
        xpow = TruncSeries([zero + 1], prec, t)
        for k in range(max(coeffs) + 1):
            if k in coeffs:
                acc = acc + TruncSeries(coeffs[k], prec, t) * xpow
            if k < max(coeffs):
                xpow = xpow * xs
        return acc

    xs = TruncSeries([zero], N, t)
    acc = 1  # x is known modulo t^acc
    while acc < N + 1:
        acc = min(2 * acc, N + 1)
        prec = acc - 1
        xcur = TruncSeries(xs.coeffs[: prec + 1], prec, t)
        val = evaluate(Fc, xcur, prec)
        der = evaluate(Fxc, xcur, prec)
        xcur = xcur - val * der.inverse()
        xs = TruncSeries(list(xcur.coeffs), N, t)
    return xs
