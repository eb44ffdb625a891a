"""Sparse multivariate polynomials with exact coefficients.

Exponent vectors are packed into one Python int (16 bits per variable, the
first generator in the lowest bits), so monomial multiplication is integer
addition.  Canonical order for printing and leading terms is graded
lexicographic with the first generator largest.
"""

from __future__ import annotations

from itertools import product as _product

from gmpy2 import mpq

from .numbers import (
    QQ,
    AlgebraicScalar,
    ContextMismatch,
    common_field,
    fmt_rational,
    scalar_field,
)

BITS = 16
MASK = (1 << BITS) - 1
_ONES = {}


def pack(exps) -> int:
    m = 0
    for i, e in enumerate(exps):
        if e < 0 or e > MASK // 2:
            raise OverflowError(f"exponent {e} out of range")
        m |= e << (BITS * i)
    return m


def unpack(m: int, n: int) -> tuple:
    return tuple((m >> (BITS * i)) & MASK for i in range(n))


def _ones(n):
    v = _ONES.get(n)
    if v is None:
        v = sum(1 << (BITS * i) for i in range(n))
        _ONES[n] = v
    return v


def total_degree(m: int, n: int) -> int:
    if n == 0:
        return 0
    return ((m * _ones(n)) >> (BITS * (n - 1))) & MASK


def _is_scalar(x) -> bool:
    return not isinstance(x, MultiPoly)


class PolyError(Exception):
    pass


class NotDivisible(PolyError):
    pass


class MultiPoly:
    """Immutable sparse polynomial over QQ or a NumberField."""

    __slots__ = ("gens", "field", "terms", "_hash")

    def __init__(self, gens, terms=None, field=QQ, _clean=False):
        self.gens = tuple(gens)
        self.field = field
        if terms is None:
            terms = {}
        if not _clean:
            conv = field.convert
            terms = {m: conv(c) for m, c in terms.items() if c}
            terms = {m: c for m, c in terms.items() if c}
        self.terms = terms
        self._hash = None

    # ----------------------------------------------------------- constructors
    @classmethod
    def from_dict(cls, gens, data, field=QQ):
        return cls(gens, {pack(e): c for e, c in data.items()}, field)

    @classmethod
    def const(cls, gens, c, field=None):
        if field is None:
            field = scalar_field(c)
        return cls(gens, {0: c}, field)

    @classmethod
    def var(cls, gens, name, field=QQ):
        gens = tuple(gens)
        i = gens.index(name)
        return cls(gens, {1 << (BITS * i): field.one}, field, _clean=True)

    @classmethod
    def zero(cls, gens, field=QQ):
        return cls(gens, {}, field, _clean=True)

    def _new(self, terms, field=None):
        return MultiPoly(self.gens, terms, field or self.field, _clean=True)

    def nvars(self) -> int:
        return len(self.gens)

    # ------------------------------------------------------------ coercion
    def _lift(self, other):
        """Return (self_terms, other_terms, field) in a common ring."""
        if isinstance(other, MultiPoly):
            if other.gens != self.gens:
                raise PolyError(f"generator mismatch {self.gens} vs {other.gens}")
            field = common_field(self.field, other.field)
            a = self.terms if self.field == field else _convert_terms(self.terms, field)
            b = other.terms if other.field == field else _convert_terms(other.terms, field)
            return a, b, field
        field = common_field(self.field, scalar_field(other))
        a = self.terms if self.field == field else _convert_terms(self.terms, field)
        c = field.convert(other)
        return a, ({0: c} if c else {}), field

    def to_field(self, field):
        if field == self.field:
            return self
        common_field(self.field, field)
        return MultiPoly(self.gens, _convert_terms(self.terms, field), field, _clean=True)

    # ----------------------------------------------------------- arithmetic
    def __add__(self, other):
        a, b, field = self._lift(other)
        out = dict(a)
        for m, c in b.items():
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                s = v + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return self._new(out, field)

    __radd__ = __add__

    def __neg__(self):
        return self._new({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        a, b, field = self._lift(other)
        out = dict(a)
        for m, c in b.items():
            v = out.get(m)
            if v is None:
                out[m] = -c
            else:
                s = v - c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return self._new(out, field)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_scalar(other):
            field = common_field(self.field, scalar_field(other))
            c = field.convert(other)
            if not c:
                return self._new({}, field)
            a = self.terms if self.field == field else _convert_terms(self.terms, field)
            return self._new({m: v * c for m, v in a.items()}, field)
        a, b, field = self._lift(other)
        return self._new(_mul_terms(a, b), field)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            field = common_field(self.field, scalar_field(other))
            c = field.convert(other)
            if not c:
                raise ZeroDivisionError("polynomial division by zero scalar")
            inv = 1 / c
            a = self.terms if self.field == field else _convert_terms(self.terms, field)
            return self._new({m: v * inv for m, v in a.items()}, field)
        return self.exact_div(other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power of a polynomial")
        result = self._new({0: self.field.one})
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.gens == other.gens and self.terms == other.terms
        if _is_scalar(other):
            if not other:
                return not self.terms
            return len(self.terms) == 1 and self.terms.get(0) == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.gens, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # -------------------------------------------------------------- queries
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def constant_term(self):
        return self.terms.get(0, self.field.zero)

    def coeff(self, exps):
        return self.terms.get(pack(exps), self.field.zero)

    def items(self):
        """(exponent tuple, coefficient) pairs in canonical (grlex descending) order."""
        n = len(self.gens)
        keyed = [(total_degree(m, n), unpack(m, n), c) for m, c in self.terms.items()]
        keyed.sort(key=lambda t: (t[0], t[1]), reverse=True)
        return [(e, c) for _, e, c in keyed]

    def degree(self) -> int:
        if not self.terms:
            return -1
        n = len(self.gens)
        return max(total_degree(m, n) for m in self.terms)

    def min_degree(self) -> int:
        """Lowest total degree among the terms (the order at the origin)."""
        if not self.terms:
            raise ValueError("zero polynomial has no order")
        n = len(self.gens)
        return min(total_degree(m, n) for m in self.terms)

    def degree_in(self, var) -> int:
        if not self.terms:
            return -1
        i = self.gens.index(var)
        sh = BITS * i
        return max((m >> sh) & MASK for m in self.terms)

    def min_degree_in(self, var) -> int:
        i = self.gens.index(var)
        sh = BITS * i
        return min((m >> sh) & MASK for m in self.terms)

    def involves(self, var) -> bool:
        i = self.gens.index(var)
        sh = BITS * i
        return any((m >> sh) & MASK for m in self.terms)

    def variables(self):
        return [g for g in self.gens if self.involves(g)]

    def homogeneous_part(self, k: int) -> "MultiPoly":
        n = len(self.gens)
        return self._new({m: c for m, c in self.terms.items() if total_degree(m, n) == k})

    def truncate(self, order: int) -> "MultiPoly":
        """Drop all terms of total degree >= order."""
        n = len(self.gens)
        return self._new({m: c for m, c in self.terms.items() if total_degree(m, n) < order})

    def truncate_in(self, var, order: int) -> "MultiPoly":
        i = self.gens.index(var)
        sh = BITS * i
        return self._new({m: c for m, c in self.terms.items() if ((m >> sh) & MASK) < order})

    def leading_term(self):
        """(packed monomial, coefficient) of the grlex-largest term."""
        n = len(self.gens)
        m = max(self.terms, key=lambda m: (total_degree(m, n), unpack(m, n)))
        return m, self.terms[m]

    # ------------------------------------------------------- restructuring
    def coefficients_in(self, var) -> dict:
        """Map k -> coefficient polynomial of var^k (var eliminated, same gens)."""
        i = self.gens.index(var)
        sh = BITS * i
        clear = ~(MASK << sh)
        out = {}
        for m, c in self.terms.items():
            k = (m >> sh) & MASK
            out.setdefault(k, {})[m & clear] = c
        return {k: self._new(t) for k, t in out.items()}

    def as_list_in(self, var):
        """Coefficient polynomials of var^0, var^1, ... (dense list)."""
        co = self.coefficients_in(var)
        if not co:
            return []
        top = max(co)
        zero = self._new({})
        return [co.get(k, zero) for k in range(top + 1)]

    def to_univariate_list(self, var=None):
        """Dense scalar coefficient list of a polynomial in one variable."""
        if var is None:
            used = self.variables()
            if len(used) > 1:
                raise PolyError(f"polynomial is not univariate: {self}")
            var = used[0] if used else self.gens[0]
        i = self.gens.index(var)
        sh = BITS * i
        if not self.terms:
            return []
        top = self.degree_in(var)
        out = [self.field.zero] * (top + 1)
        for m, c in self.terms.items():
            if m & ~(MASK << sh):
                raise PolyError(f"polynomial involves variables other than {var}")
            out[(m >> sh) & MASK] = c
        return out

    @classmethod
    def from_univariate_list(cls, gens, var, coeffs, field=None):
        gens = tuple(gens)
        sh = BITS * gens.index(var)
        if field is None:
            field = QQ
            for c in coeffs:
                if isinstance(c, AlgebraicScalar):
                    field = c.field
                    break
        return cls(gens, {k << sh: c for k, c in enumerate(coeffs) if c}, field)

    def with_gens(self, gens) -> "MultiPoly":
        """Re-express in another generator tuple (missing variables must not occur)."""
        gens = tuple(gens)
        if gens == self.gens:
            return self
        n = len(self.gens)
        idx = []
        for i, g in enumerate(self.gens):
            if g in gens:
                idx.append(gens.index(g))
            else:
                idx.append(None)
        out = {}
        for m, c in self.terms.items():
            e = unpack(m, n)
            new = 0
            for i, k in enumerate(e):
                if k:
                    if idx[i] is None:
                        raise PolyError(f"variable {self.gens[i]} not in {gens}")
                    new |= k << (BITS * idx[i])
            out[new] = c
        return MultiPoly(gens, out, self.field, _clean=True)

    def rename(self, mapping) -> "MultiPoly":
        return MultiPoly(tuple(mapping.get(g, g) for g in self.gens), self.terms, self.field, _clean=True)

    def map_coeffs(self, fn, field=None) -> "MultiPoly":
        return MultiPoly(self.gens, {m: fn(c) for m, c in self.terms.items()}, field or self.field)

    # ------------------------------------------------------------ calculus
    def diff(self, var) -> "MultiPoly":
        i = self.gens.index(var)
        sh = BITS * i
        unit = 1 << sh
        out = {}
        for m, c in self.terms.items():
            k = (m >> sh) & MASK
            if k:
                out[m - unit] = c * k
        return self._new(out)

    # -------------------------------------------------------- substitution
    def evaluate(self, values):
        """Evaluate at a full assignment {var: scalar}; returns a scalar."""
        n = len(self.gens)
        vals = [values[g] for g in self.gens]
        field = common_field(self.field, *[scalar_field(v) for v in vals])
        total = field.zero
        powcache = [dict() for _ in range(n)]
        for m, c in self.terms.items():
            e = unpack(m, n)
            term = c
            for i, k in enumerate(e):
                if k:
                    p = powcache[i].get(k)
                    if p is None:
                        p = vals[i] ** k
                        powcache[i][k] = p
                    term = term * p
            total = total + term
        return total

    def subs(self, mapping, gens=None) -> "MultiPoly":
        """Simultaneous substitution var -> polynomial/scalar.

        Images must live on ``gens`` (default: this polynomial's gens).
        Variables not in ``mapping`` map to themselves.
        """
        gens = self.gens if gens is None else tuple(gens)
        n = len(self.gens)
        field = self.field
        images = []
        for g in self.gens:
            if g in mapping:
                img = mapping[g]
                if not isinstance(img, MultiPoly):
                    img = MultiPoly.const(gens, img)
                elif img.gens != gens:
                    img = img.with_gens(gens)
            else:
                img = MultiPoly.var(gens, g)
            images.append(img)
            field = common_field(field, img.field)
        # fast path: every image is a monomial with coefficient 1
        mono = []
        for img in images:
            if len(img.terms) == 1:
                (mm, cc), = img.terms.items()
                if cc == 1:
                    mono.append(mm)
                    continue
            mono = None
            break
        if mono is not None:
            out = {}
            for m, c in self.terms.items():
                e = unpack(m, n)
                new = 0
                for i, k in enumerate(e):
                    if k:
                        new += mono[i] * k
                v = out.get(new)
                out[new] = c if v is None else v + c
            return MultiPoly(gens, out, field).to_field(field)
        powcache = [dict() for _ in range(n)]
        acc = {}
        for m, c in self.terms.items():
            e = unpack(m, n)
            term = {0: field.convert(c)}
            for i, k in enumerate(e):
                if k:
                    p = powcache[i].get(k)
                    if p is None:
                        p = _pow_terms(images[i].to_field(field).terms, k, field)
                        powcache[i][k] = p
                    term = _mul_terms(term, p)
            for mm, cc in term.items():
                v = acc.get(mm)
                acc[mm] = cc if v is None else v + cc
        return MultiPoly(gens, acc, field)

    def translate(self, shifts) -> "MultiPoly":
        """f(x + a, y + b, ...) for shifts {var: scalar}."""
        mapping = {}
        for g, a in shifts.items():
            if a:
                mapping[g] = MultiPoly.var(self.gens, g) + a
        if not mapping:
            return self
        return self.subs(mapping)

    # ------------------------------------------------------------- division
    def exact_div(self, other) -> "MultiPoly":
        q, r = self.divmod(other)
        if r:
            raise NotDivisible(f"{other} does not divide {self}")
        return q

    def divides(self, other) -> bool:
        _, r = other.divmod(self)
        return not r

    def divmod(self, other):
        """Multivariate division by one polynomial (grlex); exact iff remainder 0.

        The remainder is zero exactly when ``other`` divides ``self``.
        """
        if _is_scalar(other):
            return self / other, self._new({})
        if other.gens != self.gens:
            raise PolyError("generator mismatch in division")
        if not other.terms:
            raise ZeroDivisionError("division by zero polynomial")
        field = common_field(self.field, other.field)
        n = len(self.gens)
        f = dict(_convert_terms(self.terms, field) if self.field != field else self.terms)
        g = other.terms if other.field == field else _convert_terms(other.terms, field)
        key = lambda m: (total_degree(m, n), unpack(m, n))
        gm = max(g, key=key)
        gc = g[gm]
        ginv = 1 / gc
        ge = unpack(gm, n)
        gtail = [(m, c) for m, c in g.items() if m != gm]
        quo = {}
        rem = {}
        import heapq

        heap = [(tuple(-x for x in (total_degree(m, n),) + unpack(m, n)), m) for m in f]
        heapq.heapify(heap)
        while heap:
            _, m = heapq.heappop(heap)
            c = f.get(m)
            if c is None:
                continue
            del f[m]
            if not c:
                continue
            e = unpack(m, n)
            if all(a >= b for a, b in zip(e, ge)):
                qm = m - gm
                qc = c * ginv
                quo[qm] = qc
                for tm, tc in gtail:
                    nm = qm + tm
                    v = f.get(nm)
                    if v is None:
                        f[nm] = -qc * tc
                        heapq.heappush(heap, (tuple(-x for x in (total_degree(nm, n),) + unpack(nm, n)), nm))
                    else:
                        s = v - qc * tc
                        if s:
                            f[nm] = s
                        else:
                            del f[nm]
            else:
                rem[m] = c
        return self._new(quo, field), self._new(rem, field)

    def monomial_content(self):
        """Exponent tuple of the largest monomial dividing every term."""
        n = len(self.gens)
        if not self.terms:
            return (0,) * n
        it = iter(self.terms)
        low = list(unpack(next(it), n))
        for m in it:
            e = unpack(m, n)
            for i in range(n):
                if e[i] < low[i]:
                    low[i] = e[i]
        return tuple(low)

    def divide_monomial(self, exps) -> "MultiPoly":
        mm = pack(exps)
        n = len(self.gens)
        for m in self.terms:
            if any(a < b for a, b in zip(unpack(m, n), exps)):
                raise NotDivisible("monomial does not divide polynomial")
        return self._new({m - mm: c for m, c in self.terms.items()})

    def primitive(self) -> "MultiPoly":
        """Scale so the leading coefficient is 1."""
        if not self.terms:
            return self
        _, c = self.leading_term()
        return self / c

    # -------------------------------------------------------------- output
    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.items():
            mono = "*".join(
                (g if k == 1 else f"{g}^{k}") for g, k in zip(self.gens, e) if k
            )
            if isinstance(c, AlgebraicScalar) and not c.is_rational():
                cs = f"({c})"
                parts.append(f"{cs}*{mono}" if mono else cs)
                continue
            cq = c.to_rational() if isinstance(c, AlgebraicScalar) else c
            neg = cq < 0
            a = -cq if neg else cq
            if mono:
                term = mono if a == 1 else f"{fmt_rational(a)}*{mono}"
            else:
                term = fmt_rational(a)
            parts.append(("-" if neg else "+", term))
        out = []
        for i, p in enumerate(parts):
            if isinstance(p, str):
                out.append(p if i == 0 else "+ " + p)
            else:
                sign, term = p
                if i == 0:
                    out.append(("-" if sign == "-" else "") + term)
                else:
                    out.append(f"{sign} {term}")
        return " ".join(out)

    def __repr__(self):
        return f"MultiPoly({self.gens}, {self})"


def _convert_terms(terms, field):
    conv = field.convert
    return {m: conv(c) for m, c in terms.items()}


def _mul_terms(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = {}
    get = out.get
    for m2, c2 in b.items():
        for m1, c1 in a.items():
            m = m1 + m2
            v = get(m)
            if v is None:
                out[m] = c1 * c2
            else:
                out[m] = v + c1 * c2
    return {m: c for m, c in out.items() if c}


def _pow_terms(t, k, field):
    result = {0: field.one}
    base = t
    while k:
        if k & 1:
            result = _mul_terms(result, base)
        k >>= 1
        if k:
            base = _mul_terms(base, base)
    return result


def poly_ring(*names, field=QQ):
    """Convenience: return the generator polynomials for ``names``."""
    return tuple(MultiPoly.var(names, g, field) for g in names)


def lex_exponents(gens, max_degree):
    """All exponent tuples of total degree <= max_degree, grlex ascending."""
    n = len(gens)
    out = [e for e in _product(range(max_degree + 1), repeat=n) if sum(e) <= max_degree]
    out.sort(key=lambda e: (sum(e), e))
    return out


__all__ = [
    "MultiPoly",
    "PolyError",
    "NotDivisible",
    "poly_ring",
    "pack",
    "unpack",
    "total_degree",
    "lex_exponents",
    "ContextMismatch",
    "mpq",
]
