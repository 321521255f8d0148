"""Sparse multivariate polynomial and rational-function arithmetic over GF(2).

A polynomial is a set of monomials: every nonzero coefficient equals 1, so
addition is symmetric difference of term sets and p + p = 0.  Monomials are
packed into Python integers, with variable j occupying a 16-bit exponent
field at bits [16*j, 16*j + 16).  Monomial multiplication is then a single
integer addition, and squaring doubles every field at once.

Rational functions are kept as num/den pairs that are NOT reduced to lowest
terms (no multivariate GCD here); equality is decided by cross-multiplication.
Only monomial content and exact-quotient cancellation are applied, which is
enough to keep desk-scale computations small.
"""

from __future__ import annotations

import itertools
import os

if os.environ.get("QLQ_PURE"):
    _kernel_mul = _kernel_div = None
else:
    try:
        from ._kernel import poly_divexact_packed as _kernel_div
        from ._kernel import poly_mul_packed as _kernel_mul
    except ImportError:
        _kernel_mul = _kernel_div = None

EXP_BITS = 16
EXP_MASK = (1 << EXP_BITS) - 1
_U63 = 1 << 63


class DivisionByZero(ZeroDivisionError):
    """Inversion or division of/by the zero element."""


class DenominatorZero(ArithmeticError):
    """A denominator vanished at an evaluation point; resample the point."""


def pack_monomial(exps):
    """Pack an exponent sequence into a single integer key."""
    m = 0
    for j, e in enumerate(exps):
        if e:
            if e > EXP_MASK:
                raise OverflowError("exponent %d exceeds packing width" % e)
            m |= e << (EXP_BITS * j)
    return m


def unpack_monomial(m, arity):
    """Inverse of pack_monomial."""
    return tuple((m >> (EXP_BITS * j)) & EXP_MASK for j in range(arity))


def _half_mask(arity):
    mask = 0
    for j in range(arity):
        mask |= (EXP_MASK >> 1) << (EXP_BITS * j)
    return mask


def _total_degree(m, arity):
    d = 0
    for j in range(arity):
        d += (m >> (EXP_BITS * j)) & EXP_MASK
    return d


def _grlex_key(m, arity):
    # graded-lex: first by total degree, then by exponent vector
    return (_total_degree(m, arity), unpack_monomial(m, arity))


class Poly2:
    """Multivariate polynomial over GF(2) as a frozenset of packed monomials."""

    __slots__ = ("terms", "arity")

    def __init__(self, terms, arity):
        self.terms = frozenset(terms)
        self.arity = arity

    @classmethod
    def zero(cls, arity):
        return cls((), arity)

    @classmethod
    def one(cls, arity):
        return cls((0,), arity)

    @classmethod
    def var(cls, j, arity):
        if not 0 <= j < arity:
            raise IndexError("variable index out of range")
        return cls((1 << (EXP_BITS * j),), arity)

    @classmethod
    def monomial(cls, exps, arity):
        return cls((pack_monomial(exps),), arity)

    def is_zero(self):
        return not self.terms

    def is_one(self):
        return self.terms == frozenset((0,))

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        return isinstance(other, Poly2) and self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __add__(self, other):
        return Poly2(self.terms ^ other.terms, max(self.arity, other.arity))

    def __mul__(self, other):
        if not self.terms or not other.terms:
            return Poly2.zero(max(self.arity, other.arity))
        if self.terms == frozenset((0,)):
            return Poly2(other.terms, max(self.arity, other.arity))
        if other.terms == frozenset((0,)):
            return Poly2(self.terms, max(self.arity, other.arity))
        arity = max(self.arity, other.arity)
        a, b = self.terms, other.terms
        if len(a) > len(b):
            a, b = b, a
        if (_kernel_mul is not None and arity <= 4 and len(a) * len(b) >= 96
                and _fits_u63(self, other)):
            return Poly2(_kernel_mul(list(a), list(b)), arity)
        acc = set()
        add = acc.add
        remove = acc.remove
        for t1 in a:
            for t2 in b:
                t = t1 + t2
                if t in acc:
                    remove(t)
                else:
                    add(t)
        return Poly2(acc, arity)

    def square(self):
        # char 2: (sum of monomials)^2 = sum of squared monomials, and
        # doubling a packed key doubles every 16-bit exponent field.
        return Poly2((2 * t for t in self.terms), self.arity)

    def embed(self, arity):
        """Reinterpret in a tower with more variables (packing is index-stable)."""
        if arity < self.arity:
            raise ValueError("cannot shrink arity")
        return Poly2(self.terms, arity)

    def total_degree(self):
        return max((_total_degree(t, self.arity) for t in self.terms), default=0)

    def degree_in(self, j):
        sh = EXP_BITS * j
        return max(((t >> sh) & EXP_MASK for t in self.terms), default=0)

    def variables(self):
        """Indices of the variables that actually occur."""
        seen = set()
        for t in self.terms:
            j = 0
            while t:
                if t & EXP_MASK:
                    seen.add(j)
                t >>= EXP_BITS
                j += 1
        return seen

    def content(self):
        """Largest monomial dividing every term (packed key)."""
        it = iter(self.terms)
        try:
            c = next(it)
        except StopIteration:
            return 0
        for t in it:
            if c == 0:
                break
            nc = 0
            for j in range(self.arity):
                sh = EXP_BITS * j
                nc |= min((c >> sh) & EXP_MASK, (t >> sh) & EXP_MASK) << sh
            c = nc
        return c

    def divide_monomial(self, m):
        return Poly2((t - m for t in self.terms), self.arity)

    def leading_term(self):
        return max(self.terms, key=lambda t: _grlex_key(t, self.arity))

    def divexact(self, q):
        """Exact quotient self/q, or None when q does not divide exactly."""
        if not q.terms:
            raise DivisionByZero("division by zero polynomial")
        if q.is_one():
            return self
        if not self.terms:
            return self
        arity = max(self.arity, q.arity)
        if (_kernel_div is not None and arity <= 4 and len(self.terms) >= 48
                and _fits_u63(self, q)):
            out = _kernel_div(list(self.terms), list(q.terms), arity)
            return None if out is None else Poly2(out, arity)
        rem = set(self.terms)
        qt = q.terms
        qlead = q.leading_term()
        quot = set()
        arity = self.arity
        while rem:
            rlead = max(rem, key=lambda t: _grlex_key(t, arity))
            factor = rlead - qlead
            # the quotient monomial must have non-negative exponents
            for j in range(arity):
                if ((rlead >> (EXP_BITS * j)) & EXP_MASK) < ((qlead >> (EXP_BITS * j)) & EXP_MASK):
                    return None
            if factor in quot:
                quot.remove(factor)
            else:
                quot.add(factor)
            for t in qt:
                tt = t + factor
                if tt in rem:
                    rem.remove(tt)
                else:
                    rem.add(tt)
        return Poly2(quot, arity)

    def sqrt(self):
        """Square root when all exponents are even, else None."""
        half = _half_mask(self.arity)
        odd = 0
        for j in range(self.arity):
            odd |= 1 << (EXP_BITS * j)
        for t in self.terms:
            if t & odd:
                return None
        return Poly2(((t >> 1) & half for t in self.terms), self.arity)

    def square_split(self):
        """Decompose p = sum_e y^e q_e(y^2); return {parity mask e: q_e as z-poly}.

        The returned polynomials live in the square variables z_j = y_j^2,
        i.e. their packed exponents are the halved ones.
        """
        half = _half_mask(self.arity)
        out = {}
        for t in self.terms:
            par = 0
            for j in range(self.arity):
                if (t >> (EXP_BITS * j)) & 1:
                    par |= 1 << j
            key = ((t - _parity_packed(par)) >> 1) & half
            out.setdefault(par, set()).symmetric_difference_update((key,))
        return {par: Poly2(ts, self.arity) for par, ts in out.items() if ts}

    def subs(self, values):
        """Substitute variables: values maps index -> RatFunc2 (others untouched).

        Returns a RatFunc2 over the same arity.
        """
        out = RatFunc2.zero(self.arity)
        for t in self.terms:
            term = RatFunc2.one(self.arity)
            rest = 0
            for j in range(self.arity):
                e = (t >> (EXP_BITS * j)) & EXP_MASK
                if not e:
                    continue
                if j in values:
                    v = values[j]
                    for _ in range(e):
                        term = term * v
                else:
                    rest |= e << (EXP_BITS * j)
            if rest:
                term = term * RatFunc2.from_poly(Poly2((rest,), self.arity))
            out = out + term
        return out

    def eval_gf2k(self, field, point):
        """Evaluate at a GF(2^k) point: point maps variable index -> element."""
        acc = 0
        powcache = {}
        for t in self.terms:
            prod = 1
            tt, j = t, 0
            while tt:
                e = tt & EXP_MASK
                if e:
                    key = (j, e)
                    p = powcache.get(key)
                    if p is None:
                        p = field.pow(point[j], e)
                        powcache[key] = p
                    prod = field.mul(prod, p)
                tt >>= EXP_BITS
                j += 1
            acc ^= prod
        return acc

    def text(self, names):
        """Canonical text: '+'-separated monomials in descending graded-lex."""
        if not self.terms:
            return "0"
        parts = []
        for t in sorted(self.terms, key=lambda t: _grlex_key(t, self.arity), reverse=True):
            if t == 0:
                parts.append("1")
                continue
            facs = []
            for j in range(self.arity):
                e = (t >> (EXP_BITS * j)) & EXP_MASK
                if e == 1:
                    facs.append(names[j])
                elif e > 1:
                    facs.append("%s^%d" % (names[j], e))
            parts.append("*".join(facs))
        return " + ".join(parts)

    def __repr__(self):
        return "Poly2(%s)" % self.text(["y%d" % j for j in range(self.arity)])


def _fits_u63(p, q):
    """Sum of packed keys stays below 2^63 with no per-field overflow."""
    arity = max(p.arity, q.arity)
    for j in range(arity):
        if p.degree_in(j) + q.degree_in(j) > EXP_MASK:
            return False
    mp = max(p.terms, default=0)
    mq = max(q.terms, default=0)
    return mp + mq < _U63


def _parity_packed(par):
    m = 0
    j = 0
    while par:
        if par & 1:
            m |= 1 << (EXP_BITS * j)
        par >>= 1
        j += 1
    return m


def reassemble_split(parts, arity):
    """Inverse of square_split: rebuild p from {parity: z-poly}."""
    acc = set()
    for par, q in parts.items():
        off = _parity_packed(par)
        for t in q.terms:
            acc ^= {2 * t + off}
    return Poly2(acc, arity)


class RatFunc2:
    """Rational function over GF(2): num/den, equality by cross-multiplication."""

    __slots__ = ("num", "den")

    def __init__(self, num, den, normalize=True):
        if not den.terms:
            raise DivisionByZero("zero denominator")
        if normalize:
            num, den = _normalize(num, den)
        self.num = num
        self.den = den

    @classmethod
    def zero(cls, arity):
        return cls(Poly2.zero(arity), Poly2.one(arity), normalize=False)

    @classmethod
    def one(cls, arity):
        return cls(Poly2.one(arity), Poly2.one(arity), normalize=False)

    @classmethod
    def from_poly(cls, p):
        return cls(p, Poly2.one(p.arity), normalize=False)

    @property
    def arity(self):
        return max(self.num.arity, self.den.arity)

    def is_zero(self):
        return self.num.is_zero()

    def is_one(self):
        return self.num == self.den

    def __bool__(self):
        return not self.num.is_zero()

    def __eq__(self, other):
        if not isinstance(other, RatFunc2):
            return NotImplemented
        return self.num * other.den == other.num * self.den

    def __add__(self, other):
        if self.den == other.den:
            return RatFunc2(self.num + other.num, self.den)
        return RatFunc2(self.num * other.den + other.num * self.den, self.den * other.den)

    def __mul__(self, other):
        return RatFunc2(self.num * other.num, self.den * other.den)

    def inv(self):
        if self.num.is_zero():
            raise DivisionByZero("inverse of zero")
        return RatFunc2(self.den, self.num)

    def __truediv__(self, other):
        return self * other.inv()

    def square(self):
        return RatFunc2(self.num.square(), self.den.square(), normalize=False)

    def is_poly(self):
        return self.den.is_one()

    def embed(self, arity):
        return RatFunc2(self.num.embed(arity), self.den.embed(arity), normalize=False)

    def eval_gf2k(self, field, point):
        d = self.den.eval_gf2k(field, point)
        if d == 0:
            raise DenominatorZero("denominator vanished at evaluation point")
        n = self.num.eval_gf2k(field, point)
        return field.mul(n, field.inv(d))

    def subs(self, values):
        n = self.num.subs(values)
        d = self.den.subs(values)
        if d.is_zero():
            raise DenominatorZero("denominator vanished under substitution")
        return n / d

    def text(self, names):
        if self.den.is_one():
            return self.num.text(names)
        return "(%s)/(%s)" % (self.num.text(names), self.den.text(names))

    def __repr__(self):
        return "RatFunc2(%s)" % self.text(["y%d" % j for j in range(self.arity)])


def _normalize(num, den):
    if num.is_zero():
        return num, Poly2.one(den.arity)
    if num == den:
        one = Poly2.one(num.arity)
        return one, one
    # strip common monomial content
    c = 0
    nc, dc = num.content(), den.content()
    arity = max(num.arity, den.arity)
    for j in range(arity):
        sh = EXP_BITS * j
        c |= min((nc >> sh) & EXP_MASK, (dc >> sh) & EXP_MASK) << sh
    if c:
        num = num.divide_monomial(c)
        den = den.divide_monomial(c)
    # opportunistic exact cancellation of an identical polynomial factor
    if not den.is_one():
        q = num.divexact(den)
        if q is not None:
            return q, Poly2.one(num.arity)
        q = den.divexact(num)
        if q is not None:
            return Poly2.one(num.arity), q
    return num, den


def rf_arith(op, a, b=None):
    """Dispatch form of the field operations: op in {'add','mul','inv'}."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inv()
    raise ValueError("unknown operation %r" % op)


def square_split(p):
    """Module-level alias for Poly2.square_split."""
    return p.square_split()


def all_monomials_upto(arity, degree):
    """All packed monomials of total degree <= degree (test/search helper)."""
    out = []
    for exps in itertools.product(range(degree + 1), repeat=arity):
        if sum(exps) <= degree:
            out.append(pack_monomial(exps))
    return sorted(out)
