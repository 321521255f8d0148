"""Independent desk oracles for cross-checking the library.

ORACLE-A: a naive exact rank routine over GF(2)(z_1..z_m) with its own
dense fraction arithmetic (tuple-keyed polynomials, classic elimination
with division, full content normalization).  Nothing here shares code with
qlq.linalg2.

ORACLE-B: exhaustive GF(2) linear algebra over an explicit finite monomial
basis, for value-set and subfield questions about polynomial elements of
rational towers (no square roots).  Membership over the square subfield is
GF(2)-linear in the coefficients of the squared multipliers, so a brute
Gaussian solve over monomial coordinates decides it exactly once the degree
window is large enough.
"""

from __future__ import annotations

import itertools


class OPoly:
    """GF(2) polynomial as a frozenset of exponent tuples."""

    __slots__ = ("terms",)

    def __init__(self, terms):
        self.terms = frozenset(tuple(t) for t in terms)

    @classmethod
    def zero(cls):
        return cls(())

    @classmethod
    def one(cls, arity):
        return cls(((0,) * arity,))

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return self.terms == other.terms

    def __hash__(self):
        return hash(self.terms)

    def __add__(self, other):
        return OPoly(self.terms ^ other.terms)

    def __mul__(self, other):
        acc = set()
        for a in self.terms:
            for b in other.terms:
                t = tuple(x + y for x, y in zip(a, b))
                acc ^= {t}
        return OPoly(acc)

    def content(self):
        it = iter(self.terms)
        c = list(next(it))
        for t in it:
            c = [min(a, b) for a, b in zip(c, t)]
        return tuple(c)

    def strip(self, c):
        return OPoly(tuple(x - y for x, y in zip(t, c)) for t in self.terms)


class OFrac:
    """num/den with cross-multiplication equality and content normalization."""

    __slots__ = ("num", "den")

    def __init__(self, num, den):
        if den.is_zero():
            raise ZeroDivisionError
        if num.is_zero():
            den = OPoly.one(_arity_of(den))
        else:
            c = [min(a, b) for a, b in zip(num.content(), den.content())]
            c = tuple(c)
            if any(c):
                num = num.strip(c)
                den = den.strip(c)
            if num == den:
                num = den = OPoly.one(_arity_of(den))
        self.num = num
        self.den = den

    @classmethod
    def of(cls, poly):
        return cls(poly, OPoly.one(_arity_of(poly)))

    def is_zero(self):
        return self.num.is_zero()

    def __eq__(self, other):
        return self.num * other.den == other.num * self.den

    def __add__(self, other):
        return OFrac(self.num * other.den + other.num * self.den,
                     self.den * other.den)

    def __mul__(self, other):
        return OFrac(self.num * other.num, self.den * other.den)

    def inv(self):
        return OFrac(self.den, self.num)

    def __truediv__(self, other):
        return self * other.inv()


def _arity_of(p):
    for t in p.terms:
        return len(t)
    return 0


def oracle_rank(matrix):
    """Classic Gaussian elimination with division over GF(2)(z)."""
    rows = [list(r) for r in matrix]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        piv = None
        for i in range(rank, len(rows)):
            if not rows[i][col].is_zero():
                piv = i
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = rows[rank][col].inv()
        rows[rank] = [inv * v for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and not rows[i][col].is_zero():
                f = rows[i][col]
                rows[i] = [a + f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def from_ratfunc(r):
    """Convert a qlq RatFunc2 into oracle fractions (data plumbing only)."""
    from qlq.f2poly import unpack_monomial

    arity = r.arity
    num = OPoly(unpack_monomial(t, arity) for t in r.num.terms)
    den = OPoly(unpack_monomial(t, arity) for t in r.den.terms)
    if num.is_zero():
        return OFrac(OPoly.zero(), OPoly.one(arity))
    return OFrac(num, den)


def oracle_rank_ratfunc(matrix):
    return oracle_rank([[from_ratfunc(v) for v in row] for row in matrix])


def oracle_span_rank(rows):
    """Rank of sparse label->RatFunc2 rows (via dense conversion)."""
    labels = sorted({lab for row in rows for lab in row})
    dense = []
    for row in rows:
        zero = OFrac(OPoly.zero(), OPoly.one(1))
        dense.append([from_ratfunc(row[lab]) if lab in row else zero
                      for lab in labels])
    return oracle_rank(dense)


# -- ORACLE-B -------------------------------------------------------------------


def _poly_terms(elem):
    """Exponent tuples of a polynomial element of a rational tower,
    multiplied through by its denominator (a square-class no-op)."""
    from qlq.f2poly import unpack_monomial

    assert elem.is_rational(), "ORACLE-B handles rational towers only"
    r = elem.rational_part()
    p = r.num * r.den
    return {unpack_monomial(t, elem.owner.m) for t in p.terms}, elem.owner.m


def oracle_b_membership(target, gens, deg=6):
    """target in span over squares of gens, by brute GF(2) linear algebra.

    Multipliers are squares of polynomials of degree <= deg per variable
    pair; the window is generous for desk instances (<= 2^10 monomials).
    """
    tterms, m = _poly_terms(target)
    gterms = [_poly_terms(g)[0] for g in gens]
    shifts = [tuple(2 * e for e in exps)
              for exps in itertools.product(range(deg + 1), repeat=m)
              if sum(exps) <= deg]
    # unknowns: (gen index, shift); equation space: monomials of the products
    columns = []
    for gi, gt in enumerate(gterms):
        for sh in shifts:
            vec = frozenset(tuple(a + b for a, b in zip(t, sh)) for t in gt)
            columns.append(vec)
    target_vec = frozenset(tterms)
    # solve sum of chosen columns = target over GF(2) by elimination
    pivots = {}
    for col in columns:
        cur = col
        while cur:
            lead = max(cur)
            if lead in pivots:
                cur = cur ^ pivots[lead]
            else:
                pivots[lead] = cur
                break
    cur = target_vec
    while cur:
        lead = max(cur)
        if lead not in pivots:
            return False
        cur = cur ^ pivots[lead]
    return True


def oracle_b_span_dim(elems, deg=6):
    """Greedy dimension of the span over squares, via oracle_b_membership."""
    basis = []
    for e in elems:
        if e.is_zero():
            continue
        if basis and oracle_b_membership(e, basis, deg):
            continue
        if not basis:
            basis.append(e)
            continue
        basis.append(e)
    return len(basis)
