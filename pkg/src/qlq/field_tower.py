"""Towers GF(2)(y_1..y_m)(s_1,...,s_t) with s_i^2 = b_i, and their elements.

An element is a map from s-monomials (bit masks over the square-root
generators) to rational-function coefficients in the y's.  Multiplication
rewrites s_i^2 -> b_i, where each b_i lives in the subtower below s_i, so
the rewriting terminates.  The whole tower is a 2^t-dimensional algebra over
the rational subfield R = GF(2)(y_1..y_m), and [L : L^2] = 2^m throughout.

Coordinates: L = (+)_{e,f} y^e s^f R^2, which is the basis every rank and
membership computation below runs in (see linalg2).
"""

from __future__ import annotations

import itertools

from .f2poly import DivisionByZero, Poly2, RatFunc2
from .gf2k import gf2k_sqrt


class TowerError(ValueError):
    pass


class DepthGuardExceeded(TowerError):
    pass


class SquareGenerator(TowerError):
    pass


class ZeroGenerator(TowerError):
    pass


class TowerMismatch(TowerError):
    pass


DEFAULT_DEPTH_GUARD = 24

_fresh_counters = {"rational": 0, "quadric": 0}


def reset_fresh_names():
    """Reset the deterministic fresh-name counters (per-session reproducibility)."""
    _fresh_counters["rational"] = 0
    _fresh_counters["quadric"] = 0


def _fresh_rational_names(existing, count):
    names = []
    while len(names) < count:
        _fresh_counters["rational"] += 1
        cand = "T%d" % _fresh_counters["rational"]
        if cand not in existing:
            names.append(cand)
    return names


def _fresh_quadric_names(existing, count):
    _fresh_counters["quadric"] += 1
    k = _fresh_counters["quadric"]
    names = []
    j = 0
    while len(names) < count:
        j += 1
        cand = "U%d_%d" % (k, j)
        if cand not in existing:
            names.append(cand)
    sname = "w%d" % k
    while sname in existing:
        k += 1
        sname = "w%d" % k
    return names, sname


class FieldTower:
    """Immutable presentation of GF(2)(y_1..y_m) extended by square roots."""

    def __init__(self, var_names, sqrt_gens=(), depth_guard=DEFAULT_DEPTH_GUARD,
                 _validated=False):
        self.var_names = tuple(var_names)
        self.sqrt_gens = tuple(sqrt_gens)  # pairs (name, FieldElement b_i)
        self.depth_guard = depth_guard
        if len(set(self.var_names) | {n for n, _ in self.sqrt_gens}) != (
            len(self.var_names) + len(self.sqrt_gens)
        ):
            raise TowerError("duplicate variable or generator names")
        if self.m + self.t > depth_guard:
            raise DepthGuardExceeded(
                "tower size %d exceeds guard %d" % (self.m + self.t, depth_guard)
            )
        if not _validated:
            self._validate()

    @property
    def m(self):
        return len(self.var_names)

    @property
    def t(self):
        return len(self.sqrt_gens)

    def _validate(self):
        for i, (name, b) in enumerate(self.sqrt_gens):
            sub = self.subtower(i)
            bb = FieldElement(sub, b.comps)
            if bb.is_zero():
                raise ZeroGenerator("sqrt generator %s is zero" % name)
            if max(bb.comps, default=0) >> i:
                raise TowerError("generator %s uses later square roots" % name)
            if bb.is_square():
                raise SquareGenerator(
                    "defining element of %s is already a square" % name
                )

    def subtower(self, i):
        """The tower truncated to the first i square-root generators."""
        if i == self.t:
            return self
        return FieldTower(self.var_names, self.sqrt_gens[:i], self.depth_guard,
                          _validated=True)

    def same_presentation(self, other):
        return (
            self.var_names == other.var_names
            and len(self.sqrt_gens) == len(other.sqrt_gens)
            and all(a[0] == b[0] and a[1].comps == b[1].comps
                    for a, b in zip(self.sqrt_gens, other.sqrt_gens))
        )

    def extends(self, other):
        """True when self is obtained from other by adding vars/generators."""
        if self.var_names[: other.m] != other.var_names:
            return False
        if len(self.sqrt_gens) < len(other.sqrt_gens):
            return False
        for (na, ba), (nb, bb) in zip(self.sqrt_gens, other.sqrt_gens):
            if na != nb or ba.comps != bb.comps:
                return False
        return True

    # -- element constructors ------------------------------------------------

    def zero(self):
        return FieldElement(self, {})

    def one(self):
        return FieldElement(self, {0: RatFunc2.one(self.m)})

    def from_ratfunc(self, r):
        return FieldElement(self, {0: r.embed(self.m)} if not r.is_zero() else {})

    def from_poly(self, p):
        return self.from_ratfunc(RatFunc2.from_poly(p))

    def var(self, name):
        if name in self.var_names:
            j = self.var_names.index(name)
            return self.from_poly(Poly2.var(j, self.m))
        for i, (n, _) in enumerate(self.sqrt_gens):
            if n == name:
                return self.sqrt_gen(i)
        raise KeyError("unknown variable %r" % name)

    def rational_var(self, j):
        return self.from_poly(Poly2.var(j, self.m))

    def sqrt_gen(self, i):
        return FieldElement(self, {1 << i: RatFunc2.one(self.m)})

    def sqrt_defining(self, i):
        """The element b_i with s_i^2 = b_i, embedded in this tower."""
        return FieldElement(self, self.sqrt_gens[i][1].comps)

    def gen_products(self):
        """All 2^t products prod_{i in g} b_i: an R^2-basis of L^2."""
        prods = [self.one()]
        for i in range(self.t):
            b = self.sqrt_defining(i)
            prods = prods + [p * b for p in prods]
        return prods

    def all_names(self):
        return list(self.var_names) + [n for n, _ in self.sqrt_gens]

    def to_json(self):
        names = self.all_names()
        return {
            "vars": list(self.var_names),
            "sqrts": [
                {"name": n, "square": b.text()}
                for n, b in self.sqrt_gens
            ],
        }

    def __repr__(self):
        s = "GF(2)(%s)" % ",".join(self.var_names)
        for n, _ in self.sqrt_gens:
            s += "(%s)" % n
        return s


def rational_tower(names, depth_guard=DEFAULT_DEPTH_GUARD):
    return FieldTower(tuple(names), (), depth_guard)


def extend_rational(tower, count):
    """Adjoin `count` fresh transcendentals; existing elements re-embed unchanged."""
    existing = set(tower.all_names())
    names = _fresh_rational_names(existing, count)
    return _extend_vars(tower, names)


def _extend_vars(tower, names):
    new_m = tower.m + len(names)
    new_vars = tower.var_names + tuple(names)
    gens = []
    for n, b in tower.sqrt_gens:
        sub = FieldTower(new_vars, tuple(gens), tower.depth_guard, _validated=True)
        gens.append((n, FieldElement(sub, _reembed_comps(b, tower.m, new_m))))
    return FieldTower(new_vars, tuple(gens), tower.depth_guard, _validated=True)


def _reembed_comps(elem, old_m, new_m):
    return {f: c.embed(new_m) for f, c in elem.comps.items()}


def extend_sqrt(tower, b, name=None):
    """Adjoin a square root of b; rejects b = 0 and b already a square."""
    b = embed(b, tower)
    if b.is_zero():
        raise ZeroGenerator("cannot adjoin sqrt of zero")
    if b.is_square():
        raise SquareGenerator("element is already a square in the tower")
    if name is None:
        k = tower.t + 1
        existing = set(tower.all_names())
        name = "s%d" % k
        while name in existing:
            k += 1
            name = "s%d" % k
    return FieldTower(tower.var_names, tower.sqrt_gens + ((name, b),),
                      tower.depth_guard, _validated=True)


def embed(elem, tower):
    """Re-embed an element of a subtower into an extension tower."""
    owner = elem.owner
    if owner is tower or owner.same_presentation(tower):
        return FieldElement(tower, elem.comps) if owner is not tower else elem
    if not tower.extends(owner):
        raise TowerMismatch("element does not live in a subtower")
    return FieldElement(tower, _reembed_comps(elem, owner.m, tower.m))


class FieldElement:
    """Element of a FieldTower in s-monomial normal form."""

    __slots__ = ("owner", "comps", "_coords")

    def __init__(self, owner, comps):
        self.owner = owner
        m = owner.m
        self.comps = {
            f: (c if c.arity == m else c.embed(m))
            for f, c in comps.items() if not c.is_zero()
        }
        self._coords = None

    def is_zero(self):
        return not self.comps

    def is_rational(self):
        return set(self.comps) <= {0}

    def rational_part(self):
        return self.comps.get(0, RatFunc2.zero(self.owner.m))

    def __bool__(self):
        return bool(self.comps)

    def _check(self, other):
        if self.owner is not other.owner and not self.owner.same_presentation(other.owner):
            raise TowerMismatch("elements of different towers")

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        self._check(other)
        if set(self.comps) != set(other.comps):
            return False
        return all(self.comps[f] == other.comps[f] for f in self.comps)

    def __add__(self, other):
        self._check(other)
        out = dict(self.comps)
        for f, c in other.comps.items():
            if f in out:
                s = out[f] + c
                if s.is_zero():
                    del out[f]
                else:
                    out[f] = s
            else:
                out[f] = c
        return FieldElement(self.owner, out)

    def __mul__(self, other):
        self._check(other)
        tower = self.owner
        out = {}
        for f1, c1 in self.comps.items():
            for f2, c2 in other.comps.items():
                common = f1 & f2
                coeff = c1 * c2
                if coeff.is_zero():
                    continue
                piece = {f1 ^ f2: coeff}
                i = 0
                cc = common
                while cc:
                    if cc & 1:
                        piece = _mul_comps(tower, piece,
                                           tower.sqrt_gens[i][1].comps, tower.m)
                    cc >>= 1
                    i += 1
                for f, c in piece.items():
                    if f in out:
                        s = out[f] + c
                        if s.is_zero():
                            del out[f]
                        else:
                            out[f] = s
                    else:
                        out[f] = c
        return FieldElement(tower, out)

    def square(self):
        return self * self

    def inv(self):
        """Solve the 2^t-dimensional multiplication system over GF(2)(y)."""
        if self.is_zero():
            raise DivisionByZero("inverse of zero element")
        tower = self.owner
        t = tower.t
        if t == 0 or self.is_rational():
            return FieldElement(tower, {0: self.rational_part().inv()})
        n = 1 << t
        # column g of the matrix holds the s-expansion of self * s^g
        cols = []
        for g in range(n):
            prod = self * FieldElement(tower, {g: RatFunc2.one(tower.m)})
            cols.append(prod.comps)
        zero = RatFunc2.zero(tower.m)
        mat = [[cols[g].get(f, zero) for g in range(n)] for f in range(n)]
        rhs = [RatFunc2.one(tower.m) if f == 0 else zero for f in range(n)]
        sol = _solve_dense(mat, rhs)
        if sol is None:
            raise DivisionByZero("singular multiplication matrix")
        return FieldElement(tower, {g: sol[g] for g in range(n)})

    def __truediv__(self, other):
        return self * other.inv()

    def coordinates(self):
        """Exact R^2-coordinates over the basis {y^e s^f}.

        Returns a dict keyed by (parity mask e over the y's, s-mask f) with
        RatFunc2 values in the square variables z_j = y_j^2.
        """
        if self._coords is None:
            out = {}
            for f, r in self.comps.items():
                u = r.num * r.den
                # u/den^2 = element comp; den(y)^2 reads as den(z) with the
                # same packed keys once z_j = y_j^2
                for par, q in u.square_split().items():
                    out[(par, f)] = RatFunc2(q, r.den)
            self._coords = out
        return self._coords

    def is_square(self, mode=None):
        """Membership of self in L^2 = the R^2-span of the generator products."""
        from . import linalg2

        return linalg2.r2_membership(self, self.owner.gen_products(), mode=mode)

    def sqrt(self):
        """Exact square root when one exists in the tower, else None."""
        # cheap path: purely rational element, num*den a perfect square
        if self.is_rational():
            r = self.rational_part()
            ns = (r.num * r.den).sqrt()
            if ns is not None:
                return FieldElement(self.owner, {0: RatFunc2(ns, r.den)})
            if self.owner.t == 0:
                return None
        from . import linalg2

        return linalg2.square_representation(self)

    def eval(self, pt):
        """Evaluate at a GF(2^k) point assigning all rational variables."""
        tower = self.owner
        field = pt.field
        svals = []
        for i in range(tower.t):
            b = tower.sqrt_defining(i)
            bv = _eval_with_svals(b, pt, svals, field)
            svals.append(gf2k_sqrt(field, bv))
        return _eval_with_svals(self, pt, svals, field)

    def text(self):
        names = self.owner.all_names()
        if self.is_zero():
            return "0"
        parts = []
        for f in sorted(self.comps):
            c = self.comps[f]
            smon = "*".join(self.owner.sqrt_gens[i][0]
                            for i in range(self.owner.t) if f & (1 << i))
            if not smon:
                parts.append(c.text(names))
            elif c.is_one():
                parts.append(smon)
            else:
                parts.append("(%s)*%s" % (c.text(names), smon))
        return " + ".join(parts)

    def __repr__(self):
        return "FieldElement(%s)" % self.text()


def _mul_comps(tower, a, b, m):
    """Multiply two comp-dicts, rewriting s_i^2 -> b_i recursively."""
    out = {}
    for f1, c1 in a.items():
        for f2, c2 in b.items():
            common = f1 & f2
            coeff = c1 * c2
            if coeff.is_zero():
                continue
            piece = {f1 ^ f2: coeff}
            i = 0
            cc = common
            while cc:
                if cc & 1:
                    piece = _mul_comps(tower, piece,
                                       tower.sqrt_gens[i][1].comps, m)
                cc >>= 1
                i += 1
            for f, c in piece.items():
                if f in out:
                    s = out[f] + c
                    if s.is_zero():
                        del out[f]
                    else:
                        out[f] = s
                else:
                    out[f] = c
    return out


def _eval_with_svals(elem, pt, svals, field):
    acc = 0
    for f, c in elem.comps.items():
        v = c.eval_gf2k(field, pt.assignment)
        i = 0
        while f:
            if f & 1:
                v = field.mul(v, svals[i])
            f >>= 1
            i += 1
        acc ^= v
    return acc


def _solve_dense(mat, rhs):
    """Gaussian elimination over the rational function field (small systems)."""
    n = len(mat)
    m = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    arity = rhs[0].arity
    zero = RatFunc2.zero(arity)
    row = 0
    piv_cols = []
    for col in range(n):
        piv = None
        for i in range(row, n):
            if not m[i][col].is_zero():
                piv = i
                break
        if piv is None:
            continue
        m[row], m[piv] = m[piv], m[row]
        inv = m[row][col].inv()
        m[row] = [x * inv if not x.is_zero() else x for x in m[row]]
        for i in range(n):
            if i != row and not m[i][col].is_zero():
                f = m[i][col]
                m[i] = [
                    a + f * b if not b.is_zero() else a
                    for a, b in zip(m[i], m[row])
                ]
        piv_cols.append(col)
        row += 1
    sol = [zero] * n
    for r, col in enumerate(piv_cols):
        sol[col] = m[r][n]
    # consistency: rows beyond the pivots must have zero rhs
    for i in range(row, n):
        if not m[i][n].is_zero():
            return None
    return sol


def coordinates(elem):
    return elem.coordinates()


def is_square(elem, mode=None):
    return elem.is_square(mode=mode)


def eval_tower(elem, pt):
    return elem.eval(pt)


def reassemble(tower, coords):
    """Rebuild the element from (parity, s-mask) -> z-coefficient coordinates."""
    from .f2poly import EXP_BITS

    comps = {}
    for (par, f), r in coords.items():
        off = 0
        j = 0
        p = par
        while p:
            if p & 1:
                off |= 1 << (EXP_BITS * j)
            p >>= 1
            j += 1
        num = Poly2({2 * t + off for t in r.num.terms}, tower.m)
        den = r.den
        dsq = Poly2({2 * t for t in den.terms}, tower.m)
        piece = RatFunc2(num, dsq)
        if f in comps:
            comps[f] = comps[f] + piece
        else:
            comps[f] = piece
    return FieldElement(tower, comps)
