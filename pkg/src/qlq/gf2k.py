"""GF(2^k) on integer bit vectors, with the published low-weight moduli.

The reduction polynomial for each k in 1..64 is the standard minimal-weight
irreducible (trinomial where one exists, else pentanomial); the test suite
re-verifies irreducibility of every table entry.  Frobenius is bijective, so
square roots come for free: sqrt(v) = v^(2^(k-1)).

The arithmetic itself lives in a compiled kernel when available (see
qlq._kernel); set QLQ_PURE=1 to force the pure-Python twin.
"""

from __future__ import annotations

import os
import random

if os.environ.get("QLQ_PURE"):
    from . import _kernel_py as kernel
else:
    try:
        from . import _kernel as kernel  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernel_py as kernel

from . import _kernel_py as kernel_py

COMPILED = bool(getattr(kernel, "COMPILED", False))

# k -> exponents of the middle terms of the reduction polynomial
# (x^k + ... + 1); low-weight binary irreducible polynomial table.
IRREDUCIBLE_EXPONENTS = {
    1: (), 2: (1,), 3: (1,), 4: (1,), 5: (2,), 6: (1,), 7: (1,),
    8: (4, 3, 1), 9: (1,), 10: (3,), 11: (2,), 12: (3,), 13: (4, 3, 1),
    14: (5,), 15: (1,), 16: (5, 3, 1), 17: (3,), 18: (3,), 19: (5, 2, 1),
    20: (3,), 21: (2,), 22: (1,), 23: (5,), 24: (4, 3, 1), 25: (3,),
    26: (4, 3, 1), 27: (5, 2, 1), 28: (1,), 29: (2,), 30: (1,), 31: (3,),
    32: (7, 3, 2), 33: (10,), 34: (7,), 35: (2,), 36: (9,), 37: (6, 4, 1),
    38: (6, 5, 1), 39: (4,), 40: (5, 4, 3), 41: (3,), 42: (7,),
    43: (6, 4, 3), 44: (5,), 45: (4, 3, 1), 46: (1,), 47: (5,),
    48: (5, 3, 2), 49: (9,), 50: (4, 3, 2), 51: (6, 3, 1), 52: (3,),
    53: (6, 2, 1), 54: (9,), 55: (7,), 56: (7, 4, 2), 57: (4,), 58: (19,),
    59: (7, 4, 2), 60: (1,), 61: (5, 2, 1), 62: (29,), 63: (1,),
    64: (4, 3, 1),
}


def reduction_poly(k):
    """Reduction polynomial as an int, x^k bit included."""
    p = (1 << k) | 1
    for e in IRREDUCIBLE_EXPONENTS[k]:
        p |= 1 << e
    return p


class GF2k:
    """Arithmetic context for GF(2^k)."""

    def __init__(self, k, force_pure=False):
        if k not in IRREDUCIBLE_EXPONENTS:
            raise ValueError("k must be in 1..64")
        self.k = k
        self.poly = reduction_poly(k)
        self.order = 1 << k
        # the compiled kernel shifts through bit k, so it needs k <= 63
        if force_pure or (COMPILED and k > 63):
            self._kernel = kernel_py
        else:
            self._kernel = kernel

    def mul(self, a, b):
        return self._kernel.gf_mul(a, b, self.poly, self.k)

    def inv(self, a):
        return self._kernel.gf_inv(a, self.poly, self.k)

    def pow(self, a, e):
        return self._kernel.gf_pow(a, e, self.poly, self.k)

    def sqrt(self, v):
        """The unique square root: v^(2^(k-1))."""
        if v in (0, 1):
            return v
        return self._kernel.gf_pow(v, 1 << (self.k - 1), self.poly, self.k)

    def matrix_rank(self, rows, ncols):
        return self._kernel.matrix_rank(rows, ncols, self.poly, self.k)

    def random_nonzero(self, rng: random.Random):
        return rng.randrange(1, self.order)

    def random(self, rng: random.Random):
        return rng.randrange(self.order)

    def __repr__(self):
        return "GF2k(%d)" % self.k


class GF2kPoint:
    """Assignment of GF(2^k) values to variable indices."""

    __slots__ = ("field", "assignment")

    def __init__(self, field, assignment):
        self.field = field
        self.assignment = dict(assignment)

    def __getitem__(self, j):
        return self.assignment[j]

    def __contains__(self, j):
        return j in self.assignment

    @classmethod
    def random_nonzero(cls, field, indices, rng):
        return cls(field, {j: field.random_nonzero(rng) for j in indices})


def is_irreducible(poly, k):
    """Rabin irreducibility test for a degree-k polynomial over GF(2)."""

    def pmod(a, m):
        dm = m.bit_length() - 1
        while a.bit_length() - 1 >= dm and a:
            a ^= m << (a.bit_length() - 1 - dm)
        return a

    def pmulmod(a, b, m):
        r = 0
        while b:
            if b & 1:
                r ^= a
            b >>= 1
            a <<= 1
        return pmod(r, m)

    def x_pow_2e(e, m):
        # x^(2^e) mod m by repeated squaring
        r = 2
        for _ in range(e):
            r = pmulmod(r, r, m)
        return r

    def pgcd(a, b):
        while b:
            a, b = b, pmod(a, b)
        return a

    if x_pow_2e(k, poly) != pmod(2, poly):
        return False
    primes = []
    n, q = k, 2
    while q * q <= n:
        if n % q == 0:
            primes.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        primes.append(n)
    for q in primes:
        h = x_pow_2e(k // q, poly) ^ 2
        if pgcd(h, poly) != 1:
            return False
    return True


def evaluate(r, pt: GF2kPoint):
    """Evaluate a RatFunc2 at a GF(2^k) point (ring homomorphism)."""
    return r.eval_gf2k(pt.field, pt.assignment)


def gf2k_sqrt(field: GF2k, v):
    return field.sqrt(v)
