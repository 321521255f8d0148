"""Polynomial and rational-function arithmetic over GF(2)."""

import random

import pytest

from qlq.f2poly import (
    DenominatorZero,
    DivisionByZero,
    Poly2,
    RatFunc2,
    pack_monomial,
    reassemble_split,
    rf_arith,
    unpack_monomial,
)
from qlq.gf2k import GF2k, GF2kPoint, evaluate


def rand_poly(rng, arity=3, nterms=4, deg=5):
    terms = set()
    for _ in range(nterms):
        terms ^= {pack_monomial([rng.randrange(deg + 1) for _ in range(arity)])}
    return Poly2(terms, arity)


def test_packing_roundtrip():
    rng = random.Random(1)
    for _ in range(100):
        exps = tuple(rng.randrange(50) for _ in range(4))
        assert unpack_monomial(pack_monomial(exps), 4) == exps


def test_charactestic_two_laws():
    rng = random.Random(2)
    for _ in range(200):
        p, q = rand_poly(rng), rand_poly(rng)
        assert (p + p).is_zero()
        assert (p + q).square() == p.square() + q.square()
        assert p * q == q * p


def test_square_split_bijection():
    rng = random.Random(3)
    for _ in range(200):
        p = rand_poly(rng)
        assert reassemble_split(p.square_split(), p.arity) == p
    assert Poly2.zero(2).square_split() == {}


def test_square_split_examples():
    # x1^2 + x1 x2 + 1 -> {(0,0): z1 + 1, (1,1): 1}
    x1, x2 = Poly2.var(0, 2), Poly2.var(1, 2)
    one = Poly2.one(2)
    p = x1 * x1 + x1 * x2 + one
    parts = p.square_split()
    assert set(parts) == {0, 3}
    assert parts[0] == x1 + one  # z1 + 1 in the z-packing
    assert parts[3] == one
    # (x1+x2)^3 -> {(1,0): z1+z2, (0,1): z1+z2}
    s = x1 + x2
    cube = s * s * s
    parts = cube.square_split()
    assert parts[1] == parts[2] == x1 + x2


def test_rf_field_axioms():
    rng = random.Random(4)
    ones = RatFunc2.one(3)
    for _ in range(100):
        n1, d1 = rand_poly(rng), rand_poly(rng)
        n2, d2 = rand_poly(rng), rand_poly(rng)
        if d1.is_zero() or d2.is_zero():
            continue
        a, b = RatFunc2(n1, d1), RatFunc2(n2, d2)
        assert rf_arith("add", a, a).is_zero()
        assert rf_arith("mul", a, b) == b * a
        if not a.is_zero():
            assert (a * rf_arith("inv", a)).is_one()
        assert (a + b) * (a + b) == a * a + b * b


def test_rf_examples(xy_tower):
    x, y = Poly2.var(0, 2), Poly2.var(1, 2)
    one = Poly2.one(2)
    a = RatFunc2(x + one, one)
    assert (a + a).is_zero()
    xr = RatFunc2.from_poly(x)
    assert xr * xr == RatFunc2.from_poly(x * x)
    inv = RatFunc2(x + y, x).inv()
    assert inv == RatFunc2(x, x + y)
    assert (RatFunc2(x + y, x) * inv).is_one()


def test_inv_zero_raises():
    with pytest.raises(DivisionByZero):
        RatFunc2.zero(2).inv()
    with pytest.raises(DivisionByZero):
        RatFunc2(Poly2.one(2), Poly2.zero(2))


def test_equality_by_cross_multiplication():
    x = Poly2.var(0, 2)
    one = Poly2.one(2)
    # x^2/x == x/1 without any gcd machinery
    assert RatFunc2(x * x, x) == RatFunc2(x, one)
    assert RatFunc2(x * x + x, x) == RatFunc2(x + one, one)


def test_divexact():
    rng = random.Random(5)
    for _ in range(200):
        p, q = rand_poly(rng), rand_poly(rng)
        if q.is_zero():
            continue
        assert (p * q).divexact(q) == p
    x, y = Poly2.var(0, 2), Poly2.var(1, 2)
    assert (x * x + y * y).divexact(x + y) == x + y  # (x+y)^2 / (x+y)
    assert (x * x).divexact(y) is None


def test_evaluation_homomorphism():
    rng = random.Random(6)
    field = GF2k(8)
    for _ in range(50):
        n1, d1 = rand_poly(rng), rand_poly(rng)
        n2, d2 = rand_poly(rng), rand_poly(rng)
        if d1.is_zero() or d2.is_zero():
            continue
        a, b = RatFunc2(n1, d1), RatFunc2(n2, d2)
        pt = GF2kPoint(field, {j: field.random_nonzero(rng) for j in range(3)})
        try:
            va, vb = evaluate(a, pt), evaluate(b, pt)
            assert evaluate(a * b, pt) == field.mul(va, vb)
            assert evaluate(a + b, pt) == va ^ vb
        except DenominatorZero:
            continue


def test_evaluation_examples():
    # evaluate(x+1, {x->1}) in GF(2) = 0
    f2 = GF2k(1)
    x = RatFunc2.from_poly(Poly2.var(0, 1) + Poly2.one(1))
    assert evaluate(x, GF2kPoint(f2, {0: 1})) == 0
    # evaluate(x^2/y, {x->t, y->t+1}) in GF(4)
    f4 = GF2k(2)
    t = 2  # the generator of GF(4)
    x2y = RatFunc2(Poly2.var(0, 2) * Poly2.var(0, 2), Poly2.var(1, 2))
    got = evaluate(x2y, GF2kPoint(f4, {0: t, 1: t ^ 1}))
    assert got == f4.mul(f4.mul(t, t), f4.inv(t ^ 1))
    # evaluate(1/x, {x->0}) raises
    inv_x = RatFunc2(Poly2.one(1), Poly2.var(0, 1))
    with pytest.raises(DenominatorZero):
        evaluate(inv_x, GF2kPoint(f2, {0: 0}))


def test_text_format():
    x1, x2 = Poly2.var(0, 2), Poly2.var(1, 2)
    p = x1 * x1 * x2 + Poly2.one(2)
    assert p.text(["x1", "x2"]) == "x1^2*x2 + 1"
    assert Poly2.zero(2).text(["x1", "x2"]) == "0"
    r = RatFunc2(x1 + x2, x1)
    assert r.text(["x1", "x2"]) == "(x1 + x2)/(x1)"
