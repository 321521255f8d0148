"""Square-root towers, element arithmetic, coordinates and evaluation."""

import random

import pytest

from qlq.f2poly import Poly2, RatFunc2
from qlq.field_tower import (
    DepthGuardExceeded,
    FieldTower,
    SquareGenerator,
    TowerMismatch,
    ZeroGenerator,
    embed,
    extend_rational,
    extend_sqrt,
    rational_tower,
    reassemble,
)
from qlq.gf2k import GF2k, GF2kPoint
from qlq.linalg2 import RankMode, SquareSpanQuery, _rank_of_rows, span_dim_over_squares


def test_extend_rational_names(xy_tower):
    K2 = extend_rational(xy_tower, 2)
    assert K2.m == 4
    assert K2.var_names[:2] == ("x", "y")
    assert all(n.startswith("T") for n in K2.var_names[2:])
    # existing elements re-embed unchanged
    x = xy_tower.var("x")
    xe = embed(x, K2)
    assert xe.rational_part().num.terms == x.rational_part().num.terms


def test_extend_sqrt_rejects_squares(xy_tower):
    y = xy_tower.var("y")
    with pytest.raises(SquareGenerator):
        extend_sqrt(xy_tower, y * y)
    with pytest.raises(ZeroGenerator):
        extend_sqrt(xy_tower, xy_tower.zero())
    Ks = extend_sqrt(xy_tower, xy_tower.var("x"))
    assert Ks.t == 1
    # x is a square there
    assert embed(xy_tower.var("x"), Ks).is_square()


def test_depth_guard():
    with pytest.raises(DepthGuardExceeded):
        rational_tower(["v%d" % i for i in range(30)])


def test_elem_arith_examples(xy_tower):
    K = extend_sqrt(xy_tower, xy_tower.var("x"))
    s = K.sqrt_gen(0)
    one = K.one()
    x = embed(xy_tower.var("x"), K)
    assert (one + s) * (one + s) == one + x
    assert s.inv() == s * x.inv()
    assert (s * s.inv()).comps == one.comps
    inv = (one + s).inv()
    assert inv == (one + s) * (one + x).inv()
    assert ((one + s) * inv) == one


def test_tower_mismatch(xy_tower, xyz_tower):
    with pytest.raises(TowerMismatch):
        xy_tower.var("x") + xyz_tower.var("x")


def test_coordinates_examples(xy_tower):
    x = xy_tower.var("x")
    coords = x.coordinates()
    assert set(coords) == {(1, 0)}
    assert coords[(1, 0)].is_one()
    # x^2 + x y -> {(0,0): z1, (1,1): 1}
    y = xy_tower.var("y")
    coords = (x * x + x * y).coordinates()
    assert set(coords) == {(0, 0), (3, 0)}
    assert coords[(0, 0)] == RatFunc2.from_poly(Poly2.var(0, 2))
    # 1/x -> entry (1, 0) with value 1/z1
    coords = x.inv().coordinates()
    assert set(coords) == {(1, 0)}
    assert coords[(1, 0)] == RatFunc2(Poly2.one(2), Poly2.var(0, 2))


def test_coordinates_reassemble_roundtrip(xy_tower):
    rng = random.Random(21)
    K = extend_sqrt(xy_tower, xy_tower.var("x"))
    K = extend_sqrt(K, embed(xy_tower.var("y"), K))
    for _ in range(40):
        comps = {}
        for f in range(4):
            if rng.random() < 0.6:
                terms = {sum(rng.randrange(3) << (16 * j) for j in range(2))
                         for _ in range(rng.randrange(1, 3))}
                den = Poly2.var(rng.randrange(2), 2) if rng.random() < 0.3 \
                    else Poly2.one(2)
                comps[f] = RatFunc2(Poly2(terms, 2), den)
        e = K.zero() if not comps else K.zero().__class__(K, comps)
        assert reassemble(K, e.coordinates()) == e


def test_is_square(xy_tower):
    x, y = xy_tower.var("x"), xy_tower.var("y")
    assert (x * x * y * y * y * y).is_square()
    assert not x.is_square()
    Ks = extend_sqrt(xy_tower, x)
    assert embed(x, Ks).is_square()
    rng = random.Random(22)
    for _ in range(20):
        terms = {sum(rng.randrange(3) << (16 * j) for j in range(2))
                 for _ in range(rng.randrange(1, 3))}
        a = xy_tower.from_poly(Poly2(terms, 2))
        if a.is_zero():
            continue
        assert (a * a).is_square()
        assert (a * a * x).is_square() == x.is_square()


def test_gen_products_independent():
    # the 2^t generator products stay linearly independent over R^2
    K = rational_tower(["x", "y", "z"])
    K1 = extend_sqrt(K, K.var("x"))
    K2 = extend_sqrt(K1, embed(K.var("y"), K1))
    K3 = extend_sqrt(K2, embed(K.var("z"), K2) + K2.one())
    for tower in (K1, K2, K3):
        rows = [bg.coordinates() for bg in tower.gen_products()]
        assert int(_rank_of_rows(rows, RankMode.exact())) == 1 << tower.t
        q = SquareSpanQuery([tower.one()], tower)
        assert span_dim_over_squares(q) == 1


def test_eval_tower(xy_tower):
    K = extend_sqrt(xy_tower, xy_tower.var("x"))
    s = K.sqrt_gen(0)
    f2 = GF2k(1)
    assert s.eval(GF2kPoint(f2, {0: 1, 1: 1})) == 1
    # homomorphism + char 2: eval(1+s)^2 == 1 + eval(x)
    field = GF2k(8)
    rng = random.Random(23)
    one = K.one()
    x = embed(xy_tower.var("x"), K)
    for _ in range(30):
        pt = GF2kPoint(field, {0: field.random_nonzero(rng),
                               1: field.random_nonzero(rng)})
        v = (one + s).eval(pt)
        assert field.mul(v, v) == 1 ^ x.eval(pt)
    # eval(x*s, {x->g}) in GF(8): g * sqrt(g)
    f8 = GF2k(3)
    g = 2
    got = (x * s).eval(GF2kPoint(f8, {0: g, 1: 1}))
    assert got == f8.mul(g, f8.sqrt(g))


def test_eval_is_homomorphism_random(xy_tower):
    rng = random.Random(24)
    K = extend_sqrt(xy_tower, xy_tower.var("x") + xy_tower.var("y"))
    field = GF2k(16)
    s = K.sqrt_gen(0)
    one = K.one()
    a = one + s
    b = embed(xy_tower.var("y"), K) * s + one
    for _ in range(25):
        pt = GF2kPoint(field, {0: field.random_nonzero(rng),
                               1: field.random_nonzero(rng)})
        assert (a * b).eval(pt) == field.mul(a.eval(pt), b.eval(pt))
        assert (a + b).eval(pt) == a.eval(pt) ^ b.eval(pt)


def test_tower_json_roundtrip(xy_tower):
    from qlq.cli import tower_from_json

    K = extend_sqrt(xy_tower, xy_tower.var("x"))
    K = extend_sqrt(K, embed(xy_tower.var("y"), K) + K.sqrt_gen(0))
    data = K.to_json()
    K2 = tower_from_json(data)
    assert K2.same_presentation(K)
