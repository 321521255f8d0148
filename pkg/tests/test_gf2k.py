"""GF(2^k) arithmetic, the irreducible table, and the kernel backends."""

import random

from qlq import _kernel_py
from qlq.gf2k import GF2k, IRREDUCIBLE_EXPONENTS, is_irreducible, reduction_poly

try:
    from qlq import _kernel as _kernel_c
except ImportError:
    _kernel_c = None


def test_table_entries_are_irreducible():
    for k in range(1, 65):
        assert is_irreducible(reduction_poly(k), k), k


def test_sqrt_is_square_root():
    rng = random.Random(11)
    for k in (1, 8, 16, 32):
        field = GF2k(k)
        for _ in range(2500):
            v = field.random(rng)
            s = field.sqrt(v)
            assert field.mul(s, s) == v


def test_field_laws():
    rng = random.Random(12)
    for k in (2, 8, 32):
        field = GF2k(k)
        for _ in range(100):
            a, b, c = (field.random_nonzero(rng) for _ in range(3))
            assert field.mul(a, b) == field.mul(b, a)
            assert field.mul(field.mul(a, b), c) == field.mul(a, field.mul(b, c))
            assert field.mul(a, field.inv(a)) == 1
            assert field.mul(a, b ^ c) == field.mul(a, b) ^ field.mul(a, c)


def test_backends_agree():
    if _kernel_c is None:
        return
    rng = random.Random(13)
    for k in (8, 32, 63):
        poly = reduction_poly(k)
        for _ in range(200):
            a = rng.randrange(1 << k)
            b = rng.randrange(1 << k)
            assert _kernel_c.gf_mul(a, b, poly, k) == _kernel_py.gf_mul(a, b, poly, k)
        a = rng.randrange(1, 1 << k)
        assert _kernel_c.gf_inv(a, poly, k) == _kernel_py.gf_inv(a, poly, k)


def test_matrix_rank_backends_agree():
    rng = random.Random(14)
    k = 16
    poly = reduction_poly(k)
    for _ in range(50):
        n, m = rng.randrange(1, 8), rng.randrange(1, 8)
        rows = [[rng.randrange(1 << k) if rng.random() < 0.7 else 0
                 for _ in range(m)] for _ in range(n)]
        expect = _kernel_py.matrix_rank(rows, m, poly, k)
        if _kernel_c is not None:
            assert _kernel_c.matrix_rank(rows, m, poly, k) == expect
        # duplicated rows never raise the rank
        assert _kernel_py.matrix_rank(rows + rows, m, poly, k) == expect


def test_k64_uses_pure_path():
    field = GF2k(64)
    rng = random.Random(15)
    a = field.random_nonzero(rng)
    assert field.mul(a, field.inv(a)) == 1
    s = field.sqrt(a)
    assert field.mul(s, s) == a
