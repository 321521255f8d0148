"""Pure-Python fallback for the compiled GF(2^k) kernel.

Same API as the Cython module qlq._kernel: field elements are ints holding
bit vectors, `poly` is the reduction polynomial including the x^k bit.
"""

COMPILED = False


def gf_mul(a, b, poly, k):
    """Carry-less multiplication modulo the reduction polynomial."""
    res = 0
    top = 1 << k
    while b:
        if b & 1:
            res ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return res


def gf_pow(a, e, poly, k):
    r = 1
    while e:
        if e & 1:
            r = gf_mul(r, a, poly, k)
        a = gf_mul(a, a, poly, k)
        e >>= 1
    return r


def gf_inv(a, poly, k):
    if a == 0:
        raise ZeroDivisionError("inverse of zero in GF(2^k)")
    # a^(2^k - 2)
    return gf_pow(a, (1 << k) - 2, poly, k)


def matrix_rank(rows, ncols, poly, k):
    """Rank of a dense GF(2^k) matrix given as a list of row lists."""
    rows = [list(r) for r in rows]
    nrows = len(rows)
    rank = 0
    for col in range(ncols):
        piv = -1
        for i in range(rank, nrows):
            if rows[i][col]:
                piv = i
                break
        if piv < 0:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = gf_inv(rows[rank][col], poly, k)
        for i in range(rank + 1, nrows):
            v = rows[i][col]
            if v:
                f = gf_mul(v, inv, poly, k)
                ri, rp = rows[i], rows[rank]
                for j in range(col, ncols):
                    if rp[j]:
                        ri[j] ^= gf_mul(f, rp[j], poly, k)
        rank += 1
        if rank == nrows:
            break
    return rank


def poly_mul_packed(a, b):
    """GF(2) polynomial product on packed monomials (xor-multiset of sums)."""
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
    return list(acc)


def poly_divexact_packed(p, q, arity):
    """Pure twin of the compiled exact division (lex order on packed keys)."""
    if not q:
        raise ZeroDivisionError("division by zero polynomial")
    rem = set(p)
    qt = sorted(q)
    lead_q = qt[-1]
    quot = []
    while rem:
        lead_r = max(rem)
        for j in range(arity):
            if ((lead_r >> (16 * j)) & 0xFFFF) < ((lead_q >> (16 * j)) & 0xFFFF):
                return None
        factor = lead_r - lead_q
        quot.append(factor)
        for t in qt:
            tt = t + factor
            if tt in rem:
                rem.remove(tt)
            else:
                rem.add(tt)
    return quot
