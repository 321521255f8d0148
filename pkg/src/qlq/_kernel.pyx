# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled GF(2^k) kernel: carry-less field arithmetic and dense rank.

Hot loop of the randomized rank backend.  Limits: k <= 63 so that shifted
intermediates fit in 64 bits; qlq falls back to the pure-Python kernel for
larger k.
"""

from libc.stdlib cimport free, malloc, qsort

COMPILED = True

ctypedef unsigned long long u64


cdef inline u64 _mul(u64 a, u64 b, u64 poly, int k) nogil:
    cdef u64 res = 0
    cdef u64 top = (<u64>1) << k
    while b:
        if b & 1:
            res ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return res


cdef u64 _pow(u64 a, u64 e, u64 poly, int k) nogil:
    cdef u64 r = 1
    while e:
        if e & 1:
            r = _mul(r, a, poly, k)
        a = _mul(a, a, poly, k)
        e >>= 1
    return r


cdef inline u64 _inv(u64 a, u64 poly, int k) nogil:
    return _pow(a, ((<u64>1) << k) - 2, poly, k)


def gf_mul(a, b, poly, k):
    return _mul(<u64>a, <u64>b, <u64>poly, <int>k)


def gf_pow(a, e, poly, k):
    return _pow(<u64>a, <u64>e, <u64>poly, <int>k)


def gf_inv(a, poly, k):
    if a == 0:
        raise ZeroDivisionError("inverse of zero in GF(2^k)")
    return _inv(<u64>a, <u64>poly, <int>k)


cdef int _cmp_u64(const void *pa, const void *pb) noexcept nogil:
    cdef u64 a = (<const u64 *>pa)[0]
    cdef u64 b = (<const u64 *>pb)[0]
    if a < b:
        return -1
    if a > b:
        return 1
    return 0


def poly_mul_packed(a, b):
    """GF(2) polynomial product on 64-bit packed monomials.

    a and b are lists of packed exponent keys (all < 2^63, field-overflow
    checked by the caller); the product is the xor-multiset of pairwise
    sums, computed by sort-and-cancel.
    """
    cdef Py_ssize_t na = len(a), nb = len(b)
    cdef Py_ssize_t total = na * nb
    if total == 0:
        return []
    cdef u64 *pa = <u64 *>malloc(<size_t>na * sizeof(u64))
    cdef u64 *pb = <u64 *>malloc(<size_t>nb * sizeof(u64))
    cdef u64 *prod = <u64 *>malloc(<size_t>total * sizeof(u64))
    if pa == NULL or pb == NULL or prod == NULL:
        free(pa); free(pb); free(prod)
        raise MemoryError()
    cdef Py_ssize_t i, j, w
    cdef u64 cur
    cdef Py_ssize_t count
    try:
        for i in range(na):
            pa[i] = <u64>a[i]
        for j in range(nb):
            pb[j] = <u64>b[j]
        with nogil:
            w = 0
            for i in range(na):
                for j in range(nb):
                    prod[w] = pa[i] + pb[j]
                    w += 1
            qsort(prod, <size_t>total, sizeof(u64), _cmp_u64)
        out = []
        i = 0
        while i < total:
            cur = prod[i]
            count = 1
            i += 1
            while i < total and prod[i] == cur:
                count += 1
                i += 1
            if count & 1:
                out.append(cur)
        return out
    finally:
        free(pa)
        free(pb)
        free(prod)


def poly_divexact_packed(p, q, arity):
    """Exact quotient of packed GF(2) polynomials, or None.

    Runs the division algorithm in plain-integer (lex) order, which is a
    valid monomial well-order on the packed keys, so exactness agrees with
    any other order.  Caller guarantees keys fit in 63 bits.
    """
    cdef Py_ssize_t np_ = len(p), nq = len(q)
    if nq == 0:
        raise ZeroDivisionError("division by zero polynomial")
    if np_ == 0:
        return []
    cdef int ar = <int>arity
    cdef Py_ssize_t cap = np_ + nq + 16
    cdef u64 *rem = <u64 *>malloc(<size_t>cap * sizeof(u64))
    cdef u64 *qs = <u64 *>malloc(<size_t>nq * sizeof(u64))
    cdef u64 *buf = <u64 *>malloc(<size_t>cap * sizeof(u64))
    if rem == NULL or qs == NULL or buf == NULL:
        free(rem); free(qs); free(buf)
        raise MemoryError()
    cdef Py_ssize_t i, nrem, nbuf, ia, ib
    cdef u64 lead_q, lead_r, factor, fa, fb
    cdef int j, ok
    cdef u64 *tmp
    quot = []
    try:
        for i in range(np_):
            rem[i] = <u64>p[i]
        for i in range(nq):
            qs[i] = <u64>q[i]
        qsort(rem, <size_t>np_, sizeof(u64), _cmp_u64)
        qsort(qs, <size_t>nq, sizeof(u64), _cmp_u64)
        nrem = np_
        lead_q = qs[nq - 1]
        while nrem > 0:
            if nrem + nq > cap:
                cap = 2 * (nrem + nq)
                tmp = <u64 *>malloc(<size_t>cap * sizeof(u64))
                if tmp == NULL:
                    raise MemoryError()
                for i in range(nrem):
                    tmp[i] = rem[i]
                free(rem)
                rem = tmp
                tmp = <u64 *>malloc(<size_t>cap * sizeof(u64))
                if tmp == NULL:
                    raise MemoryError()
                free(buf)
                buf = tmp
            lead_r = rem[nrem - 1]
            ok = 1
            for j in range(ar):
                if ((lead_r >> (16 * j)) & 0xFFFF) < ((lead_q >> (16 * j)) & 0xFFFF):
                    ok = 0
                    break
            if not ok:
                return None
            factor = lead_r - lead_q
            quot.append(factor)
            # symmetric difference of rem and q shifted by factor (both sorted)
            nbuf = 0
            ia = 0
            ib = 0
            while ia < nrem or ib < nq:
                fa = rem[ia] if ia < nrem else 0
                fb = qs[ib] + factor if ib < nq else 0
                if ia < nrem and (ib >= nq or fa < fb):
                    buf[nbuf] = fa
                    nbuf += 1
                    ia += 1
                elif ib < nq and (ia >= nrem or fb < fa):
                    buf[nbuf] = fb
                    nbuf += 1
                    ib += 1
                else:
                    ia += 1
                    ib += 1
            tmp = rem
            rem = buf
            buf = tmp
            nrem = nbuf
        return quot
    finally:
        free(rem)
        free(qs)
        free(buf)


def matrix_rank(rows, ncols, poly, k):
    """Rank of a dense GF(2^k) matrix given as a list of row lists."""
    cdef int nrows = len(rows)
    cdef int nc = <int>ncols
    cdef int kk = <int>k
    cdef u64 p = <u64>poly
    if nrows == 0 or nc == 0:
        return 0
    cdef u64 *m = <u64 *>malloc(<size_t>nrows * <size_t>nc * sizeof(u64))
    if m == NULL:
        raise MemoryError()
    cdef int i, j, col, piv, rank
    cdef u64 f, inv, v
    cdef u64 *ri
    cdef u64 *rp
    try:
        for i in range(nrows):
            row = rows[i]
            for j in range(nc):
                m[i * nc + j] = <u64>row[j]
        rank = 0
        with nogil:
            for col in range(nc):
                piv = -1
                for i in range(rank, nrows):
                    if m[i * nc + col]:
                        piv = i
                        break
                if piv < 0:
                    continue
                if piv != rank:
                    for j in range(nc):
                        v = m[rank * nc + j]
                        m[rank * nc + j] = m[piv * nc + j]
                        m[piv * nc + j] = v
                inv = _inv(m[rank * nc + col], p, kk)
                rp = m + rank * nc
                for i in range(rank + 1, nrows):
                    v = m[i * nc + col]
                    if v:
                        f = _mul(v, inv, p, kk)
                        ri = m + i * nc
                        for j in range(col, nc):
                            if rp[j]:
                                ri[j] ^= _mul(f, rp[j], p, kk)
                rank += 1
                if rank == nrows:
                    break
        return rank
    finally:
        free(m)
