# cython: boundscheck=False, wraparound=False, cdivision=True
"""
Compiled versions of the straddling-set loops in ``_pykernel``.

All arithmetic is int64; callers guarantee Delta * q^2 < 2^60 so that every
intermediate stays in range (see ``qforms._kernel_ok``). Sums for k = 2 are
accumulated in 128 bits.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"

ctypedef long long i64
cdef extern from *:
    # Cython has no 128-bit type; the C compiler does
    ctypedef long long i128 "__int128"


cdef inline i64 _gcd(i64 a, i64 b) noexcept nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef inline i64 _mod(i64 a, i64 n) noexcept nogil:
    cdef i64 r = a % n
    if r < 0:
        r += n
    return r


cdef int _kron(i64 a, i64 n) noexcept nogil:
    cdef int res = 1
    cdef int v = 0
    cdef i64 t
    if n == 0:
        return 1 if (a == 1 or a == -1) else 0
    if n < 0:
        n = -n
        if a < 0:
            res = -res
    while n % 2 == 0:
        n //= 2
        v += 1
    if v:
        if a % 2 == 0:
            return 0
        if v % 2 and (_mod(a, 8) == 3 or _mod(a, 8) == 5):
            res = -res
    a = _mod(a, n)
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 == 3 or n % 8 == 5:
                res = -res
        t = a
        a = n
        n = t
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a = a % n
    return res if n == 1 else 0


def kronecker64(i64 a, i64 n):
    return _kron(a, n)


cdef int _genus(i64 D0, i64 N, i64 a, i64 b, i64 c,
                const i64[:, ::1] splits, const i64[::1] ndivs) noexcept nogil:
    cdef i64 ap = a // N
    cdef Py_ssize_t s, t
    cdef i64 d1, d2, n1, n2
    if _gcd(_gcd(ap, b), _gcd(c, D0)) != 1:
        return 0
    for s in range(splits.shape[0]):
        d1 = splits[s, 0]
        d2 = splits[s, 1]
        for t in range(ndivs.shape[0]):
            n1 = ndivs[t]
            n2 = N // n1
            if _gcd(d1, n1 * ap) == 1 and _gcd(d2, n2 * c) == 1:
                return _kron(d1, n1 * ap) * _kron(d2, n2 * c)
    return 0


def genus_char_raw(i64 D0, i64 N, i64 a, i64 b, i64 c, splits, ndivs):
    cdef i64[:, ::1] sp = np.ascontiguousarray(splits, dtype=np.int64).reshape(-1, 2)
    cdef i64[::1] nd = np.ascontiguousarray(ndivs, dtype=np.int64)
    return _genus(D0, N, a, b, c, sp, nd)


cdef Py_ssize_t _prefix(const double[::1] neg_alphas, double t) noexcept nogil:
    # bisect_left(neg_alphas, -t + 1e-9)
    cdef double key = -t + 1e-9
    cdef Py_ssize_t lo = 0, hi = neg_alphas.shape[0], mid
    while lo < hi:
        mid = (lo + hi) // 2
        if neg_alphas[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef Py_ssize_t _collect(const i64[:, ::1] forms, const double[::1] neg_alphas,
                         i64 N, i64 p, i64 q, const i64[:, ::1] pts,
                         i64[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t m = pts.shape[0] - 1
    cdef Py_ssize_t j, i, r, n, cnt = 0
    cdef i64 pj, qj, pk, qk, det, al, be, ga, de, tP, tQ
    cdef i64 a0, b0, c0, val, a, u, v
    cdef bint ok
    for j in range(m):
        pj = pts[j, 0]
        qj = pts[j, 1]
        pk = pts[j + 1, 0]
        qk = pts[j + 1, 1]
        det = pj * qk - pk * qj
        al = det * qk
        be = -det * pk
        ga = -det * qj
        de = det * pj
        tP = al * p + be * q
        tQ = ga * p + de * q
        if tQ < 0:
            tP = -tP
            tQ = -tQ
        n = _prefix(neg_alphas, (<double>tP) / (<double>tQ))
        for i in range(n):
            a0 = forms[i, 0]
            b0 = forms[i, 1]
            c0 = forms[i, 2]
            val = a0 * tP * tP + b0 * tP * tQ + c0 * tQ * tQ
            if val <= 0:
                continue
            a = a0 * al * al + b0 * al * ga + c0 * ga * ga
            if a % N:
                continue
            ok = True
            for r in range(j - 1, -1, -1):
                u = al * pts[r, 0] + be * pts[r, 1]
                v = ga * pts[r, 0] + de * pts[r, 1]
                if a0 * u * u + b0 * u * v + c0 * v * v > 0:
                    ok = False
                    break
            if not ok:
                continue
            out[cnt, 0] = a
            out[cnt, 1] = 2 * a0 * al * be + b0 * (al * de + be * ga) + 2 * c0 * ga * de
            out[cnt, 2] = a0 * be * be + b0 * be * de + c0 * de * de
            out[cnt, 3] = val
            cnt += 1
    return cnt


def _as_arrays(forms, neg_alphas, pts):
    return (np.ascontiguousarray(forms, dtype=np.int64).reshape(-1, 3),
            np.ascontiguousarray(neg_alphas, dtype=np.float64),
            np.ascontiguousarray(pts, dtype=np.int64).reshape(-1, 2))


def straddle_collect(forms, neg_alphas, i64 N, i64 p, i64 q, pts):
    """Compiled counterpart of ``_pykernel.straddle_collect``."""
    f, na, pt = _as_arrays(forms, neg_alphas, pts)
    # at most one hit per (step, form)
    out = np.empty((max(1, f.shape[0] * (pt.shape[0] - 1)), 4), dtype=np.int64)
    cdef Py_ssize_t cnt = _collect(f, na, N, p, q, pt, out)
    return [tuple(int(v) for v in row) for row in out[:cnt]]


def straddle_sum(forms, neg_alphas, i64 N, i64 p, i64 q, pts,
                 i64 D0, splits, ndivs, int k):
    """Compiled counterpart of ``_pykernel.straddle_sum``."""
    f, na, pt = _as_arrays(forms, neg_alphas, pts)
    cdef const i64[:, ::1] fm = f
    cdef const double[::1] nam = na
    cdef const i64[:, ::1] ptm = pt
    cdef i64[:, ::1] sp = np.ascontiguousarray(splits, dtype=np.int64).reshape(-1, 2)
    cdef i64[::1] nd = np.ascontiguousarray(ndivs, dtype=np.int64)
    buf = np.empty((max(1, f.shape[0] * (pt.shape[0] - 1)), 4), dtype=np.int64)
    cdef i64[:, ::1] out = buf
    cdef Py_ssize_t cnt, i
    cdef int ch
    cdef i128 acc = 0
    cdef unsigned long long hi, lo
    cdef object total = 0
    with nogil:
        cnt = _collect(fm, nam, N, p, q, ptm, out)
    if k == 2:
        with nogil:
            for i in range(cnt):
                ch = _genus(D0, N, out[i, 0], out[i, 1], out[i, 2], sp, nd)
                if ch:
                    acc += ch * <i128>out[i, 3]
        # split the 128-bit accumulator into two 64-bit halves for Python
        neg = acc < 0
        if neg:
            acc = -acc
        hi = <unsigned long long>(acc >> 64)
        lo = <unsigned long long>acc
        total = (int(hi) << 64) | int(lo)
        return -total if neg else total
    for i in range(cnt):
        ch = _genus(D0, N, out[i, 0], out[i, 1], out[i, 2], sp, nd)
        if ch:
            total += ch * int(out[i, 3]) ** (k - 1)
    return total
