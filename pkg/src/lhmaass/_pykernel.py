"""
Pure-Python version of the hot loops. Same signatures as the compiled
``_kernel`` module; selected automatically when that is unavailable.

``forms`` is a sequence of simple forms (a, b, c) sorted by decreasing
positive root, ``alphas`` the matching roots (floats, for pruning only).
``pts`` are the continued fraction points r_{-1} = (1, 0), r_0, ..., r_m of
a rational x = p/q in [0, 1).
"""
from bisect import bisect_left
from math import gcd

from .ntkernel import kronecker

BACKEND = "python"


def _prefix(neg_alphas, t):
    # number of forms with alpha > t, with a little slack for rounding
    return bisect_left(neg_alphas, -t + 1e-9)


def straddle_collect(forms, neg_alphas, N, p, q, pts):
    """List of (a, b, c, Q(p, q)) for the straddling forms at p/q with N | a."""
    out = []
    m = len(pts) - 1
    for j in range(m):
        pj, qj = pts[j]
        pk, qk = pts[j + 1]
        det = pj * qk - pk * qj
        # A_j^{-1} = det * [[qk, -pk], [-qj, pj]]
        al, be, ga, de = det * qk, -det * pk, -det * qj, det * pj
        tP = al * p + be * q
        tQ = ga * p + de * q
        if tQ < 0:
            tP, tQ = -tP, -tQ
        n = _prefix(neg_alphas, tP / tQ)
        for i in range(n):
            a0, b0, c0 = forms[i]
            val = a0 * tP * tP + b0 * tP * tQ + c0 * tQ * tQ
            if val <= 0:
                continue
            a = a0 * al * al + b0 * al * ga + c0 * ga * ga
            if a % N:
                continue
            # keep only the first negative -> positive crossing
            ok = True
            for r in range(j - 1, -1, -1):
                pr, qr = pts[r]
                u = al * pr + be * qr
                v = ga * pr + de * qr
                if a0 * u * u + b0 * u * v + c0 * v * v > 0:
                    ok = False
                    break
            if not ok:
                continue
            b = 2 * a0 * al * be + b0 * (al * de + be * ga) + 2 * c0 * ga * de
            c = a0 * be * be + b0 * be * de + c0 * de * de
            out.append((a, b, c, val))
    return out


def genus_char_raw(D0, N, a, b, c, splits, ndivs):
    ap = a // N
    if gcd(gcd(ap, b), gcd(c, D0)) != 1:
        return 0
    for d1, d2 in splits:
        for n1 in ndivs:
            n2 = N // n1
            if gcd(d1, n1 * ap) == 1 and gcd(d2, n2 * c) == 1:
                return kronecker(d1, n1 * ap) * kronecker(d2, n2 * c)
    return 0


def straddle_sum(forms, neg_alphas, N, p, q, pts, D0, splits, ndivs, k):
    """Sum of chi(Q) * Q(p, q)^(k-1) over the straddling set (an integer)."""
    s = 0
    e = k - 1
    for a, b, c, val in straddle_collect(forms, neg_alphas, N, p, q, pts):
        ch = genus_char_raw(D0, N, a, b, c, splits, ndivs)
        if ch:
            s += ch * val**e
    return s
