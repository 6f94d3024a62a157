r"""
Integral binary quadratic forms, the generalized genus character, and the
two enumerators for the set of forms with ``N | a`` and ``a < 0 < Q(x,1)``.

The fast enumerator uses the continued fraction of ``x``: with convergent
points ``r_{-1} = oo, r_0, ..., r_m = x`` and ``A_j`` the unimodular matrix
with columns ``r_j, r_{j+1}``, every straddling form ``Q`` has a first index
``j`` where ``Q(r_j) < 0 < Q(r_{j+1})``; then ``Q o A_j`` is a simple form
(``a < 0 < c``). So the straddling set is the image of the simple forms
under the ``A_j^{-1}``, keeping the first crossing only.
"""
from __future__ import annotations

import os
from fractions import Fraction
from functools import lru_cache
from math import floor, gcd, isqrt, sqrt
from typing import NamedTuple

import numpy as np

from . import _backend
from .errors import DomainError
from .ntkernel import (
    continued_fraction,
    divisors,
    fundamental_splittings,
    is_fundamental,
    is_square,
    is_squarefree,
)


class QuadForm(NamedTuple):
    """The form ``a x^2 + b x y + c y^2``; tuples order lexicographically."""

    a: int
    b: int
    c: int

    @property
    def disc(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    def __call__(self, x, y=1):
        return self.a * x * x + self.b * x * y + self.c * y * y

    def __neg__(self):
        return QuadForm(-self.a, -self.b, -self.c)


class GL2Matrix(NamedTuple):
    """``[[alpha, beta], [gamma, delta]]``."""

    alpha: int
    beta: int
    gamma: int
    delta: int

    @property
    def det(self) -> int:
        return self.alpha * self.delta - self.beta * self.gamma

    def __matmul__(self, other: "GL2Matrix") -> "GL2Matrix":
        a, b, c, d = self
        e, f, g, h = other
        return GL2Matrix(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "GL2Matrix":
        d = self.det
        if d not in (1, -1):
            raise DomainError("matrix is not unimodular")
        return GL2Matrix(d * self.delta, -d * self.beta, -d * self.gamma, d * self.alpha)


IDENTITY = GL2Matrix(1, 0, 0, 1)
T = GL2Matrix(1, 1, 0, 1)


def apply_matrix(Q, M: GL2Matrix) -> QuadForm:
    """``(Q o M)(x, y) = Q(alpha x + beta y, gamma x + delta y)``."""
    if M.det not in (1, -1):
        raise DomainError("matrix is not unimodular")
    a, b, c = Q
    al, be, ga, de = M
    return QuadForm(
        a * al * al + b * al * ga + c * ga * ga,
        2 * a * al * be + b * (al * de + be * ga) + 2 * c * ga * de,
        a * be * be + b * be * de + c * de * de,
    )


def fricke(Q, N: int) -> QuadForm:
    """``[a, b, c] -> [cN, -b, a/N]``."""
    a, b, c = Q
    if a % N:
        raise DomainError("N must divide a")
    return QuadForm(c * N, -b, a // N)


def check_discriminant(delta: int) -> None:
    if delta <= 0 or delta % 4 not in (0, 1):
        raise DomainError(f"{delta} is not a positive discriminant")
    if is_square(delta):
        raise DomainError(f"discriminant {delta} is a square")


@lru_cache(maxsize=None)
def genus_data(D0: int, N: int):
    """Splittings of D0 and divisors of N used by the genus character."""
    if not is_fundamental(D0):
        raise DomainError(f"D0 = {D0} is not a fundamental discriminant")
    if N < 1 or not is_squarefree(N):
        raise DomainError(f"N = {N} is not a positive square-free integer")
    splits = tuple(fundamental_splittings(D0))
    return splits, tuple(divisors(N))


_INT64_SAFE = 2**62


def genus_char(D0: int, N: int, Q, check_all: bool = False) -> int:
    r"""
    The genus character `\chi_{D_0}(Q)` for `Q = [a, b, c]` with `N | a`.

    Uses the first admissible splitting `D_0 = D_1 D_2`, `N = N_1 N_2` with
    `\gcd(D_1, N_1 a/N) = \gcd(D_2, N_2 c) = 1`. With ``check_all`` every
    admissible splitting is evaluated and required to agree. The value is
    independent of the splitting when ``D0`` and ``disc(Q)/D0`` are squares
    modulo ``4N``; outside that range the first splitting decides.

    EXAMPLES::

        >>> genus_char(1, 7, (-7, 1, 3))
        1
    """
    a, b, c = Q
    if a % N:
        raise DomainError("N must divide a")
    splits, ndivs = genus_data(D0, N)
    if not check_all:
        if max(abs(a), abs(b), abs(c)) < _INT64_SAFE:
            return _backend.genus_char_raw(D0, N, a, b, c, splits, ndivs)
        from . import _pykernel

        return _pykernel.genus_char_raw(D0, N, a, b, c, splits, ndivs)
    ap = a // N
    if gcd(gcd(ap, b), gcd(c, D0)) != 1:
        return 0
    from .ntkernel import kronecker

    vals = {
        kronecker(d1, n1 * ap) * kronecker(d2, (N // n1) * c)
        for d1, d2 in splits
        for n1 in ndivs
        if gcd(d1, n1 * ap) == 1 and gcd(d2, (N // n1) * c) == 1
    }
    if len(vals) > 1:
        raise AssertionError(f"splitting dependence at {Q}: {vals}")
    return vals.pop() if vals else 0


def _simple_forms_compute(delta: int) -> list[QuadForm]:
    out = []
    r = isqrt(delta)
    for b in range(-r, r + 1):
        if (b - delta) % 2:
            continue
        m = (delta - b * b) // 4
        if m <= 0:
            continue
        for d in range(1, isqrt(m) + 1):
            if m % d == 0:
                out.append(QuadForm(-d, b, m // d))
                if d * d != m:
                    out.append(QuadForm(-(m // d), b, d))
    out.sort()
    return out


def _cache_dir():
    path = os.environ.get("LHMAASS_CACHE_DIR")
    return path or None


@lru_cache(maxsize=64)
def simple_form_table(delta: int):
    """
    All simple forms of discriminant ``delta`` (no level condition) as an
    int64 array sorted by decreasing positive root, plus the negated roots.

    Persisted under ``$LHMAASS_CACHE_DIR`` when that variable is set.
    """
    check_discriminant(delta)
    cache = _cache_dir()
    fname = None
    if cache:
        fname = os.path.join(cache, f"simple-{delta}.npy")
        if os.path.exists(fname):
            arr = np.load(fname)
            return arr, _neg_roots(arr, delta)
    forms = _simple_forms_compute(delta)
    arr = np.array(forms, dtype=np.int64).reshape(-1, 3)
    roots = _neg_roots(arr, delta)
    order = np.argsort(roots, kind="stable")
    arr = np.ascontiguousarray(arr[order])
    if fname:
        os.makedirs(cache, exist_ok=True)
        tmp = f"{fname}.{os.getpid()}.tmp"
        with open(tmp, "wb") as fh:
            np.save(fh, arr)
        os.replace(tmp, fname)
    return arr, _neg_roots(arr, delta)


def _neg_roots(arr, delta):
    # positive root of a x^2 + b x + c with a < 0 is (b + sqrt(delta)) / (2|a|)
    a = -arr[:, 0].astype(np.float64)
    b = arr[:, 1].astype(np.float64)
    return np.ascontiguousarray(-(b + sqrt(delta)) / (2.0 * a))


def enumerate_simple_forms(delta: int, N: int = 1) -> list[QuadForm]:
    """
    Forms ``[a, b, c]`` of discriminant ``delta`` with ``a < 0 < c`` and ``N | a``, sorted.

    EXAMPLES::

        >>> enumerate_simple_forms(5)
        [QuadForm(a=-1, b=-1, c=1), QuadForm(a=-1, b=1, c=1)]
    """
    check_discriminant(delta)
    return [Q for Q in _simple_forms_compute(delta) if Q.a % N == 0]


def _check_query(delta, N, x):
    check_discriminant(delta)
    if N < 1 or not is_squarefree(N):
        raise DomainError(f"N = {N} is not a positive square-free integer")
    return Fraction(x)


def enumerate_straddling_oracle(delta: int, N: int, x) -> list[QuadForm]:
    """
    Brute-force window scan: every ``a < 0`` with ``N | a`` and
    ``|a| <= delta q^2 / 4``, every ``b`` with ``|2ax + b| < sqrt(delta)``.
    """
    x = _check_query(delta, N, x)
    p, q = x.numerator, x.denominator
    out = []
    amax = delta * q * q // 4
    for A in range(N, amax + 1, N):
        a = -A
        # window for b*q: |2ap + bq| < sqrt(delta) q
        centre = 2 * A * p
        lo = (centre - isqrt(delta * q * q)) // q - 1
        hi = (centre + isqrt(delta * q * q)) // q + 1
        for b in range(lo, hi + 1):
            if (2 * a * p + b * q) ** 2 >= delta * q * q:
                continue
            num = b * b - delta
            if num % (4 * a):
                continue
            c = num // (4 * a)
            if a * p * p + b * p * q + c * q * q >= 1:
                out.append(QuadForm(a, b, c))
    out.sort()
    return out


def _kernel_ok(delta, q):
    return _backend.BACKEND != "python" and delta * q * q < 2**60


@lru_cache(maxsize=64)
def _simple_lists(delta):
    forms, neg = simple_form_table(delta)
    return [tuple(int(v) for v in row) for row in forms], neg.tolist()


def _reduced(x: Fraction):
    n = floor(x)
    return x - n, n


def _points(x: Fraction):
    cf = continued_fraction(x)
    return cf.convergent_points()


@lru_cache(maxsize=1 << 16)
def _collect(delta: int, N: int, x: Fraction):
    forms, neg = simple_form_table(delta)
    p, q = x.numerator, x.denominator
    pts = _points(x)
    if _kernel_ok(delta, q):
        return _backend.straddle_collect(forms, neg, N, p, q, pts)
    from . import _pykernel

    forms, neg = _simple_lists(delta)
    return _pykernel.straddle_collect(forms, neg, N, p, q, pts)


def enumerate_straddling_fast(delta: int, N: int, x) -> list[QuadForm]:
    """
    Same set as :func:`enumerate_straddling_oracle`, via continued fractions.

    EXAMPLES::

        >>> enumerate_straddling_fast(5, 1, 0)
        [QuadForm(a=-1, b=-1, c=1), QuadForm(a=-1, b=1, c=1)]
    """
    x = _check_query(delta, N, x)
    xr, n = _reduced(x)
    shift = GL2Matrix(1, -n, 0, 1)
    out = []
    for a, b, c, _ in _collect(delta, N, xr):
        Q = QuadForm(a, b, c)
        out.append(apply_matrix(Q, shift) if n else Q)
    if len(set(out)) != len(out):
        raise AssertionError("duplicate forms in straddling set")
    out.sort()
    return out


def straddle_power_sum(delta: int, N: int, D0: int, x: Fraction, k: int) -> Fraction:
    r"""
    `\sum \chi_{D_0}(Q) Q(x,1)^{k-1}` over the straddling set at ``x``.

    ``x`` is reduced mod 1 first (the sum is translation invariant).
    """
    splits, ndivs = genus_data(D0, N)
    xr, _ = _reduced(Fraction(x))
    p, q = xr.numerator, xr.denominator
    forms, neg = simple_form_table(delta)
    pts = _points(xr)
    if _kernel_ok(delta, q):
        s = _backend.straddle_sum(forms, neg, N, p, q, pts, D0, splits, ndivs, k)
    else:
        from . import _pykernel

        forms, neg = _simple_lists(delta)
        s = _pykernel.straddle_sum(forms, neg, N, p, q, pts, D0, splits, ndivs, k)
    return Fraction(s, q ** (2 * k - 2))
