r"""
Integer and rational arithmetic shared by the rest of the package.

Exact quantities are plain ``int`` and :class:`fractions.Fraction`; the
float path is only used for L-values at positive integers.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
import math
from math import comb, gcd, isqrt

from .errors import DomainError


def kronecker(a: int, n: int) -> int:
    r"""
    Extended Kronecker symbol `(a/n)`.

    EXAMPLES::

        >>> kronecker(29, 7)
        1
        >>> kronecker(-4, -1)
        -1
    """
    if n == 0:
        return 1 if a in (1, -1) else 0
    res = 1
    if n < 0:
        n = -n
        if a < 0:
            res = -res
    v = (n & -n).bit_length() - 1
    if v:
        if a % 2 == 0:
            return 0
        n >>= v
        if v % 2 and a % 8 in (3, 5):
            res = -res
    a %= n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                res = -res
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            res = -res
        a %= n
    return res if n == 1 else 0


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for n < 3.3e24."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for b in _MR_BASES:
        x = pow(b, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=4096)
def _factor_cached(n: int) -> tuple[tuple[int, int], ...]:
    out = []
    for p in (2, 3):
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
    p, step = 5, 2
    while p * p <= n:
        if is_prime(n):
            break
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        if e:
            out.append((p, e))
        p += step
        step = 6 - step
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def factorize(n: int) -> list[tuple[int, int]]:
    """
    Prime factorisation of ``|n|`` as a sorted list of ``(p, e)``.

    Trial division by 6k+-1 with a primality check on the cofactor, which is
    plenty for the sizes used here (below ~1e15).
    """
    if n == 0:
        raise DomainError("cannot factor 0")
    return list(_factor_cached(abs(n)))


def prime_divisors(n: int) -> list[int]:
    return [p for p, _ in factorize(n)]


def divisors(n: int) -> list[int]:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**i for d in divs for i in range(e + 1)]
    return sorted(divs)


def is_squarefree(n: int) -> bool:
    return n != 0 and all(e == 1 for _, e in factorize(n))


def mobius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def is_square(n: int) -> bool:
    return n >= 0 and isqrt(n) ** 2 == n


def is_discriminant(d: int) -> bool:
    return d % 4 in (0, 1)


def is_fundamental(d: int) -> bool:
    """True for fundamental discriminants, and for 1."""
    if d == 1:
        return True
    if d == 0:
        return False
    if d % 4 == 1:
        return is_squarefree(d)
    if d % 4 == 0:
        m = d // 4
        return m % 4 in (2, 3) and is_squarefree(m)
    return False


def fundamental_splittings(d0: int) -> list[tuple[int, int]]:
    """All ordered pairs (d1, d2) of fundamental discriminants (or 1) with d1*d2 = d0."""
    out = []
    for a in divisors(d0):
        for d1 in (a, -a):
            if d0 % d1:
                continue
            d2 = d0 // d1
            if is_fundamental(d1) and is_fundamental(d2):
                out.append((d1, d2))
    return sorted(set(out))


@dataclass(frozen=True)
class ContinuedFraction:
    """Finite continued fraction ``[a0; a1, ..., am]`` with convergents."""

    quotients: tuple[int, ...]
    p: tuple[int, ...]
    q: tuple[int, ...]

    @property
    def value(self) -> Fraction:
        return Fraction(self.p[-1], self.q[-1])

    def convergent_points(self) -> list[tuple[int, int]]:
        """``[(1, 0), (p0, q0), ..., (pm, qm)]``, i.e. with r_{-1} = infinity prepended."""
        return [(1, 0)] + list(zip(self.p, self.q))


def continued_fraction(x: Fraction | int) -> ContinuedFraction:
    """
    Canonical continued fraction of a rational (last quotient >= 2 when m >= 1).

    EXAMPLES::

        >>> continued_fraction(Fraction(1, 2)).quotients
        (0, 2)
    """
    x = Fraction(x)
    num, den = x.numerator, x.denominator
    quo = []
    while den:
        t = num // den
        quo.append(t)
        num, den = den, num - t * den
    if len(quo) > 1 and quo[-1] == 1:
        quo.pop()
        quo[-1] += 1
    ps, qs = [], []
    p1, q1, p2, q2 = 1, 0, 0, 1
    for t in quo:
        p1, p2 = t * p1 + p2, p1
        q1, q2 = t * q1 + q2, q1
        ps.append(p1)
        qs.append(q1)
    return ContinuedFraction(tuple(quo), tuple(ps), tuple(qs))


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """B_n with B_1 = -1/2."""
    if n < 0:
        raise DomainError("n must be non-negative")
    if n == 0:
        return Fraction(1)
    if n > 1 and n % 2:
        return Fraction(0)
    s = sum(comb(n + 1, j) * bernoulli_number(j) for j in range(n))
    return -s / (n + 1)


def bernoulli_poly(n: int, x) -> Fraction:
    x = Fraction(x)
    return sum(comb(n, j) * bernoulli_number(j) * x ** (n - j) for j in range(n + 1))


def generalized_bernoulli(k: int, t: int) -> Fraction:
    """B_{k, chi_t} for the Kronecker character of the discriminant t (or 1)."""
    f = abs(t)
    if f == 1:
        # principal character: B_{k,1} = B_k except B_{1,1} = +1/2
        return Fraction(1, 2) if k == 1 else bernoulli_number(k)
    s = sum(kronecker(t, a) * bernoulli_poly(k, Fraction(a, f)) for a in range(1, f + 1))
    return Fraction(f) ** (k - 1) * s


def dirichlet_L_nonpositive(k: int, t: int, ell: int = 1) -> Fraction:
    """
    Exact ``L_ell(1-k, chi_t)``, the L-value with Euler factors at primes
    dividing ``ell`` removed.

    EXAMPLES::

        >>> dirichlet_L_nonpositive(2, 1)
        Fraction(-1, 12)
    """
    if k < 1:
        raise DomainError("k must be positive")
    val = -generalized_bernoulli(k, t) / k
    for p in prime_divisors(ell) if ell > 1 else []:
        val *= 1 - kronecker(t, p) * Fraction(p) ** (k - 1)
    return val


def dirichlet_L_positive(k: int, t: int, ell: int = 1, tol: float = 1e-15) -> tuple[float, float]:
    """
    ``L_ell(k, chi_t)`` for ``k >= 2``.

    Sums ``n <= X`` directly, ``X`` a multiple of the conductor, then adds
    the rest exactly per residue class with the Hurwitz zeta function.
    Returns ``(value, bound)``: ``bound = X^(1-k)/(k-1)`` dominates the part
    taken from the Hurwitz tail.
    """
    import numpy as np
    from scipy.special import zeta as hurwitz

    if k < 2:
        raise DomainError("k must be at least 2")
    f = abs(t)
    X = int(max(2.0, (1.0 / (tol * (k - 1))) ** (1.0 / (k - 1))))
    X = min(X, 200_000)
    X = (X // f + 1) * f
    n = np.arange(1, X + 1, dtype=np.int64)
    chi = np.array([kronecker(t, a) for a in range(f)], dtype=np.float64)
    w = chi[n % f]
    terms = w / n.astype(np.float64) ** k
    head = math.fsum(terms.tolist())
    # n = X + a + f j, j >= 0
    tail = math.fsum(chi[a % f] * hurwitz(k, (X + a) / f) for a in range(1, f + 1) if chi[a % f]) / f**k
    val = head + tail
    for p in prime_divisors(ell) if ell > 1 else []:
        val *= 1 - kronecker(t, p) * float(p) ** (-k)
    return val, X ** (1 - k) / (k - 1)


def dirichlet_L_even_closed(k: int, t: int, ell: int = 1) -> float:
    """
    ``L_ell(k, chi_t)`` for even ``chi_t`` (t > 0) and even ``k`` via the
    functional equation and generalized Bernoulli numbers.
    """
    from math import factorial, pi, sqrt

    if t <= 0 or k % 2:
        raise DomainError("closed form needs t > 0 and k even")
    f = abs(t)
    b = generalized_bernoulli(k, t)
    val = (-1) ** (1 + k // 2) * sqrt(f) / 2 * (2 * pi / f) ** k * float(b) / factorial(k)
    for p in prime_divisors(ell) if ell > 1 else []:
        val *= 1 - kronecker(t, p) * p ** (-k)
    return val


def zeta_even(k: int) -> Fraction:
    """zeta(2n) / pi^(2n) as an exact rational, for k = 2n >= 2."""
    from math import factorial

    if k < 2 or k % 2:
        raise DomainError("k must be even and positive")
    return Fraction((-1) ** (k // 2 + 1) * 2 ** (k - 1)) * bernoulli_number(k) / factorial(k)


def _tonelli(n: int, p: int) -> int:
    """A square root of the quadratic residue n modulo the odd prime p."""
    n %= p
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while pow(z, (p - 1) // 2, p) != p - 1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(n, q, p), pow(n, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c, t, r = i, b * b % p, t * b * b % p, r * b % p
    return r


def count_sqrt_mod_prime_power(n: int, p: int, e: int) -> int:
    """Number of x mod p^e with x^2 = n (mod p^e)."""
    if p != 2 and n % p:
        return 1 + kronecker(n, p)
    return len(sqrt_mod_prime_power(n % p**e, p, e))


@lru_cache(maxsize=None)
def sqrt_mod_prime_power(n: int, p: int, e: int) -> tuple[int, ...]:
    """All x mod p^e with x^2 = n (mod p^e)."""
    pe = p**e
    if p != 2 and n % p:
        if kronecker(n, p) != 1:
            return ()
        r = _tonelli(n, p)
        m = p
        # Newton/Hensel lift of the simple root
        for _ in range(e - 1):
            m *= p
            r = (r - (r * r - n) * pow(2 * r, -1, m)) % m
        return tuple(sorted({r % pe, (-r) % pe}))
    # p | n or p = 2: lift one digit at a time (these p are small here)
    roots = [x for x in range(p) if (x * x - n) % p == 0]
    m = p
    for _ in range(e - 1):
        mp = m * p
        roots = [x + t * m for x in roots for t in range(p) if ((x + t * m) ** 2 - n) % mp == 0]
        m = mp
    return tuple(sorted(roots))


def sqrt_mod(n: int, m: int) -> list[int]:
    """All x mod m with x^2 = n (mod m), combined by CRT."""
    sols, mod = [0], 1
    for p, e in factorize(m) if m > 1 else []:
        pe = p**e
        rs = sqrt_mod_prime_power(n % pe, p, e)
        if not rs:
            return []
        inv = pow(mod, -1, pe)
        sols = [x + mod * ((r - x) * inv % pe) for x in sols for r in rs]
        mod *= pe
    return sorted(sols)


def smallest_prime_factor_sieve(n: int):
    """numpy array s with s[m] the least prime factor of m (s[0] = 0, s[1] = 1)."""
    import numpy as np

    s = np.zeros(n + 1, dtype=np.int64)
    for p in range(2, isqrt(n) + 1):
        if s[p] == 0:
            blk = s[p * p :: p]
            blk[blk == 0] = p
    idx = np.nonzero(s == 0)[0]
    s[idx] = idx
    return s
