r"""
Generalized Hurwitz class numbers `H(k,1,\ell,N;n)` and the closed form of
`c_\infty` built from them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .localpoly import LocalPolyParams, _prefactor_c, gamma_from_c_infty
from .ntkernel import (
    divisors,
    factorize,
    is_square,
    kronecker,
    mobius,
    prime_divisors,
    zeta_even,
)
from .ntkernel import dirichlet_L_even_closed, dirichlet_L_nonpositive, dirichlet_L_positive


def fundamental_decomposition(k: int, n: int) -> tuple[int, int] | None:
    """
    ``(t, m)`` with ``(-1)^k n = t m^2`` and ``t`` fundamental (or 1), else None.

    EXAMPLES::

        >>> fundamental_decomposition(2, 20)
        (5, 2)
    """
    if n < 0:
        raise DomainError("n must be non-negative")
    if n == 0:
        return None
    v = n if k % 2 == 0 else -n
    core = 1 if v > 0 else -1
    for p, e in factorize(v):
        if e % 2:
            core *= p
    t = core if core % 4 == 1 else 4 * core
    if v % t:
        return None
    m2 = v // t
    if not is_square(m2):
        return None
    return t, math.isqrt(m2)


def sigma_l(ell: int, s: int, n: int) -> Fraction:
    """Sum of r^s over divisors r of n coprime to ell."""
    return sum((Fraction(r) ** s for r in divisors(n) if math.gcd(ell, r) == 1), Fraction(0))


def sigma_lN(ell: int, N: int, s: int, n: int) -> Fraction:
    """As :func:`sigma_l`, also requiring gcd(n/r, N/ell) = 1."""
    M = N // ell
    return sum(
        (Fraction(r) ** s for r in divisors(n) if math.gcd(ell, r) == 1 and math.gcd(n // r, M) == 1),
        Fraction(0),
    )


def _L(kk: int, t: int, ell: int):
    """``L_ell(1-kk, chi_t)``: exact for kk >= 1, a float for kk <= 0."""
    if kk >= 1:
        return dirichlet_L_nonpositive(kk, t, ell)
    s = 1 - kk
    if t > 0 and s % 2 == 0:
        return dirichlet_L_even_closed(s, t, ell)
    return dirichlet_L_positive(s, t, ell)[0]


def hurwitz_H(k: int, ell: int, N: int, n: int, sign: int | None = None):
    r"""
    Generalized Hurwitz class number `H(k,1,\ell,N;n)`.

    ``sign`` overrides the `(-1)^k` used to decompose ``n``; exact
    (Fraction) when the L-value sits at a non-positive integer, float when
    ``k <= 0`` puts it at a positive integer.
    """
    if N % ell:
        raise DomainError("ell must divide N")
    if n == 0:
        if ell != N:
            return Fraction(0)
        return _L(2 * k, 1, N)
    sgn = (-1) ** (k % 2) if sign is None else sign
    dec = fundamental_decomposition(0 if sgn > 0 else 1, n)
    if dec is None:
        return Fraction(0)
    t, m = dec
    L = _L(k, t, ell)
    exact = isinstance(L, Fraction)
    one = Fraction(1) if exact else 1.0

    def pw(a, e):
        return Fraction(a) ** e if exact else float(a) ** e

    s = 0 * one
    for a in divisors(m):
        if math.gcd(a, N) != 1:
            continue
        mu = mobius(a)
        if not mu:
            continue
        if ell == N:
            sig = sigma_l(N, 2 * k - 1, m // a)
        else:
            sig = sigma_lN(ell, N, 1, m // a)
        s += mu * kronecker(t, a) * pw(a, k - 1) * (sig if exact else float(sig))
    if ell == N:
        return L * s
    fac = one
    for p in prime_divisors(N // ell):
        fac *= (1 - kronecker(t, p) * pw(p, -k)) / (1 - pw(p, -2 * k))
    return L * fac * s


@dataclass(frozen=True)
class CInftyClosed:
    raw_sum: float  # comparable with CInftySeries.raw_sum
    c_infty: float
    gamma: float


def closed_sum(params: LocalPolyParams, as_printed: bool = False) -> float:
    r"""
    `\zeta(2k)^{-1} \sum_{\ell | N} \mu(\ell) \prod_{p|\ell} (1-p^{-2k})^{-1} H(1-k,1,\ell,\ell;D) H(1-k,1,\ell,\ell;D_0)`.

    This equals the truncated series' limit `\sum_{N|a} \psi(a) a^{-k}`.
    ``as_printed`` multiplies by `2^{4k-4}/\pi^2`, the normalisation in which
    the constant is sometimes stated; it does not match the series.
    """
    k, N, D, D0 = params.k, params.N, params.D, params.D0
    if k < 2:
        raise DomainError("k must exceed 1")
    total = 0.0
    sign = (-1) ** (k % 2)
    for ell in divisors(N):
        mu = mobius(ell)
        if not mu:
            continue
        fac = 1.0
        for p in prime_divisors(ell) if ell > 1 else []:
            fac /= 1 - p ** (-2 * k)
        hD = hurwitz_H(1 - k, ell, ell, abs(D), sign=sign)
        hD0 = hurwitz_H(1 - k, ell, ell, abs(D0), sign=sign)
        total += mu * fac * float(hD) * float(hD0)
    zeta = float(zeta_even(2 * k)) * math.pi ** (2 * k)
    out = total / zeta
    if as_printed:
        out *= 2 ** (4 * k - 4) / math.pi**2
    return out


def c_infty_closed(params: LocalPolyParams, as_printed: bool = False) -> CInftyClosed:
    s = closed_sum(params, as_printed)
    c = _prefactor_c(params) * s
    return CInftyClosed(s, c, gamma_from_c_infty(params, c))
