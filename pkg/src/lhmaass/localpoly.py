r"""
Exact evaluation of the local polynomial sums and of the constant
`c_\infty` by its defining series.

The main sum is

.. math::

    \mathscr{P}(x) = \sum_{Q = [a,b,c],\ N | a,\ a < 0 < Q(x,1)} \chi_{D_0}(Q) Q(x,1)^{k-1},

computed exactly as a :class:`~fractions.Fraction`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .ntkernel import (
    factorize,
    is_fundamental,
    is_prime,
    is_square,
    is_squarefree,
    kronecker,
    prime_divisors,
    smallest_prime_factor_sieve,
    count_sqrt_mod_prime_power,
    sqrt_mod,
)
from .qforms import (
    QuadForm,
    enumerate_simple_forms,
    enumerate_straddling_oracle,
    genus_char,
    genus_data,
    straddle_power_sum,
)

DEFAULT_A_MAX = 10**6


@dataclass(frozen=True)
class LocalPolyParams:
    """Weight parameter ``k`` (forms of weight 2k), level ``N`` and discriminants ``D``, ``D0``."""

    k: int
    N: int
    D: int
    D0: int
    research: bool = False

    @property
    def delta(self) -> int:
        return self.D * self.D0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        k, N, D, D0 = self.k, self.N, self.D, self.D0
        if k < 2:
            raise DomainError("k must be at least 2")
        if N < 1 or not is_squarefree(N):
            raise DomainError(f"N = {N} is not a positive square-free integer")
        delta = D * D0
        if delta <= 0 or delta % 4 not in (0, 1):
            raise DomainError(f"D*D0 = {delta} is not a positive discriminant")
        if is_square(delta):
            raise DomainError(f"D*D0 = {delta} is a square")
        if not is_fundamental(D0):
            raise DomainError(f"D0 = {D0} is not fundamental")
        if self.research:
            return
        sign = (-1) ** k
        if D * sign <= 0 or D0 * sign <= 0:
            raise DomainError("D and D0 must have sign (-1)^k")
        if not is_fundamental(D):
            raise DomainError(f"D = {D} is not fundamental")
        for d in (D, D0):
            if not any((r * r - d) % (4 * N) == 0 for r in range(2 * N)):
                raise DomainError(f"{d} is not a square mod 4N = {4 * N}")
        for ell in prime_divisors(N) if N > 1 else []:
            if kronecker(D, ell) != kronecker(D0, ell):
                raise DomainError(f"(D/{ell}) != (D0/{ell})")


def eval_script_P(params: LocalPolyParams, x) -> Fraction:
    """
    The exact sum over the straddling set at ``x``.

    EXAMPLES::

        >>> eval_script_P(LocalPolyParams(2, 7, 37, 29), Fraction(1, 2))
        Fraction(144, 1)
    """
    return _script_P_cached(params.k, params.N, params.D0, params.delta, Fraction(x) % 1)


@lru_cache(maxsize=1 << 18)
def _script_P_cached(k, N, D0, delta, x):
    return straddle_power_sum(delta, N, D0, x, k)


def eval_script_P_oracle(params: LocalPolyParams, x) -> Fraction:
    """Same value through the brute-force window scan."""
    x = Fraction(x)
    s = 0
    for Q in enumerate_straddling_oracle(params.delta, params.N, x):
        s += genus_char(params.D0, params.N, Q) * Q(x) ** (params.k - 1)
    return Fraction(s)


def script_P_function(params: LocalPolyParams):
    """``x -> eval_script_P(params, x)`` as a plain callable."""
    return lambda x: eval_script_P(params, x)


def simple_form_polynomial(params: LocalPolyParams, x) -> Fraction:
    """Sum of ``chi(Q) Q(x,1)^(k-1)`` over simple forms with ``N | a``."""
    x = Fraction(x)
    s = Fraction(0)
    for Q in _simple_level_forms(params.delta, params.N):
        s += genus_char(params.D0, params.N, Q) * Q(x) ** (params.k - 1)
    return s


@lru_cache(maxsize=32)
def _simple_level_forms(delta, N):
    return tuple(enumerate_simple_forms(delta, N))


def default_samples(params: LocalPolyParams, count: int | None = None) -> list[Fraction]:
    """First ``2k-1`` unit fractions ``1/p``, p prime and coprime to ``N * D * D0``."""
    count = count or 2 * params.k - 1
    bad = params.N * params.delta
    out, p = [], 2
    while len(out) < count:
        if is_prime(p) and bad % p:
            out.append(Fraction(1, p))
        p += 1
    return out


# --- c_infinity by series ------------------------------------------------------


def _local_factor(delta, D0, p, e):
    """Contribution of p^e || a to psi(a) when p does not divide D0."""
    if p == 2:
        r = count_sqrt_mod_prime_power(delta, 2, e + 2) // 2
    else:
        r = count_sqrt_mod_prime_power(delta, p, e)
    return r * kronecker(D0, p) ** e


def psi_value(a: int, params: LocalPolyParams) -> int:
    r"""
    `\psi(a) = \sum_{b \bmod 2a,\ b^2 \equiv \Delta (4a)} \chi_{D_0}([a, b, (b^2-\Delta)/4a])`
    for ``a >= 1`` with ``N | a``, by explicit square roots.
    """
    delta, N, D0 = params.delta, params.N, params.D0
    s = 0
    for b in sqrt_mod(delta, 4 * a):
        if b < 2 * a:
            s += genus_char(D0, N, QuadForm(a, b, (b * b - delta) // (4 * a)))
    return s


def psi_table(params: LocalPolyParams, a_max: int) -> np.ndarray:
    """``psi(a)`` for ``a = N, 2N, ..., <= a_max`` (index ``i`` holds ``a = (i+1) N``)."""
    delta, N, D0 = params.delta, params.N, params.D0
    vals = np.ones(a_max + 1, dtype=np.int64)
    vals[0] = 0
    small = math.isqrt(a_max)
    spf = smallest_prime_factor_sieve(a_max)
    primes = np.nonzero(spf == np.arange(a_max + 1))[0]
    primes = primes[primes >= 2]
    d0_primes = set(prime_divisors(D0)) if abs(D0) > 1 else set()
    for p in primes.tolist():
        if p in d0_primes:
            continue
        if p <= small or delta % p == 0 or p == 2:
            pe, e = p, 1
            while pe <= a_max:
                f = _local_factor(delta, D0, p, e)
                # multiples of p^e but not p^(e+1)
                sl = vals[pe::pe]
                mask = (np.arange(1, sl.shape[0] + 1) % p) != 0
                sl[mask] *= f
                pe *= p
                e += 1
        else:
            # p > sqrt(a_max) appears to the first power only
            vals[p::p] *= _local_factor(delta, D0, p, 1)
    out = vals[N::N].copy()
    # a sharing a prime with D0: the character depends on b
    if d0_primes:
        hit = np.zeros(out.shape[0], dtype=bool)
        for p in d0_primes:
            a = np.arange(1, out.shape[0] + 1) * N
            hit |= a % p == 0
        for i in np.nonzero(hit)[0].tolist():
            out[i] = psi_value((i + 1) * N, params)
    return out


@dataclass(frozen=True)
class CInftySeries:
    """Truncated series for c_infinity and its companions."""

    raw_sum: float  # sum_{N | a <= a_max} psi(a) / a^k
    c_infty: float
    gamma: float
    tail_estimate: float  # for raw_sum
    a_max: int


def _prefactor_c(params):
    k = params.k
    return params.delta ** (k - 0.5) / (2 * k - 1) * math.pi * 2.0 ** (2 - 2 * k)


def gamma_from_c_infty(params: LocalPolyParams, c_inf: float) -> float:
    k = params.k
    return (-1) ** k * 2.0 ** (2 * k - 2) / (math.pi * math.comb(2 * k - 2, k - 1)) * c_inf


def c_infty_series(params: LocalPolyParams, a_max: int = DEFAULT_A_MAX) -> CInftySeries:
    r"""
    Truncation of `c_\infty` at ``a <= a_max``.

    The tail estimate is the largest swing of the partial sums over the last
    half of the range, which tracks the oscillating tail well in practice.
    """
    psi = psi_table(params, a_max)
    a = np.arange(1, psi.shape[0] + 1, dtype=np.float64) * params.N
    terms = psi / a ** params.k
    partial = np.cumsum(terms)
    total = math.fsum(terms.tolist())
    half = partial[partial.shape[0] // 2 :]
    tail = float(np.max(np.abs(half - total))) if half.size else abs(total)
    c_inf = _prefactor_c(params) * total
    return CInftySeries(total, c_inf, gamma_from_c_infty(params, c_inf), tail, a_max)


def partial_sums(params: LocalPolyParams, a_max: int) -> np.ndarray:
    """Partial sums of ``psi(a)/a^k``; entry ``i`` sums over ``a <= (i+1) N``."""
    psi = psi_table(params, a_max)
    a = np.arange(1, psi.shape[0] + 1, dtype=np.float64) * params.N
    return np.cumsum(psi / a ** params.k)


def script_P_prefactor(params: LocalPolyParams) -> float:
    k = params.k
    return (-1) ** (k - 1) * math.comb(2 * k - 2, k - 1) * math.pi * 2.0 ** (2 - 2 * k)


def eval_P(params: LocalPolyParams, x, a_max: int = DEFAULT_A_MAX, series: CInftySeries | None = None) -> float:
    """``c_infty + prefactor * script_P(x)``; the exact part is rounded once at the end."""
    series = series or c_infty_series(params, a_max)
    return series.c_infty + script_P_prefactor(params) * float(eval_script_P(params, x))


def gamma_constant(params: LocalPolyParams, a_max: int = DEFAULT_A_MAX) -> float:
    return c_infty_series(params, a_max).gamma
