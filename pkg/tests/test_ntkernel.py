import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lhmaass.errors import DomainError
from lhmaass.ntkernel import (
    bernoulli_number,
    bernoulli_poly,
    continued_fraction,
    dirichlet_L_even_closed,
    dirichlet_L_nonpositive,
    dirichlet_L_positive,
    divisors,
    factorize,
    fundamental_splittings,
    is_fundamental,
    is_prime,
    kronecker,
    mobius,
    sqrt_mod,
    zeta_even,
)


def legendre(a, p):
    r = pow(a % p, (p - 1) // 2, p)
    return -1 if r == p - 1 else r


def test_kronecker_examples():
    assert all(kronecker(1, n) == 1 for n in range(-20, 21) if n)
    assert kronecker(29, 7) == 1
    for D in (29, 37, 44, 57, 92):
        assert kronecker(D, 7) == 1


def test_kronecker_matches_euler_criterion():
    for p in (3, 5, 7, 11, 13, 101, 1009):
        for a in range(-50, 50):
            assert kronecker(a, p) == legendre(a, p)


def test_kronecker_at_two():
    # (a/2) depends on a mod 8
    expect = {1: 1, 7: 1, 3: -1, 5: -1}
    for a in range(-40, 40):
        assert kronecker(a, 2) == (0 if a % 2 == 0 else expect[a % 8])


@given(st.integers(-10**6, 10**6), st.integers(1, 10**4), st.integers(1, 10**4))
def test_kronecker_multiplicative(a, m, n):
    assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


def test_kronecker_multiplicative_bulk():
    rng = random.Random(7)
    for _ in range(10**4):
        a = rng.randint(-10**9, 10**9)
        m, n = rng.randint(1, 10**6), rng.randint(1, 10**6)
        assert kronecker(a, m * n) == kronecker(a, m) * kronecker(a, n)


def test_factorize():
    assert factorize(1) == []
    assert factorize(41503) == [(7, 3), (11, 2)]
    assert factorize(89 * 2337) == [(3, 1), (19, 1), (41, 1), (89, 1)]
    with pytest.raises(DomainError):
        factorize(0)


@given(st.integers(1, 10**12))
def test_factorize_reconstructs(n):
    f = factorize(n)
    assert math.prod(p**e for p, e in f) == n
    assert [p for p, _ in f] == sorted({p for p, _ in f})
    assert all(is_prime(p) for p, _ in f)


def test_is_prime_against_sieve():
    sieve = [True] * 5000
    sieve[0] = sieve[1] = False
    for i in range(2, 71):
        for j in range(i * i, 5000, i):
            sieve[j] = False
    assert [n for n in range(5000) if is_prime(n)] == [n for n in range(5000) if sieve[n]]


def test_divisors_and_mobius():
    assert divisors(12) == [1, 2, 3, 4, 6, 12]
    assert [mobius(n) for n in range(1, 11)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]


def test_fundamental():
    assert [d for d in range(-30, 31) if is_fundamental(d)] == [
        -24, -23, -20, -19, -15, -11, -8, -7, -4, -3, 1, 5, 8, 12, 13, 17, 21, 24, 28, 29,
    ]
    for d0 in (29, 61, 89, -20, 1985):
        for d1, d2 in fundamental_splittings(d0):
            assert d1 * d2 == d0


def test_continued_fraction_examples():
    assert continued_fraction(Fraction(1, 2)).quotients == (0, 2)
    cf = continued_fraction(Fraction(27, 68))
    assert cf.value == Fraction(27, 68)
    assert cf.quotients[-1] >= 2
    a = continued_fraction(Fraction(27, 68) + 1)
    assert a.quotients[1:] == cf.quotients[1:] and a.quotients[0] == cf.quotients[0] + 1


def _check_cf(x):
    cf = continued_fraction(x)
    assert cf.value == x
    if len(cf.quotients) > 1:
        assert cf.quotients[-1] >= 2
        assert all(t >= 1 for t in cf.quotients[1:])
    p, q = cf.p, cf.q
    for i in range(1, len(p)):
        assert p[i] * q[i - 1] - p[i - 1] * q[i] == (-1) ** (i - 1)


@given(st.fractions(max_denominator=10**18).filter(lambda f: abs(f) < 10**18))
def test_continued_fraction_round_trip(x):
    _check_cf(x)


def test_continued_fraction_round_trip_bulk():
    rng = random.Random(3)
    for _ in range(10**4):
        _check_cf(Fraction(rng.randint(-10**18, 10**18), rng.randint(1, 10**18)))


def test_bernoulli():
    assert [bernoulli_number(n) for n in range(5)] == [1, Fraction(-1, 2), Fraction(1, 6), 0, Fraction(-1, 30)]
    for n in range(8):
        assert bernoulli_poly(n, 0) == bernoulli_number(n)
    # B_n(1) = B_n(0) for n >= 2
    for n in range(2, 10):
        assert bernoulli_poly(n, 1) == bernoulli_number(n)


def test_zeta_consistency():
    for k in range(2, 21, 2):
        assert dirichlet_L_nonpositive(k, 1) == -bernoulli_number(k) / k
    assert dirichlet_L_nonpositive(2, 1) == Fraction(-1, 12)
    assert dirichlet_L_nonpositive(4, 1, 7) == Fraction(1, 120) * (1 - 7**3)
    with pytest.raises(DomainError):
        dirichlet_L_nonpositive(0, 1)


def test_l_negative_integers_small_characters():
    # L(0, chi_-4) = 1/2, L(0, chi_-3) = 1/3, L(-1, chi_5) = -2/5
    assert dirichlet_L_nonpositive(1, -4) == Fraction(1, 2)
    assert dirichlet_L_nonpositive(1, -3) == Fraction(1, 3)
    assert dirichlet_L_nonpositive(2, 5) == Fraction(-2, 5)


def test_l_positive():
    v, tail = dirichlet_L_positive(2, 1, tol=1e-13)
    assert abs(v - math.pi**2 / 6) < 1e-12
    assert tail > 0
    assert abs(float(zeta_even(2)) * math.pi**2 - math.pi**2 / 6) < 1e-15
    closed = dirichlet_L_even_closed(2, 5)
    direct, _ = dirichlet_L_positive(2, 5, tol=1e-13)
    assert abs(closed - direct) < 1e-10
    # Euler factor identity
    for t, ell in ((5, 3), (-4, 15), (29, 7)):
        full, _ = dirichlet_L_positive(3, t)
        part, _ = dirichlet_L_positive(3, t, ell)
        fac = math.prod(1 - kronecker(t, p) * p**-3 for p, _ in factorize(ell))
        assert abs(part - full * fac) < 1e-12


@given(st.integers(-5000, 5000), st.integers(1, 2000))
@settings(max_examples=300)
def test_sqrt_mod_complete(n, m):
    roots = sqrt_mod(n, m)
    assert roots == sorted(r for r in range(m) if (r * r - n) % m == 0)
