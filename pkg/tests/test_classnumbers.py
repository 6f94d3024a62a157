import math
from fractions import Fraction

import pytest

from lhmaass.classnumbers import (
    c_infty_closed,
    closed_sum,
    fundamental_decomposition,
    hurwitz_H,
    sigma_l,
    sigma_lN,
)
from lhmaass.errors import DomainError
from lhmaass.localpoly import LocalPolyParams, c_infty_series, gamma_from_c_infty, _prefactor_c
from lhmaass.ntkernel import dirichlet_L_nonpositive, dirichlet_L_positive, zeta_even


def test_fundamental_decomposition():
    assert fundamental_decomposition(2, 29) == (29, 1)
    assert fundamental_decomposition(2, 20) == (5, 2)
    assert fundamental_decomposition(1, 12) == (-3, 2)
    assert fundamental_decomposition(1, 4) == (-4, 1)
    assert fundamental_decomposition(2, 3) is None  # 3 is not a discriminant
    assert fundamental_decomposition(2, 0) is None
    with pytest.raises(DomainError):
        fundamental_decomposition(2, -1)


def test_sigma_variants():
    assert sigma_l(1, 5, 1) == 1
    assert sigma_l(2, 1, 6) == 4
    assert sigma_l(1, -1, 6) == Fraction(1) + Fraction(1, 2) + Fraction(1, 3) + Fraction(1, 6)
    for n in range(1, 40):
        assert sigma_lN(1, 6, 1, n) <= sigma_l(1, 1, n)


def test_classical_hurwitz_class_numbers():
    expect = {3: Fraction(1, 3), 4: Fraction(1, 2), 7: 1, 8: 1, 11: 1, 12: Fraction(4, 3),
              15: 2, 16: Fraction(3, 2), 19: 1, 20: 2, 23: 3, 24: 2}
    for n, h in expect.items():
        assert hurwitz_H(1, 1, 1, n) == h, n
    for n in (1, 2, 5, 6):
        assert hurwitz_H(1, 1, 1, n) == 0


def test_n_zero_branch():
    assert hurwitz_H(2, 7, 7, 0) == dirichlet_L_nonpositive(4, 1, 7)
    assert hurwitz_H(2, 1, 7, 0) == 0
    with pytest.raises(DomainError):
        hurwitz_H(2, 3, 7, 5)


@pytest.mark.parametrize("k,D,ell", [(2, 29, 1), (2, 92, 7), (2, 61, 15), (3, -20, 3), (2, 1985, 22)])
def test_H_at_fundamental_is_L_value(k, D, ell):
    sign = (-1) ** k
    h = hurwitz_H(1 - k, ell, ell, abs(D), sign=sign)
    assert h == pytest.approx(dirichlet_L_positive(k, D, ell)[0], rel=1e-12)


def test_zeta_even():
    assert zeta_even(2) == Fraction(1, 6)
    assert zeta_even(4) == Fraction(1, 90)


def test_level_one_telescoping():
    # N = 1: one term, L(k, chi_D) L(k, chi_D0) / zeta(2k)
    P = LocalPolyParams(2, 1, 5, 8)
    one = dirichlet_L_positive(2, 5)[0] * dirichlet_L_positive(2, 8)[0] / (math.pi**4 / 90)
    assert closed_sum(P) == pytest.approx(one, rel=1e-13)
    ser = c_infty_series(P, 10**6)
    assert abs(ser.raw_sum - closed_sum(P)) < max(10 * ser.tail_estimate, 1e-9)


def test_mobius_indicator():
    from lhmaass.ntkernel import divisors, is_squarefree, mobius

    for N in (n for n in range(1, 31) if is_squarefree(n)):
        for a in range(1, 1001):
            s = sum(mobius(l) * (math.gcd(a, l) == 1) for l in divisors(N))
            assert s == (a % N == 0)


@pytest.mark.parametrize(
    "cfg",
    [(2, 7, 92, 29), (2, 7, 57, 29), (2, 15, 181, 61), (2, 22, 1985, 89), (2, 6, 73, 97)],
)
def test_gamma_bridge(cfg):
    P = LocalPolyParams(*cfg)
    ser = c_infty_series(P, 2 * 10**5)
    cl = c_infty_closed(P)
    scale = abs(gamma_from_c_infty(P, _prefactor_c(P)))
    assert abs(ser.gamma - cl.gamma) <= max(2 * ser.tail_estimate * scale, 1e-9 * abs(cl.gamma))


def test_level7_gamma_is_table_constant():
    assert c_infty_closed(LocalPolyParams(2, 7, 92, 29)).gamma == pytest.approx(576, rel=1e-13)


def test_weight_six():
    P = LocalPolyParams(3, 3, -20, -8, research=True)
    ser = c_infty_series(P, 10**5)
    assert abs(ser.raw_sum - closed_sum(P)) < 1e-9


def test_printed_normalisation_differs():
    P = LocalPolyParams(2, 7, 92, 29)
    assert closed_sum(P, as_printed=True) / closed_sum(P) == pytest.approx(2**4 / math.pi**2)
