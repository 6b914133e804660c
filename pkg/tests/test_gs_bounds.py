from fractions import Fraction
from math import comb

import pytest
import sympy

from raag_workbench.errors import PreconditionError
from raag_workbench.gs_bounds import (
    BigCount,
    bound_exponent,
    default_r,
    delta,
    gamma,
    gs_inequality_holds,
    gs_value,
    jz_profile,
    optimize_tau,
    order_F_mod_Dr,
    order_envelope,
)


def witt(n: int, rank: int = 2) -> int:
    """Dimension of the degree-n part of the free Lie algebra of the given rank."""
    return sum(sympy.mobius(d) * rank ** (n // d) for d in sympy.divisors(n)) // n


def restricted_dim(n: int) -> int:
    """Degree-n part of the free restricted Lie algebra over F_2: sum of L(n / 2^k)."""
    total, m = 0, n
    while True:
        total += witt(m)
        if m % 2:
            return total
        m //= 2


def test_default_r_examples():
    assert default_r(1) == 4
    assert default_r(2) == 6
    assert default_r(3) == 7
    for n in range(1, 300):
        r = default_r(n)
        assert 2 ** r >= 9 * n * n > 2 ** (r - 1)
    with pytest.raises(PreconditionError):
        default_r(0)


def test_gs_inequality_examples():
    assert gs_value(1, Fraction(2, 3), 4) == Fraction(-11, 81)
    assert gs_inequality_holds(1, Fraction(2, 3), 4)
    assert gs_value(1, Fraction(2, 3), 1) == Fraction(1, 3)
    assert not gs_inequality_holds(1, Fraction(2, 3), 1)
    for bad in (Fraction(1, 2), 1, Fraction(1, 4)):
        with pytest.raises(PreconditionError):
            gs_inequality_holds(1, bad, 4)


def test_rearranged_inequality():
    # n tau^r < 2 tau - 1 is the same statement
    for n in (1, 5, 40):
        for tau in (Fraction(3, 5), Fraction(2, 3), Fraction(9, 10)):
            for r in range(1, 30):
                assert gs_inequality_holds(n, tau, r) == (n * tau ** r < 2 * tau - 1)


def test_jz_profile_examples():
    assert jz_profile(4, "bound").dims == (2, 4, 8)
    exact = jz_profile(8, "exact").dims
    assert exact[:2] == (2, 3)
    assert list(exact) == [restricted_dim(n) for n in range(1, 8)]
    with pytest.raises(PreconditionError):
        jz_profile(3, "other")


def test_exact_dims_satisfy_series_identity():
    # prod (1 + t^l)^b_l, expanded by binomials and truncated, equals sum 2^n t^n
    deg = 12
    dims = jz_profile(deg + 1, "exact").dims
    coeffs = [1] + [0] * deg
    for l, b in enumerate(dims, 1):
        factor = [0] * (deg + 1)
        for k in range(b + 1):
            if k * l <= deg:
                factor[k * l] = comb(b, k)
        coeffs = [sum(coeffs[i] * factor[n - i] for i in range(n + 1)) for n in range(deg + 1)]
    assert coeffs == [2 ** n for n in range(deg + 1)]


def test_order_examples():
    assert order_F_mod_Dr(1) == 1
    assert order_F_mod_Dr(4, "bound") == BigCount.power_of_two(14)
    assert order_F_mod_Dr(4, "bound") <= order_envelope(4)
    assert order_F_mod_Dr(3, "exact") == 32


def test_gamma_delta_examples():
    assert gamma(1) == BigCount.power_of_two(14)
    assert gamma(1) <= BigCount.power_of_two(17)
    assert gamma(2) == BigCount.power_of_two(124)
    assert str(delta(1)) == "2^14 + 1"
    assert delta(1) < BigCount.power_of_two(18)
    d3 = delta(3)
    assert d3.exponent == 378 and d3.offset == 3 and str(d3) == "2^378 + 3"
    assert d3 < BigCount.power_of_two(486)
    assert int(d3) == 2 ** 378 + 3


def test_bigcount_arithmetic():
    a = BigCount.power_of_two(10)
    assert a.value == 1024 and a.log2() == 10
    assert BigCount.of(1024) == a and BigCount.of(6).value == 6
    assert a ** 3 == BigCount.power_of_two(30)
    assert (a + 3) ** 2 == BigCount.of(1027 ** 2)
    assert a + 1 > a and a < a + 1 and a == 1024
    assert BigCount.power_of_two(10 ** 6) > BigCount.power_of_two(10 ** 6 - 1) + 5
    with pytest.raises(ValueError):
        BigCount.of(-1)


def test_bound_exponent_matches_gamma():
    for n in range(1, 20):
        assert gamma(n).exponent == bound_exponent(n, default_r(n))


def test_optimize_examples():
    opt = optimize_tau(1)
    assert opt.feasible and opt.exponent <= 14
    assert gs_inequality_holds(1, opt.tau, opt.r)
    # r one smaller is infeasible for every grid tau
    assert not any(gs_inequality_holds(1, Fraction(1, 2) + Fraction(k, 128), opt.r - 1) for k in range(1, 64))
    capped = optimize_tau(10, r_cap=2)
    assert not capped.feasible and capped.tau is None


def test_exact_mode_never_exceeds_bound_mode():
    for n in range(1, 7):
        assert gamma(n, "exact") <= gamma(n, "bound")
        assert delta(n, "exact") <= delta(n, "bound")
