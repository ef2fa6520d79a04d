import math
from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from gkdeform.majorant import (check_exp_bound, check_square_bound, exp_lower_bound, exp_upper_bound,
                               majorant_certificate, majorant_coeffs, series_exp, series_square)
from gkdeform.clifford import CliffordElement
from gkdeform.series import TruncSeries
from gkdeform.stability import flat_gk_torus, solve_stability

lams = st.fractions(min_value=0, max_value=8, max_denominator=16)


def test_coefficients():
    assert majorant_coeffs(2, 3) == [0, Fraction(1, 16), Fraction(2, 64), Fraction(4, 144)]


def exp_by_powers(M):
    """Sum of M^j / j! truncated at the length of M."""
    N = len(M) - 1
    out = [Fraction(0)] * (N + 1)
    power = [Fraction(1)] + [Fraction(0)] * N
    for j in range(N + 1):
        out = [x + p / math.factorial(j) for x, p in zip(out, power)]
        power = [sum((power[i] * M[v - i] for i in range(v + 1)), Fraction(0)) for v in range(N + 1)]
    return out


@settings(max_examples=20, deadline=None)
@given(st.fractions(min_value=Fraction(1, 8), max_value=8, max_denominator=8))
def test_series_exp_matches_power_sum(c):
    M = majorant_coeffs(c, 8)
    assert series_exp(M) == exp_by_powers(M)


@settings(max_examples=50, deadline=None)
@given(lams)
def test_exp_brackets(lam):
    lo, hi = exp_lower_bound(lam), exp_upper_bound(lam)
    assert lo <= hi
    assert float(lo) <= math.exp(lam) * (1 + 1e-12) and math.exp(lam) <= float(hi) * (1 + 1e-12)


@settings(max_examples=10, deadline=None)
@given(st.sampled_from(["1/4", "1/2", "1", "3", "4"]))
def test_bounds_hold(c):
    assert check_square_bound(c, 60)["ok"]
    assert check_exp_bound(c, 1 / Fraction(c), 60)["ok"]


def test_square_is_convolution():
    assert series_square([0, 1, 2]) == [0, 0, 1]


def test_trivial_certificate():
    gk = flat_gk_torus()
    rep = solve_stability(gk, TruncSeries.zero(CliffordElement, gk.m, gk.ring, 2), None, 2, 2)
    cert = majorant_certificate(1, 1, "1/2", "1/4", 2, rep)
    tr = cert["tracking"]
    assert cert["ok"] and tr["K1_min"] == "0" and tr["K2_min"] == "0" and tr["given_K1_plus_K2_lt_1"]
