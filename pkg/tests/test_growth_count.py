import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lipgrowth.growth_count import (
    BudgetExceeded,
    ConstraintSystem,
    GrowthSample,
    brute_force_count,
    closed_form_exponent,
    collect_samples,
    count_pairs,
    fit_growth,
    integer_root,
    sample_grid,
    samples_from_csv,
    samples_to_csv,
)

from oracles import integral_example1, integral_example2

EX1 = ConstraintSystem(3, 4, 2, 1, 9)
EX2 = ConstraintSystem(3, 4, 2, 2, 12)


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=0, max_value=10 ** 60), st.integers(min_value=1, max_value=12))
def test_integer_root_bracket(N, q):
    t = integer_root(N, q)
    assert t ** q <= N < (t + 1) ** q


def test_integer_root_errors():
    with pytest.raises(ValueError):
        integer_root(-1, 2)
    with pytest.raises(ValueError):
        integer_root(5, 0)


def test_system_validation():
    with pytest.raises(ValueError):
        ConstraintSystem(0, 2)
    with pytest.raises(ValueError):
        ConstraintSystem(1, 2, p=1)
    with pytest.raises(ValueError):
        ConstraintSystem(1, 2, 0, 0, 3)
    assert EX1.to_json() == {"ell": 3, "m": 4, "p": 2, "q": 1, "n": 9}


def test_known_small_counts():
    assert count_pairs(EX1, 1) == 9
    assert count_pairs(EX1, 2) == 497
    assert count_pairs(EX2, 1) == 9


def test_box_closed_form():
    box = ConstraintSystem(1, 2)
    for L in range(1, 20):
        assert count_pairs(box, L) == (2 * L + 1) * (2 * L * L + 1)


def test_random_systems_match_brute_force():
    rng = random.Random(0)
    for _ in range(150):
        ell, m = rng.randint(1, 3), rng.randint(1, 3)
        p, q = rng.randint(0, 3), rng.randint(0, 3)
        if p + q == 0:
            p = 1
        sys_ = ConstraintSystem(ell, m, p, q, rng.randint(0, p * ell + q * m + 1))
        for L in (1, 2, 3):
            want = brute_force_count(sys_, L)
            assert count_pairs(sys_, L) == want, (sys_, L)
            assert count_pairs(sys_, L, blocked=True) == want, (sys_, L)


@pytest.mark.parametrize("L", [5, 7, 12, 30])
def test_blocked_matches_plain(L):
    for sys_ in (EX1, EX2, ConstraintSystem(2, 3, 3, 2, 9), ConstraintSystem(2, 2, 1, 3, 5)):
        assert count_pairs(sys_, L, blocked=True) == count_pairs(sys_, L)


def test_budget_guard():
    with pytest.raises(BudgetExceeded, match="blocked"):
        count_pairs(EX1, 100, budget=1000)
    assert count_pairs(EX1, 100, budget=1000, blocked=True) > 0


def test_count_is_monotone_in_L():
    counts = [count_pairs(EX2, L) for L in range(1, 12)]
    assert counts == sorted(counts)


def test_closed_form_exponent_cases():
    assert closed_form_exponent(EX1) == (Fraction(13, 2), False)
    assert closed_form_exponent(EX2) == (6, True)
    assert closed_form_exponent(ConstraintSystem(1, 2)) == (3, False)
    # monomial bound inactive
    assert closed_form_exponent(ConstraintSystem(2, 3, 1, 1, 5)) == (5, False)
    # |a b| <= 1: only the axes survive
    assert closed_form_exponent(ConstraintSystem(1, 1, 1, 1, 0)) == (1, False)
    with pytest.raises(ValueError):
        closed_form_exponent(ConstraintSystem(1, 1, 0, 1, 1))


def test_axes_only_growth_is_linear():
    sys_ = ConstraintSystem(1, 1, 1, 1, 0)
    for L in range(1, 8):
        assert count_pairs(sys_, L) == 4 * L + 1 + 4


def test_sample_grid():
    g = sample_grid(16, 256, 9)
    assert g[0] == 16 and g[-1] == 256 and len(g) == 9
    assert g == sorted(set(g))
    assert sample_grid(2, 10, 5, "linear") == [2, 4, 6, 8, 10]
    assert len(sample_grid(2, 3, 10)) == 2
    with pytest.raises(ValueError):
        sample_grid(4, 2, 3)
    with pytest.raises(ValueError):
        sample_grid(2, 4, 3, "cubic")


def test_csv_round_trip():
    samples = collect_samples(EX1, [2, 3, 50], blocked=True)
    text = samples_to_csv(samples)
    assert text.splitlines()[0] == "L,count"
    assert samples_from_csv(text) == samples


# -- fits ------------------------------------------------------------------------


def _synthetic(f, Ls):
    return [GrowthSample(L, int(f(L))) for L in Ls]


def test_fit_exact_power():
    fit = fit_growth(_synthetic(lambda L: 7 * L ** 5, [2 ** k for k in range(2, 10)]))
    assert fit.model == "pure_power"
    assert fit.r_hat == pytest.approx(5, abs=1e-6)
    assert fit.gamma_hat == 0.0


def test_fit_detects_log_factor():
    Ls = sample_grid(16, 256, 9)
    fit = fit_growth(_synthetic(lambda L: L ** 4 * math.log(L) ** 2 * 1000, Ls))
    assert fit.model == "power_log"
    assert fit.r_hat == pytest.approx(4, abs=0.01)
    assert fit.gamma_hat == pytest.approx(2, abs=0.01)


def test_fit_ignores_fractional_power_correction():
    # 1 - L^(-1/2) bends log-log plots but is not a log factor
    Ls = sample_grid(16, 256, 9)
    fit = fit_growth(_synthetic(lambda L: 10 ** 6 * L ** 6.5 * (2 - L ** -0.5), Ls))
    assert fit.model == "pure_power"


def test_fit_input_validation():
    with pytest.raises(ValueError):
        fit_growth(_synthetic(lambda L: L, [2, 3, 4]))
    with pytest.raises(ValueError):
        fit_growth(_synthetic(lambda L: L, [1, 2, 3, 4]))
    with pytest.raises(ValueError):
        fit_growth(_synthetic(lambda L: L, [2, 2, 3, 4]))


def test_fit_huge_counts():
    Ls = [2 ** k for k in range(100, 108)]
    fit = fit_growth([GrowthSample(L, L ** 30) for L in Ls])
    assert fit.r_hat == pytest.approx(30, abs=1e-6)


def test_integral_oracle_calibration():
    """The fit of the continuous integrals bounds what the exact counts can give."""
    Ls = sample_grid(16, 256, 9)
    f1 = fit_growth(_synthetic(integral_example1, Ls))
    assert f1.model == "pure_power" and 6.35 <= f1.r_hat <= 6.65
    f2 = fit_growth(_synthetic(integral_example2, Ls))
    assert f2.model == "power_log" and 5.85 <= f2.r_hat <= 6.15
    assert 0.5 <= f2.gamma_hat <= 1.5
    # exact counts stay close to the oracle
    c1 = fit_growth(collect_samples(EX1, Ls, blocked=True))
    assert abs(c1.r_hat - f1.r_hat) < 0.02
    for L in (16, 64, 256):
        assert count_pairs(EX1, L, blocked=True) / integral_example1(L) == pytest.approx(1, abs=0.05)
