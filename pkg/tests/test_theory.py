import math

import numpy as np
import pytest

from monogrid.theory import (
    NOT_APPLICABLE,
    adaptive_lower_bound,
    amc_asymptote_p1,
    amc_expected_eval_count_p1,
    g_p_constant,
    gg_count_bound,
    gg_rate_constant,
    gi_count_exact,
    mc_rate_constant,
    mc_worst_expected_volume_p1,
    sg_worst_volume,
    si_volume,
    static_lower_bound,
)


def test_sg_worst_volume_examples():
    assert sg_worst_volume(2, 9) == pytest.approx(0.75, abs=1e-15)
    assert sg_worst_volume(1, 11) == pytest.approx(0.1, abs=1e-15)
    # large-n behavior ~ 2 n^(-1/2) in two dimensions
    n = 1001**2
    assert sg_worst_volume(2, n) == pytest.approx(2 / math.sqrt(n), rel=2e-3)


def test_si_volume_examples():
    assert si_volume(2, 4) == pytest.approx(5 / 9, abs=1e-15)
    assert si_volume(1, 1) == 0.5
    assert si_volume(3, 27) == pytest.approx(1 - 27 / 64, abs=1e-15)


def test_si_volume_asymptote():
    for p in (1, 2, 3):
        m = 60
        n = m**p
        ratio = si_volume(p, n) / (p * n ** (-1.0 / p))
        assert abs(ratio - 1.0) < 0.05


def test_static_lower_bound():
    assert static_lower_bound(1, 9) == pytest.approx(0.1, abs=1e-15)
    got = static_lower_bound(2, 40000)
    assert got == pytest.approx(2**-1 * 10**-0.5 * 40000**-0.5, rel=1e-12)
    assert got == pytest.approx(7.91e-4, rel=1e-3)
    assert static_lower_bound(2, 10) is NOT_APPLICABLE


def test_adaptive_lower_bound():
    assert adaptive_lower_bound(1, 5) == 1 / 32
    assert adaptive_lower_bound(2, 100) == pytest.approx(2.5e-3, rel=1e-12)
    assert adaptive_lower_bound(3, 10) is NOT_APPLICABLE


def test_adaptive_never_exceeds_static_bound():
    for p in (2, 3):
        for n in (10 ** (p - 1) * p**p, 10**p * p**p, 10 ** (p + 1) * p**p):
            a = adaptive_lower_bound(p, n)
            s = static_lower_bound(p, n)
            if a is not NOT_APPLICABLE and s is not NOT_APPLICABLE:
                assert a <= s


def test_count_formulas():
    assert gg_count_bound(1, 2) == 4
    assert gg_count_bound(2, 1) == 10
    assert gg_count_bound(2, 2) == 20
    assert gi_count_exact(1, 5) == 5
    assert gi_count_exact(2, 2) == 6
    assert gi_count_exact(3, 2) == 20


def test_g_p_constant():
    assert g_p_constant(2) == pytest.approx(1.0, abs=1e-15)
    assert g_p_constant(3) == pytest.approx(1.5, abs=1e-15)


def test_rate_constants_match_published_table():
    expected = {2: 2.51, 3: 2.43, 4: 2.67, 5: 2.87, 6: 3.06}
    for p, want in expected.items():
        assert round(mc_rate_constant(p), 2) == want
    assert gg_rate_constant(2) == pytest.approx(8.0, abs=1e-12)
    assert gg_rate_constant(3) == pytest.approx(6.0, abs=1e-12)


def test_mc_worst_expectation_examples():
    assert mc_worst_expected_volume_p1(1) == 0.75
    assert mc_worst_expected_volume_p1(0) == 1.0
    n = 10**6
    assert mc_worst_expected_volume_p1(n) == pytest.approx(2 / n, rel=1e-5)


def test_amc_asymptote_value():
    val = amc_asymptote_p1()
    assert val == pytest.approx(-0.23186, abs=5e-6)
    assert val < 0


def test_amc_expected_eval_count_growth():
    # partial sums track 2 ln n + 2(gamma - ln 2)
    for n in (1000, 5000):
        approx = 2 * math.log(n) + amc_asymptote_p1()
        assert amc_expected_eval_count_p1(n) == pytest.approx(approx, abs=2e-3)
