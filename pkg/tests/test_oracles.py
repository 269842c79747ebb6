import itertools

import numpy as np
import pytest

from monogrid.oracles import (
    ARCTAN_MU_RANGES,
    ArctanContourOracle,
    BoundaryCornerOracle,
    HalfSpaceOracle,
    IllustrationOracle,
    StaircaseOracle,
    ThresholdOracle,
    make_oracle,
)


def test_illustration_examples(illustration):
    assert illustration((0.0, 0.0)) == -1
    assert illustration((1.0, 1.0)) == 1
    assert illustration((0.5, 0.2)) == -1


def test_illustration_vectorized_matches_scalar(illustration):
    rng = np.random.default_rng(0)
    pts = rng.random((200, 2))
    assert illustration.label_many(pts).tolist() == [illustration(row) for row in pts]


def test_arctan_examples():
    oracle = ArctanContourOracle(2, 2.10)
    assert oracle((1.0, 1.0)) == 1  # boundary sum ~ 2.3097
    low = ArctanContourOracle(2, 0.92)
    assert low((0.0, 0.0)) == -1
    assert ARCTAN_MU_RANGES[2] == (0.92, 2.10)


def test_arctan_warns_outside_range():
    with pytest.warns(UserWarning):
        ArctanContourOracle(2, 0.69)


def test_halfspace_examples():
    assert HalfSpaceOracle(1)((0.5,)) == 1  # boundary labeled positive
    assert HalfSpaceOracle(2)((0.2, 0.2)) == -1
    assert HalfSpaceOracle(3)((1.0, 1.0, 1.0)) == 1


def test_threshold_and_corner():
    t = ThresholdOracle(0.5)
    assert t((0.49,)) == -1 and t((0.5,)) == 1
    c = BoundaryCornerOracle(2)
    assert c((1.0, 0.0)) == 1 and c((0.999, 0.999)) == -1


def test_staircase_monotone_exhaustive():
    for p, m in ((1, 9), (2, 7), (3, 4)):
        for seed in range(4):
            oracle = StaircaseOracle(p, m, seed)
            grid = oracle.grid
            for axis in range(p):
                assert np.all(np.diff(grid, axis=axis) >= 0)


def test_staircase_randomized_pair_audit():
    rng = np.random.default_rng(1)
    oracle = StaircaseOracle(3, 6, seed=5)
    lows = rng.random((10_000, 3))
    highs = lows + rng.random((10_000, 3)) * (1.0 - lows)
    f_low = oracle.label_many(lows)
    f_high = oracle.label_many(highs)
    assert not np.any((f_low == 1) & (f_high == -1))


def test_staircase_deterministic_and_constant_possible():
    a = StaircaseOracle(2, 5, seed=3)
    b = StaircaseOracle(2, 5, seed=3)
    assert np.array_equal(a.grid, b.grid)
    kinds = set()
    for seed in range(60):
        grid = StaircaseOracle(1, 2, seed).grid
        kinds.add(tuple(grid.tolist()))
    assert (-1, -1) in kinds  # constant negative labelers are admissible


def test_analytic_oracles_pass_randomized_monotonicity_audit():
    rng = np.random.default_rng(2)
    oracles = [
        IllustrationOracle(),
        ArctanContourOracle(3, 2.0),
        HalfSpaceOracle(4),
        BoundaryCornerOracle(2),
    ]
    for oracle in oracles:
        p = oracle.dimension
        lo = rng.random((10_000, p))
        hi = lo + rng.random((10_000, p)) * (1.0 - lo)
        bad = (oracle.label_many(lo) == 1) & (oracle.label_many(hi) == -1)
        assert not bad.any()


def test_arctan_calibration_band_endpoints():
    # negative-region share sits near 10% at the low end and 90% at the
    # high end of every calibrated band
    rng = np.random.default_rng(3)
    for p, (lo, hi) in ARCTAN_MU_RANGES.items():
        pts = rng.random((10**6, p))
        v_lo = (ArctanContourOracle(p, lo).label_many(pts) == -1).mean()
        v_hi = (ArctanContourOracle(p, hi).label_many(pts) == -1).mean()
        assert 0.08 <= v_lo <= 0.12, (p, v_lo)
        assert 0.88 <= v_hi <= 0.92, (p, v_hi)


def test_extreme_mu_gives_five_percent_negatives():
    rng = np.random.default_rng(4)
    pts = rng.random((10**6, 2))
    with pytest.warns(UserWarning):
        oracle = ArctanContourOracle(2, 0.69)
    share = (oracle.label_many(pts) == -1).mean()
    assert 0.04 <= share <= 0.06


def test_make_oracle_factory():
    assert make_oracle("illustration").dimension == 2
    assert make_oracle("halfspace", 3)((1.0, 1.0, 1.0)) == 1
    with pytest.raises(ValueError):
        make_oracle("nope", 2)
