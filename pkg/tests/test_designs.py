import numpy as np
import pytest
from scipy import stats

from monogrid.core import evaluate_design
from monogrid.designs import GridSizeError, StaticDesignSpec, gen_lhd, gen_mc, gen_sg, gen_si
from monogrid.oracles import BoundaryCornerOracle, StaircaseOracle
from monogrid.theory import sg_worst_volume, si_volume
from monogrid.volume import uncertain_volume


def test_sg_examples():
    pts = gen_sg(2, 9)
    assert sorted(map(tuple, pts.tolist())) == sorted(
        (a, b) for a in (0.0, 0.5, 1.0) for b in (0.0, 0.5, 1.0)
    )
    assert gen_sg(1, 2).tolist() == [[0.0], [1.0]]
    pts3 = gen_sg(3, 27)
    corners = [row for row in pts3 if set(row) <= {0.0, 1.0}]
    assert len(pts3) == 27 and len(corners) == 8


def test_sg_lexicographic_order():
    pts = gen_sg(2, 9)
    assert pts[0].tolist() == [0.0, 0.0]
    assert pts[1].tolist() == [0.0, 0.5]
    assert pts[-1].tolist() == [1.0, 1.0]


def test_sg_interior_count():
    for p, m in ((2, 4), (3, 3)):
        pts = gen_sg(p, m**p)
        interior = [row for row in pts if 0.0 < min(row) and max(row) < 1.0]
        assert len(interior) == (m - 2) ** p


def test_si_examples():
    assert sorted(map(tuple, gen_si(2, 4).tolist())) == sorted(
        (a, b) for a in (1 / 3, 2 / 3) for b in (1 / 3, 2 / 3)
    )
    assert gen_si(1, 1).tolist() == [[0.5]]
    pts = gen_si(2, 9)
    assert sorted(set(pts[:, 0])) == [0.25, 0.5, 0.75]
    assert pts.min() > 0.0 and pts.max() < 1.0


def test_grid_size_errors_suggest_nearest():
    with pytest.raises(GridSizeError) as err:
        gen_sg(2, 10)
    assert err.value.suggestions == [9, 16]
    with pytest.raises(GridSizeError):
        gen_si(3, 10)
    with pytest.raises(GridSizeError):
        gen_sg(1, 1)  # sg needs at least two levels


def test_mc_deterministic_and_uniform():
    assert gen_mc(2, 50, seed=9).tolist() == gen_mc(2, 50, seed=9).tolist()
    pts = gen_mc(2, 10**5, seed=1)
    assert np.all(np.abs(pts.mean(axis=0) - 0.5) < 0.005)
    ks = stats.kstest(gen_mc(1, 10**5, seed=2)[:, 0], "uniform")
    assert ks.pvalue > 0.01


def test_lhd_binning_property():
    for seed in (0, 5):
        n, p = 37, 3
        pts = gen_lhd(p, n, seed=seed)
        for k in range(p):
            bins = np.floor(pts[:, k] * n).astype(int)
            assert sorted(bins) == list(range(n))
    single = gen_lhd(4, 1, seed=3)
    assert single.shape == (1, 4) and (single >= 0).all() and (single < 1).all()


def test_static_spec_validation():
    with pytest.raises(ValueError):
        StaticDesignSpec(kind="mc", dimension=2, n=5)  # seed required
    with pytest.raises(ValueError):
        StaticDesignSpec(kind="bogus", dimension=2, n=5, seed=0)


def test_full_sg_never_beats_worst_case_bound():
    for p, side in ((1, 5), (2, 3), (2, 4), (3, 3)):
        n = side**p
        bound = sg_worst_volume(p, n)
        for seed in range(8):
            state = evaluate_design(gen_sg(p, n), StaircaseOracle(p, 5, seed))
            assert uncertain_volume(state).v_uncertain <= bound + 1e-12
        corner = evaluate_design(gen_sg(p, n), BoundaryCornerOracle(p))
        assert uncertain_volume(corner).v_uncertain == pytest.approx(bound, abs=1e-12)


def test_full_si_volume_is_oracle_independent():
    for p, m in ((1, 4), (2, 3), (3, 2)):
        n = m**p
        expected = si_volume(p, n)
        for seed in range(8):
            state = evaluate_design(gen_si(p, n), StaircaseOracle(p, 5, seed))
            assert uncertain_volume(state).v_uncertain == pytest.approx(expected, abs=1e-12)
