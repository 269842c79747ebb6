import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monogrid.core import DesignState, evaluate_design
from monogrid.designs import gen_sg
from monogrid.oracles import IllustrationOracle, StaircaseOracle
from monogrid.strategies import StrategySpec, run_strategy, state_from_trace
from monogrid.volume import (
    uncertain_volume,
    uncertain_volume_auto,
    uncertain_volume_cells,
    uncertain_volume_mc,
    volume_union_down,
    volume_union_up,
)


def test_union_down_examples():
    assert volume_union_down([]) == 0.0
    # inclusion-exclusion: 0.125 + 0.125 - 0.0625
    assert volume_union_down([[0.5, 0.25], [0.25, 0.5]]) == pytest.approx(0.1875, abs=1e-15)
    assert volume_union_down([[1.0] * 4]) == 1.0


def test_union_up_examples():
    assert volume_union_up([]) == 0.0
    assert volume_union_up([[0.5, 0.75], [0.75, 0.5]]) == pytest.approx(0.1875, abs=1e-15)
    assert volume_union_up([[0.0, 0.0, 0.0]]) == 1.0


def test_union_down_oracle_3d():
    # brute-force dyadic-cell count agrees with the sweep
    anchors = np.array([[0.5, 0.75, 0.25], [0.75, 0.25, 0.5], [0.25, 0.5, 0.75]])
    m = 4
    grid = np.stack(np.meshgrid(*[np.arange(m)] * 3, indexing="ij"), -1).reshape(-1, 3)
    tops = (grid + 1) / m
    covered = (tops[:, None, :] <= anchors[None, :, :]).all(2).any(1)
    assert volume_union_down(anchors) == pytest.approx(covered.sum() / m**3, abs=1e-15)


def test_uncertain_volume_empty_design():
    report = uncertain_volume(DesignState(dimension=3))
    assert report.v_uncertain == 1.0
    assert report.v_negative == 0.0 and report.v_positive == 0.0
    assert report.method == "exact"


def test_uncertain_volume_worked_traces(illustration):
    trace = run_strategy(StrategySpec("ag", 2, 16, 0), illustration)
    assert uncertain_volume(state_from_trace(2, trace[:8])).v_uncertain == pytest.approx(0.375, abs=1e-12)
    assert uncertain_volume(state_from_trace(2, trace)).v_uncertain == pytest.approx(0.1875, abs=1e-12)


def test_volume_components_sum_to_one(state_builder):
    state = state_builder(2, [((0.5, 0.5), -1), ((0.25, 0.75), 1)])
    rep = uncertain_volume(state)
    assert rep.v_negative + rep.v_positive + rep.v_uncertain == pytest.approx(1.0, abs=1e-12)


def test_mc_volume_examples(state_builder):
    rep = uncertain_volume_mc(DesignState(dimension=2), samples=1000, seed=1)
    assert rep.v_uncertain == 1.0
    state = state_builder(2, [((0.5, 0.5), -1)])
    rep = uncertain_volume_mc(state, samples=10**6, seed=2)
    assert abs(rep.v_uncertain - 0.75) <= 3 * rep.mc_stderr
    assert rep.method == "monte_carlo" and rep.mc_samples == 10**6


def test_mc_matches_exact_on_worked_state(illustration):
    trace = run_strategy(StrategySpec("ag", 2, 16, 0), illustration)
    state = state_from_trace(2, trace)
    rep = uncertain_volume_mc(state, samples=10**6, seed=3)
    assert abs(rep.v_uncertain - 0.1875) <= 3 * rep.mc_stderr


def test_mc_reproducible(state_builder):
    state = state_builder(2, [((0.5, 0.5), -1)])
    a = uncertain_volume_mc(state, samples=5000, seed=9)
    b = uncertain_volume_mc(state, samples=5000, seed=9)
    assert a.v_uncertain == b.v_uncertain


@pytest.mark.parametrize("p,seed", [(1, 0), (2, 1), (3, 2), (5, 3)])
def test_exact_vs_mc_randomized_states(p, seed):
    oracle = StaircaseOracle(p, 4, seed)
    rng = np.random.default_rng(seed)
    state = evaluate_design(rng.random((60, p)), oracle)
    exact = uncertain_volume(state).v_uncertain
    mc = uncertain_volume_mc(state, samples=10**5, seed=seed + 100)
    assert abs(exact - mc.v_uncertain) <= 4 * max(mc.mc_stderr, 1e-4)


def test_cell_oracle_exact_on_dyadic_states(illustration):
    trace = run_strategy(StrategySpec("ag", 2, 16, 0), illustration)
    state = state_from_trace(2, trace)
    cells = uncertain_volume_cells(state, level=3)
    exact = uncertain_volume(state)
    assert cells.v_uncertain == pytest.approx(exact.v_uncertain, abs=1e-15)
    assert cells.v_negative == pytest.approx(exact.v_negative, abs=1e-15)


def test_reflection_symmetry():
    rng = np.random.default_rng(7)
    for _ in range(20):
        pts = rng.random((int(rng.integers(1, 30)), 3))
        assert volume_union_up(pts) == pytest.approx(volume_union_down(1.0 - pts), abs=0.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_monotone_shrinkage(seed):
    # consistent observations never increase the uncertain volume
    oracle = StaircaseOracle(2, 5, seed % 17)
    rng = np.random.default_rng(seed)
    state = DesignState(dimension=2)
    prev = 1.0
    for row in rng.random((12, 2)):
        state.insert(row, oracle(row))
        v = uncertain_volume(state).v_uncertain
        assert v <= prev + 1e-12
        prev = v


def test_auto_switches_to_mc_for_large_frontiers():
    rng = np.random.default_rng(5)
    state = DesignState(dimension=7)
    pts = rng.random((30, 7))
    for row in pts:
        state.insert(row, -1 if row.sum() < 3.5 else 1)
    rep = uncertain_volume_auto(state, mc_samples=20_000, seed=1)
    assert rep.method == "monte_carlo"
    small = uncertain_volume_auto(DesignState(dimension=2))
    assert small.method == "exact"
