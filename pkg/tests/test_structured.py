import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from setsize.bench import BenchConfig, run_trials, summarize
from setsize.config import EstimatorConfig
from setsize.domain import Grid, HiddenSet, Hypercube, Line, SubCube, SubGrid, SubsetFamily
from setsize.errors import InvalidParams
from setsize.nested import Schedule
from setsize.oracle import OracleSession
from setsize.structured import (
    best_grid_cut,
    cube_candidates,
    estimate_grid_sample_adaptive,
    estimate_hypercube_sample_adaptive,
    split_cube_by_sample,
    split_grid_by_sample,
)

G, C = SubsetFamily.SUBGRIDS, SubsetFamily.SUBCUBES


def grid_session(dims, elements, seed=0):
    g = Grid(tuple(dims))
    return OracleSession(g, HiddenSet.of(elements, g.n), G, rng=np.random.default_rng(seed))


def cube_session(d, elements, seed=0):
    c = Hypercube(d)
    return OracleSession(c, HiddenSet.of(elements, c.n), C, rng=np.random.default_rng(seed))


def test_grid_split_single_point_terminal():
    s = grid_session((8, 8), [10])
    assert split_grid_by_sample(s, SubGrid((1, 1), (8, 8)), 0.05).kind == "terminal"


def test_grid_split_fraction_band_full_grid():
    d, delta, good = 2, Schedule.delta(1) / 2, 0
    root = SubGrid((1, 1), (32, 32))
    for seed in range(2000):
        s = grid_session((32, 32), range(1, 1025), seed)
        r = split_grid_by_sample(s, root, delta)
        assert r.kind == "region"
        changed = [k for k in range(2) if (r.region.lo[k], r.region.hi[k]) != (root.lo[k], root.hi[k])]
        assert len(changed) == 1
        frac = s.intersection_size(r.region) / 1024
        good += 1 / (4 * d) <= frac <= 1 - 1 / (2 * d)
    assert good / 2000 >= 1 - delta


def test_grid_estimator_on_a_line_matches_interval_contract():
    hits = 0
    for seed in range(60):
        rng = np.random.default_rng(seed)
        g = Grid((4096,))
        s = OracleSession(g, HiddenSet.random(4096, 100, rng), G, rng=rng)
        est = estimate_grid_sample_adaptive(s, EstimatorConfig(epsilon=0.5))
        hits += est.within(100, 0.5)
    assert hits / 60 >= 2 / 3


def test_single_point_estimates_one():
    assert estimate_grid_sample_adaptive(grid_session((16, 16), [37])).value == 1.0
    assert estimate_hypercube_sample_adaptive(cube_session(8, [37])).value == 1.0
    assert estimate_grid_sample_adaptive(grid_session((16, 16), [])).value == 0.0


def test_grid_dimension_limit():
    with pytest.raises(InvalidParams):
        estimate_grid_sample_adaptive(grid_session((2,) * 9, [1]))


@pytest.mark.parametrize("w", [16, 256])
def test_grid_success_contract(w):
    cfg = BenchConfig("grid-sample-a", w=[w], eps=[0.5], trials=400, seed=3, dims=[256, 256])
    (cell,) = summarize(run_trials(cfg))
    assert cell.success_rate_all >= 2 / 3


@pytest.mark.parametrize("w", [16, 256])
def test_cube_success_contract(w):
    cfg = BenchConfig("cube-sample-a", w=[w], eps=[0.5], trials=400, seed=3, cube_d=14)
    (cell,) = summarize(run_trials(cfg))
    assert cell.success_rate_all >= 2 / 3


def test_grid_versus_line_cost():
    def med(**shape):
        cfg = BenchConfig("grid-sample-a", w=[64], eps=[1.0], trials=40, seed=1, **shape)
        return summarize(run_trials(cfg))[0].median_cost

    ratio = med(dims=[64, 64]) / med(dims=[4096])
    assert 1 / 8 <= ratio <= 8


def test_grid_nesting_one_axis_per_round():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        g = Grid((64, 64))
        s = OracleSession(g, HiddenSet.random(g.n, 300, rng), G, rng=rng)
        est = estimate_grid_sample_adaptive(s, EstimatorConfig(epsilon=1.0))
        regions = est.info["regions"]
        for (lo0, hi0), (lo1, hi1) in zip(regions, regions[1:]):
            moved = [k for k in range(2) if (lo0[k], hi0[k]) != (lo1[k], hi1[k])]
            assert len(moved) == 1
            k = moved[0]
            assert lo0[k] <= lo1[k] <= hi1[k] <= hi0[k]


def test_cube_nesting_prefix_extension():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        s = OracleSession(Hypercube(12), HiddenSet.random(4096, 300, rng), C, rng=rng)
        est = estimate_hypercube_sample_adaptive(s, EstimatorConfig(epsilon=1.0))
        regions = est.info["regions"]
        for a, b in zip(regions, regions[1:]):
            assert len(b) > len(a) and b[: len(a)] == a
            assert [c for c, _ in b] == list(range(1, len(b) + 1))


def test_cube_split_single_point_terminal():
    assert split_cube_by_sample(cube_session(6, [5]), SubCube(()), 0.1).kind == "terminal"


def test_cube_split_full_cube():
    good = 0
    for seed in range(500):
        s = cube_session(6, range(1, 65), seed)
        r = split_cube_by_sample(s, SubCube(()), 0.1)
        if r.kind != "region":
            continue
        frac = s.intersection_size(r.region) / 64
        good += 1 / 3 <= frac <= 2 / 3
    assert good / 500 >= 0.9


def test_cube_candidates_at_most_two():
    rng = np.random.default_rng(0)
    for _ in range(2000):
        d = int(rng.integers(2, 10))
        w = int(rng.integers(2, 1 << d))
        elements = rng.choice(np.arange(1, (1 << d) + 1), size=w, replace=False)
        samples = np.sort(rng.choice(elements, size=24))
        if np.unique(samples).size < 2:
            continue
        cands, _ = cube_candidates(d, 0, samples)
        assert len(cands) <= 2


def test_cube_candidates_example():
    # samples 1..4 on {0,1}^2 (bits 00, 01, 10, 11): first coordinate splits them in half
    cands, depth = cube_candidates(2, 0, np.array([1, 2, 3, 4]))
    assert cands == [(0,), (1,)] and depth == 0


@given(st.sets(st.tuples(st.integers(1, 10), st.integers(1, 10)), min_size=2, max_size=40))
@settings(max_examples=300, deadline=None)
def test_grid_cut_exists_for_distinct_points(points):
    g = Grid((10, 10))
    values = np.sort(g.ravel(sorted(points)))
    cut = best_grid_cut(g, SubGrid((1, 1), (10, 10)), values, np.ones(values.size, dtype=np.int64))
    assert cut is not None
    axis, side, x, hits = cut
    assert 8 * hits >= values.size and 2 * hits <= values.size


def test_grid_cut_tie_break():
    g = Line(10)
    values = np.array([2, 5, 7, 9])
    # prefix [1, 5] and suffix [7, 10] both hold 2 of 4; prefix wins
    assert best_grid_cut(g, SubGrid((1,), (10,)), values, np.ones(4, dtype=np.int64)) == (0, 0, 5, 2)
