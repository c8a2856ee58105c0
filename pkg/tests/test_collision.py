import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from setsize.collision import (
    coincident_pairs,
    collision_refine,
    estimate_universe_sampling,
    nonempty_check,
    refine_size,
    rough_estimate_by_collision,
)
from setsize.config import EstimatorConfig
from setsize.domain import HiddenSet, Line, SubsetFamily, Whole
from setsize.errors import CapExceeded
from setsize.oracle import OracleSession

U = SubsetFamily.UNIVERSE_ONLY


def session(w, n=None, seed=0, record=False):
    n = n or max(w, 1) * 4
    return OracleSession(Line(n), HiddenSet.of(range(1, w + 1), n), U,
                         rng=np.random.default_rng(seed), record=record)


def test_nonempty_check_examples():
    assert not nonempty_check(session(0, 8))
    assert nonempty_check(session(1, 8))
    s = session(8, 8)
    assert nonempty_check(s) and s.tally.queries == 1
    s = session(3, 8)
    assert nonempty_check(s, sampling=True) and (s.tally.queries, s.tally.samples) == (0, 1)


def test_rough_single_element():
    assert rough_estimate_by_collision(session(1)) == 4


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=200, deadline=None)
def test_rough_pigeonhole(seed):
    s = session(4, seed=seed)
    assert rough_estimate_by_collision(s) <= 25
    assert s.tally.samples <= 5


def test_rough_within_factor_six():
    w, bad = 100, 0
    for seed in range(2000):
        w_tilde = rough_estimate_by_collision(session(w, seed=seed))
        bad += not (w / 6 <= w_tilde <= 6 * w)
    assert bad / 2000 <= 1 / 6


def test_rough_cap():
    with pytest.raises(CapExceeded):
        rough_estimate_by_collision(session(10_000, seed=1), max_samples=3)


def test_coincident_pairs_arithmetic():
    counts = [2, 2]  # samples (a, a, b, b)
    eta = coincident_pairs(counts)
    assert eta == 2
    assert math.comb(4, 2) / eta == 3
    assert math.comb(9, 2) / coincident_pairs([9]) == 1


def test_refine_size_clamps_epsilon():
    assert refine_size(1.0, 8, 10) == refine_size(0.5, 8, 10) == 320


def test_collision_refine_contract():
    w, eps, hits = 256, 0.5, 0
    config = EstimatorConfig(epsilon=eps)
    for seed in range(500):
        w_hat = collision_refine(session(w, seed=seed), w, config)
        hits += w_hat is not None and w / (1 + eps) <= w_hat <= (1 + eps) * w
    assert hits / 500 >= 2 / 3


def test_collision_refine_all_identical():
    assert collision_refine(session(1), 1, EstimatorConfig()) == 1.0


def test_universe_sampling_empty_and_single():
    est = estimate_universe_sampling(session(0, 16))
    assert est.value == 0 and est.samples == 1 and est.queries == 0
    for seed in range(20):
        assert estimate_universe_sampling(session(1, seed=seed)).value == 1.0


@pytest.mark.parametrize("w,s", [(10, 20), (50, 40)])
def test_eta_unbiased(w, s):
    sess = session(w, seed=w)
    etas = np.array([coincident_pairs(sess.sample_batch(Whole(), s).counts) for _ in range(10_000)])
    expected = math.comb(s, 2) / w
    se = etas.std(ddof=1) / math.sqrt(etas.size)
    assert abs(etas.mean() - expected) <= 3 * se


def test_sample_tail_geometric():
    w, eps = 256, 0.5
    config = EstimatorConfig(epsilon=eps)
    unit = config.kappa * math.sqrt(w) / eps**2
    costs = np.array([estimate_universe_sampling(session(w, seed=s), config).samples
                      for s in range(2000)])
    p2, p4 = (costs > 2 * unit).mean(), (costs > 4 * unit).mean()
    assert p2 <= 0.5
    assert p4 <= p2 / 2


def test_metering_matches_transcript():
    s = session(40, seed=3, record=True)
    est = estimate_universe_sampling(s)
    assert est.samples == len(s.tally.transcript) == s.tally.calls


def test_sample_growth_sqrt():
    med = {}
    for w in (16, 64, 256, 1024):
        med[w] = np.median([estimate_universe_sampling(session(w, 1 << 16, seed=s)).samples
                            for s in range(100)])
    for w in (16, 64, 256):
        assert 1.0 <= med[4 * w] / med[w] <= 4.0  # sqrt(4) = 2 within a factor 2
