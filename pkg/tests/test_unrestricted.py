import math

import numpy as np
import pytest

from setsize import kernels
from setsize.bench import BenchConfig, run_trials, summarize
from setsize.config import EstimatorConfig
from setsize.domain import HiddenSet, Line, SubsetFamily, Whole
from setsize.oracle import OracleSession
from setsize.unrestricted import (
    accept_window,
    estimate_unrestricted_adaptive,
    estimate_unrestricted_descending,
    estimate_unrestricted_nonadaptive,
    level_delta,
    level_size,
    levels,
    levels_through,
    make_level,
    probe_count,
    probe_level,
    random_subset_spec,
    rho,
)

A = SubsetFamily.UNRESTRICTED


def session(n, w, seed=0, record=False):
    rng = np.random.default_rng(seed)
    return OracleSession(Line(n), HiddenSet.random(n, w, rng), A, rng=rng, record=record)


def medians(estimator, ws, n, trials=100, eps=1.0, seed=5):
    cfg = BenchConfig(estimator, w=list(ws), eps=[eps], trials=trials, seed=seed, n=n)
    return {c.w: c for c in summarize(run_trials(cfg))}


def test_random_subset_spec():
    rng = np.random.default_rng(0)
    assert len(random_subset_spec(rng, 50, 1.0)) == 50
    n = 10_000
    size = len(random_subset_spec(rng, n, 0.5))
    assert abs(size - n / 2) <= 4 * math.sqrt(n / 4)


def test_random_subset_empty_probability():
    rng = np.random.default_rng(1)
    s = session(100, 5, seed=2)
    negatives = sum(not s.query(random_subset_spec(rng, 100, 0.25)) for _ in range(20_000))
    p = 0.75**5
    assert abs(negatives / 20_000 - p) <= 3 * math.sqrt(p * (1 - p) / 20_000)


def test_probe_level_edges():
    assert probe_level(session(64, 0), key=7, e=4, t=50) == 1.0
    assert probe_level(session(64, 3), key=7, e=1, t=50) == 0.0


def test_probe_level_mean_at_matching_size():
    e = 8
    s = session(1000, e, seed=3)
    t = 5000
    p_hat = probe_level(s, key=11, e=e, t=t)
    r = rho(e)
    assert abs(p_hat - r) <= 3 * math.sqrt(r * (1 - r) / t)


def test_hashed_probes_match_materialized_sets():
    s = session(300, 20, seed=4)
    key, thr = 1234, kernels.threshold_for(1 / 16)
    negatives = s.query_hashed(key, 0, 40, thr)
    from setsize.domain import Hashed

    direct = 0
    for c in range(40):
        members = Hashed(kernels.subset_key(key, c), thr).materialize(300).members
        direct += not members[s.hidden.elements].any()
    assert negatives == direct


def test_window_examples():
    low, high = accept_window(2, 1.0)
    assert low == pytest.approx(0.1208, abs=1e-4)
    assert high == pytest.approx(0.3953, abs=1e-4)
    assert rho(2) ** 2 < low
    assert rho(2) ** 0.5 > high


def test_window_small_epsilon_contains_rho():
    for e in (2, 5, 100, 10**6):
        low, high = accept_window(e, 0.3)
        assert low < rho(e) < high


def test_rho_properties():
    assert rho(1) == 0.0 and rho(2) == 0.25
    values = [rho(level_size(i, 1.0)) for i in range(2, 28)]
    assert all(a < b for a, b in zip(values, values[1:]))
    assert all(0.25 <= v <= 1 / math.e for v in values)
    assert rho(2**63) == pytest.approx(1 / math.e)


def test_level_sizes():
    assert [level_size(i, 1.0) for i in range(1, 6)] == [1, 2, 4, 8, 16]
    assert level_size(1, 0.5) == 1
    idx = levels(0.5, 20)
    sizes = [level_size(i, 0.5) for i in idx]
    assert sizes == sorted(set(sizes)) and sizes[0] == 2 and sizes[-1] <= 20
    through = levels_through(1.0, 1000)
    assert level_size(through[-1], 1.0) == 1024


def test_matching_level_exists_for_every_w():
    w = np.arange(1, 2**20 + 1, dtype=np.float64)
    i = np.round(np.log2(w)) + 1
    e = 2.0 ** (i - 1)
    assert ((w / math.sqrt(2) <= e) & (e <= math.sqrt(2) * w)).all()


def test_probe_count():
    assert probe_count(level_delta(2), 1.0, 12) == math.ceil(12 * math.log(40))
    assert probe_count(level_delta(2), 0.5, 12) == math.ceil(12 * math.log(40) / 0.25)
    assert make_level(3, 1.0, 12).e == 4


def test_nonadaptive_empty_and_contract():
    est = estimate_unrestricted_nonadaptive(session(64, 0), rng=np.random.default_rng(0))
    assert est.value == 0.0 and est.queries == 1
    cell = medians("unrestricted-na", [1 << 10], 1 << 20, trials=400)[1 << 10]
    assert cell.success_rate_all >= 2 / 3


def test_nonadaptive_cost_grows_like_log():
    cells = medians("unrestricted-na", [1 << 6, 1 << 10, 1 << 14], 1 << 20)
    f = {w: math.log2(w) * math.log2(math.log2(w)) for w in cells}
    for a, b in ((1 << 6, 1 << 10), (1 << 10, 1 << 14)):
        measured = cells[b].median_cost / cells[a].median_cost
        predicted = f[b] / f[a]
        assert predicted / 2 <= measured <= predicted * 2


def test_nonadaptive_discipline():
    specs = []
    for w in (3, 40):
        s = session(512, w, seed=w, record=True)
        estimate_unrestricted_nonadaptive(s, EstimatorConfig(epsilon=1.0), np.random.default_rng(9))
        specs.append([spec for _, spec, _ in s.tally.transcript])
    a, b = specs
    k = min(len(a), len(b))
    assert k > 20 and a[:k] == b[:k]


def test_adaptive_single_element():
    for seed in range(30):
        est = estimate_unrestricted_adaptive(session(1 << 10, 1, seed), EstimatorConfig(epsilon=1.0),
                                             np.random.default_rng(seed))
        assert est.ok and 0.5 <= est.value <= 2


def test_adaptive_contract_and_cheaper():
    n, w = 1 << 20, 1 << 10
    ad = medians("unrestricted-a", [w], n, trials=400)[w]
    na = medians("unrestricted-na", [w], n, trials=400)[w]
    assert ad.success_rate_all >= 2 / 3
    assert ad.median_cost < na.median_cost


def test_adaptive_doubling_bracket():
    w = 1 << 10
    target = math.ceil(math.log2(math.log2(w)))
    hits = 0
    for seed in range(200):
        est = estimate_unrestricted_adaptive(session(1 << 16, w, seed), EstimatorConfig(epsilon=1.0),
                                             np.random.default_rng(seed))
        hits += est.info.get("ell") in (target, target + 1)
    assert hits / 200 >= 5 / 6


def test_descending_full_set_accepts_early():
    est = estimate_unrestricted_descending(session(1 << 12, 1 << 12), EstimatorConfig(epsilon=1.0),
                                           np.random.default_rng(0))
    assert est.ok and len(est.info["levels"]) <= 2


def test_descending_versus_ascending():
    n = 1 << 16
    desc = medians("unrestricted-desc", [n // 4, 2], n)
    asc = medians("unrestricted-na", [n // 4, 2], n)
    assert desc[n // 4].median_cost < asc[n // 4].median_cost
    assert desc[2].median_cost > asc[2].median_cost


def test_query_tail_geometric():
    cfg = BenchConfig("unrestricted-na", w=[1 << 10], eps=[1.0], trials=1000, seed=2, n=1 << 20)
    costs = np.array([r.cost for r in run_trials(cfg)])
    bound = np.median(costs)
    p2, p4 = (costs > 2 * bound).mean(), (costs > 4 * bound).mean()
    assert p2 <= 1 / 6 and p4 <= p2


def test_whole_query_up_front():
    s = session(256, 10, record=True)
    estimate_unrestricted_nonadaptive(s, EstimatorConfig(epsilon=1.0), np.random.default_rng(0))
    assert s.tally.transcript[0][1] == Whole()
    assert s.tally.calls == len(s.tally.transcript)
