import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from setsize.domain import (
    Explicit,
    Grid,
    HiddenSet,
    Hypercube,
    Interval,
    Line,
    SubCube,
    SubGrid,
    SubsetFamily,
    Whole,
    load_hidden_set,
    spec_allowed,
    write_hidden_set,
)
from setsize.errors import FamilyViolation, InvalidSpec
from setsize.oracle import OracleSession, intersection_size, subset_query, subset_sample

from conftest import make_session


def test_spec_allowed_examples():
    line = Line(10)
    assert spec_allowed(SubsetFamily.INTERVALS, Interval(3, 3), line)
    assert not spec_allowed(SubsetFamily.UNIVERSE_ONLY, Interval(1, 5), line)
    assert spec_allowed(SubsetFamily.INTERVALS, Whole(), line)


def test_whole_allowed_in_every_family():
    for family in SubsetFamily:
        assert spec_allowed(family, Whole(), Line(10))


def test_line_is_one_dimensional_grid():
    assert Line(7) == Grid((7,))
    assert Line(7).n == Grid([7]).n == 7


def test_grid_row_major_bijection():
    g = Grid((3, 4))
    assert g.ravel([[1, 1]]).tolist() == [1]
    assert g.ravel([[1, 2]]).tolist() == [2]
    assert g.ravel([[2, 1]]).tolist() == [5]
    idx = np.arange(1, g.n + 1)
    assert g.ravel(g.unravel(idx)).tolist() == idx.tolist()


def test_subset_query_examples():
    assert not subset_query(make_session([], 10), Whole())
    assert subset_query(make_session([5], 10), Interval(1, 10))
    assert not subset_query(make_session([5], 10), Interval(6, 10))


def test_query_increments_query_tally_only():
    s = make_session([5], 10)
    s.query(Interval(1, 3))
    s.query(Whole())
    assert (s.tally.queries, s.tally.samples) == (2, 0)


def test_subset_sample_examples():
    s = make_session([5], 10)
    assert {subset_sample(s, Interval(1, 10)) for _ in range(50)} == {5}
    assert subset_sample(make_session([2, 5], 10), Interval(3, 4)) is None


def test_sample_two_elements_even_split():
    s = make_session([2, 5], 10, seed=11)
    draws = [s.sample(Interval(1, 10)) for _ in range(10_000)]
    counts = [draws.count(2), draws.count(5)]
    assert stats.chisquare(counts).pvalue > 0.001
    assert s.tally.samples == 10_000


def test_intersection_size_examples():
    assert intersection_size(make_session([2, 5], 10), Interval(1, 10)) == 2
    assert intersection_size(make_session([], 10), Whole()) == 0
    cube = Hypercube(3)
    s = OracleSession(cube, HiddenSet.of(range(1, 9), 8), SubsetFamily.SUBCUBES)
    assert s.intersection_size(SubCube(((1, 0),))) == 4
    assert s.tally.calls == 0


def test_family_violation():
    s = make_session([1], 10, family=SubsetFamily.UNIVERSE_ONLY)
    with pytest.raises(FamilyViolation):
        s.query(Interval(1, 5))
    with pytest.raises(FamilyViolation):
        s.query_intervals([(3, 3)])


def test_invalid_specs():
    s = make_session([1], 10)
    with pytest.raises(InvalidSpec):
        s.query(Interval(0, 3))
    with pytest.raises(InvalidSpec):
        s.query(Interval(5, 4))
    with pytest.raises(InvalidSpec):
        s.query_intervals([(1, 11)])


def _uniformity_pvalue(session, spec, k, batch):
    if batch:
        b = session.sample_batch(spec, 10_000)
        counts = dict(zip(b.values.tolist(), b.counts.tolist()))
    else:
        counts = {}
        for _ in range(10_000):
            x = session.sample(spec)
            counts[x] = counts.get(x, 0) + 1
    assert len(counts) <= k
    observed = list(counts.values()) + [0] * (k - len(counts))
    return stats.chisquare(observed).pvalue


@pytest.mark.parametrize("batch", [False, True])
@pytest.mark.parametrize("k", [2, 7, 32])
def test_sampling_uniform_on_intervals(k, batch):
    rng = np.random.default_rng(k)
    elements = np.sort(rng.choice(np.arange(1, 1001), size=k + 10, replace=False))
    lo, hi = int(elements[5]), int(elements[5 + k - 1])
    s = make_session(elements, 1000, seed=k)
    assert s.intersection_size(Interval(lo, hi)) == k
    assert _uniformity_pvalue(s, Interval(lo, hi), k, batch) > 0.001


@pytest.mark.parametrize("batch", [False, True])
def test_sampling_uniform_on_subgrid_and_subcube(batch):
    g = Grid((8, 8))
    s = OracleSession(g, HiddenSet.of(range(1, 65, 2), 64), SubsetFamily.SUBGRIDS,
                      rng=np.random.default_rng(1))
    spec = SubGrid((2, 1), (5, 8))
    k = s.intersection_size(spec)
    assert k == 16
    assert _uniformity_pvalue(s, spec, k, batch) > 0.001
    c = OracleSession(Hypercube(6), HiddenSet.of(range(1, 65, 3), 64), SubsetFamily.SUBCUBES,
                      rng=np.random.default_rng(2))
    spec = SubCube(((2, 1), (5, 0)))
    k = c.intersection_size(spec)
    assert 0 < k <= 32
    assert _uniformity_pvalue(c, spec, k, batch) > 0.001


def test_sample_batch_matches_members():
    s = make_session([3, 4, 9], 10, seed=3)
    b = s.sample_batch(Interval(2, 8), 500)
    assert set(b.values.tolist()) == {3, 4}
    assert b.size == 500 and s.tally.samples == 500
    assert s.sample_batch(Interval(5, 8), 20).empty


@given(seed=st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_same_seed_same_answers(seed):
    def run():
        s = make_session([2, 3, 5, 8, 13, 21], 30, seed=seed)
        out = [s.sample(Interval(1, 30)) for _ in range(20)]
        out.append(s.sample_batch(Interval(1, 10), 50).counts.tolist())
        out.append(s.sample_hits(Interval(1, 30), 40, Interval(1, 8)))
        return out, (s.tally.queries, s.tally.samples)

    assert run() == run()


def test_sample_hits_metered_and_consistent_with_transcript():
    s = make_session(range(1, 101), 100, seed=5, record=True)
    hits = s.sample_hits(Interval(1, 100), 200, Interval(1, 25))
    assert s.tally.samples == 200 == len(s.tally.transcript)
    inside = sum(1 for kind, _, v in s.tally.transcript if v <= 25)
    assert inside == hits


def test_explicit_specs():
    s = make_session([4, 7], 10, family=SubsetFamily.UNRESTRICTED)
    assert s.query(Explicit.from_elements([1, 7], 10))
    assert not s.query(Explicit.from_elements([1, 2, 3], 10))
    with pytest.raises(InvalidSpec):
        Explicit.from_elements([11], 10)
    with pytest.raises(InvalidSpec):
        s.query(Explicit(np.ones(8, dtype=bool)))


def test_hidden_set_validation():
    with pytest.raises(InvalidSpec):
        HiddenSet(np.array([3, 2]), 5)
    with pytest.raises(InvalidSpec):
        HiddenSet(np.array([0, 2]), 5)
    with pytest.raises(InvalidSpec):
        HiddenSet.random(5, 6, np.random.default_rng(0))


def test_hidden_set_file_round_trip(tmp_path):
    h = HiddenSet.of([1, 5, 9], 12)
    path = tmp_path / "s.txt"
    write_hidden_set(path, h)
    assert path.read_text().splitlines()[0] == "# n=12"
    back = load_hidden_set(path)
    assert back.n == 12 and back.elements.tolist() == [1, 5, 9]


def test_hidden_set_file_errors(tmp_path):
    path = tmp_path / "s.txt"
    path.write_text("1\n5\n")
    with pytest.raises(InvalidSpec):
        load_hidden_set(path)
    assert load_hidden_set(path, n=6).w == 2
    path.write_text("# n=10\n5\n5\n")
    with pytest.raises(InvalidSpec):
        load_hidden_set(path)
    path.write_text("# n=10\nfive\n")
    with pytest.raises(InvalidSpec):
        load_hidden_set(path)
