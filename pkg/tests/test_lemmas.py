from fractions import Fraction

from setsize.lemmas import (
    axis_cut_counterexamples,
    cube_counterexamples,
    grid_band_counterexamples,
    grid_counterexamples_by_marginals,
    grid_counterexamples_direct,
    marginal_has_cut,
    realizable,
    slab_fallback,
)

PLUS = (1 << 1) | (1 << 3) | (1 << 4) | (1 << 5) | (1 << 7)  # 3 x 3, bit y*3 + x


def test_marginal_cut_examples():
    assert marginal_has_cut([1, 1, 1, 1])
    assert not marginal_has_cut([1, 3, 1])
    assert marginal_has_cut([1, 3, 1], Fraction(1, 8))
    assert slab_fallback([1, 3, 1]) and not slab_fallback([1, 1, 1, 1, 1])


def test_gale_ryser():
    assert realizable([1, 3, 1], [1, 3, 1])
    assert not realizable([3], [1, 1])
    assert not realizable([2, 0], [2, 0])
    assert realizable([2, 1], [1, 1, 1])


def test_grid_fact_with_slabs_holds():
    assert grid_counterexamples_by_marginals(6) == []
    assert grid_counterexamples_direct(4, slabs=True) == []


def test_axis_cuts_alone_fail_on_the_plus():
    direct = grid_counterexamples_direct(3, slabs=False)
    assert (3, 3, PLUS) in direct
    shapes = {(a, b) for a, b, _, _ in axis_cut_counterexamples(4)}
    assert shapes == {(a, b) for a, b, _ in grid_counterexamples_direct(4, slabs=False)}
    assert len(axis_cut_counterexamples(6)) == 20


def test_estimator_band_always_has_a_cut():
    assert grid_band_counterexamples(6, d=2) == []


def test_cube_fact_holds():
    assert cube_counterexamples(4) == []
