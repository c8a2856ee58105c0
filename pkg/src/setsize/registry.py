"""Estimator ids used by the benchmark and the CLI."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .collision import estimate_universe_sampling
from .config import finish
from .domain import SubsetFamily
from .interval import (
    estimate_interval_query_adaptive,
    estimate_interval_query_nonadaptive,
    estimate_interval_sample_adaptive,
    estimate_interval_sample_nonadaptive,
    exact_recover_binary_search,
)
from .structured import estimate_grid_sample_adaptive, estimate_hypercube_sample_adaptive
from .unrestricted import (
    estimate_unrestricted_adaptive,
    estimate_unrestricted_descending,
    estimate_unrestricted_nonadaptive,
)


def estimate_exact_recovery(session, config=None, rng=None):
    """Exact recovery packaged as an estimator; ``info["elements"]`` is the recovered set."""
    elements, _ = exact_recover_binary_search(session)
    return finish(session, float(len(elements)), elements=elements)


@dataclass(frozen=True)
class EstimatorEntry:
    id: str
    run: Callable
    family: SubsetFamily
    shape: str  # "line", "grid" or "cube"
    description: str


ESTIMATORS = {
    e.id: e
    for e in [
        EstimatorEntry("collision", estimate_universe_sampling, SubsetFamily.UNIVERSE_ONLY, "line",
                       "collision counting on samples of U"),
        EstimatorEntry("interval-query-na", estimate_interval_query_nonadaptive,
                       SubsetFamily.INTERVALS, "line", "singleton probing (non-adaptive queries)"),
        EstimatorEntry("interval-query-a", estimate_interval_query_adaptive,
                       SubsetFamily.INTERVALS, "line", "exact recovery interleaved with probing"),
        EstimatorEntry("exact-recover", estimate_exact_recovery, SubsetFamily.INTERVALS, "line",
                       "exact recovery by halving search"),
        EstimatorEntry("interval-sample-na", estimate_interval_sample_nonadaptive,
                       SubsetFamily.INTERVALS, "line", "collision counting interleaved with probing"),
        EstimatorEntry("interval-sample-a", estimate_interval_sample_adaptive,
                       SubsetFamily.INTERVALS, "line", "nested intervals (adaptive samples)"),
        EstimatorEntry("grid-sample-a", estimate_grid_sample_adaptive, SubsetFamily.SUBGRIDS,
                       "grid", "nested sub-grids (adaptive samples)"),
        EstimatorEntry("cube-sample-a", estimate_hypercube_sample_adaptive, SubsetFamily.SUBCUBES,
                       "cube", "nested sub-cubes (adaptive samples)"),
        EstimatorEntry("unrestricted-na", estimate_unrestricted_nonadaptive,
                       SubsetFamily.UNRESTRICTED, "line", "ascending level search"),
        EstimatorEntry("unrestricted-a", estimate_unrestricted_adaptive, SubsetFamily.UNRESTRICTED,
                       "line", "doubling then binary search over levels"),
        EstimatorEntry("unrestricted-desc", estimate_unrestricted_descending,
                       SubsetFamily.UNRESTRICTED, "line", "descending level search"),
    ]
}
