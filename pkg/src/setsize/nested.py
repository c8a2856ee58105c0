"""Driver shared by the nested-region sampling estimators (intervals, sub-grids, sub-cubes).

Starting from the whole universe, each round asks a splitter for a strictly
smaller region holding a constant fraction of the current region's part of
``S``, then estimates the ratio ``b_j = |S ∩ R_{j-1}| / |S ∩ R_j|`` from
samples of ``R_{j-1}``. When a round's samples all coincide the current
region holds one element and the output is the product of the ratio estimates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .config import Estimate, EstimatorConfig, finish
from .domain import Interval, SubCube, SubGrid, Whole
from .oracle import OracleSession


@dataclass(frozen=True)
class Schedule:
    """Per-round confidence ``delta(j) = 1/(10 j^2)`` and accuracy ``eps(j) = eps/(100 j^1.5)``."""

    epsilon: float

    @staticmethod
    def delta(j: int) -> float:
        return 1.0 / (10 * j * j)

    def eps(self, j: int) -> float:
        return self.epsilon / (100 * j**1.5)


@dataclass(frozen=True)
class SplitResult:
    kind: str  # "region", "terminal", "empty" or "failed"
    region: object = None
    reason: str = ""


def region_key(region):
    """Plain-data form of a region for reports."""
    if isinstance(region, Interval):
        return [region.lo, region.hi]
    if isinstance(region, SubGrid):
        return [list(region.lo), list(region.hi)]
    if isinstance(region, SubCube):
        return [list(r) for r in region.restrictions]
    return repr(region)


def estimate_ratio(session: OracleSession, prev, inner, eps_j: float, delta_j: float,
                   d: int = 1) -> float | None:
    """``m / k`` for ``m = ceil(d ln(3d/delta_j) / eps_j**2)`` samples from ``prev``,
    ``k`` of them inside ``inner``; ``None`` when ``k = 0``."""
    m = math.ceil(d * math.log(3 * d / delta_j) / eps_j**2)
    k = session.sample_hits(prev, m, inner)
    return m / k if k else None


def iteration_cap(n: int, kappa_iter: int) -> int:
    return kappa_iter * math.ceil(math.log2(n)) + 16 if n > 1 else 16


def run_nested(session: OracleSession, config: EstimatorConfig, root, split, schedule: Schedule,
               d: int = 1) -> Estimate:
    """Run the nested-region estimator.

    ``split(region, delta)`` returns a :class:`SplitResult`. ``d`` divides the
    per-round confidence and multiplies the ratio sample size (grids of
    dimension ``d``; 1 otherwise). With ``config.exact_ratios`` each ratio is
    the exact count quotient from the test back door instead of an estimate.
    """
    if session.sample(Whole()) is None:
        return finish(session, 0.0, stage="empty")
    regions = [region_key(root)]
    ratios = []
    product = Fraction(1)
    prev = root
    cap = iteration_cap(session.shape.n, config.kappa_iter)
    for j in range(1, cap + 1):
        delta = schedule.delta(j) / d
        result = split(prev, delta)
        if result.kind == "terminal":
            info = dict(t=j - 1, regions=regions, ratios=ratios)
            if config.exact_ratios:
                return finish(session, float(product), exact_value=str(product),
                              terminal_size=session.intersection_size(prev), **info)
            return finish(session, float(math.prod(ratios)), **info)
        if result.kind == "empty":
            return finish(session, 0.0, stage="empty", t=0, regions=regions, ratios=ratios)
        if result.kind == "failed":
            return finish(session, None, "failed", stage=result.reason, t=j - 1,
                          regions=regions, ratios=ratios)
        inner = result.region
        if config.exact_ratios:
            b = Fraction(session.intersection_size(prev), session.intersection_size(inner))
            product *= b
            ratios.append(float(b))
        else:
            b_hat = estimate_ratio(session, prev, inner, schedule.eps(j), schedule.delta(j), d)
            if b_hat is None:
                return finish(session, None, "failed", stage="zero-hits", t=j - 1,
                              regions=regions, ratios=ratios)
            ratios.append(b_hat)
        regions.append(region_key(inner))
        prev = inner
    return finish(session, None, "cap", stage="iterations", t=cap, regions=regions, ratios=ratios)
