"""Estimators for a fully ordered universe where the allowed subsets are intervals.

* singleton probing (non-adaptive queries, or samples standing in for queries);
* exact recovery by a breadth-first halving search (adaptive queries);
* the two interleaved combinations;
* the nested-interval sampling estimator (adaptive samples).

Singleton probes come from a counter-based stream fixed by a key drawn from
the estimator's generator, so the sequence of probed singletons is a function
of the seed alone and only the stopping point depends on answers.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np

from .collision import CollisionBranch
from .config import Estimate, EstimatorConfig, finish
from .domain import Interval, Whole
from .errors import CapExceeded
from .nested import Schedule, SplitResult, estimate_ratio, run_nested  # noqa: F401
from .oracle import OracleSession


def draw_key(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**64, dtype=np.uint64))


# --- singleton probing ---------------------------------------------------------


def refine_count(epsilon: float, kappa: float, j: int) -> int:
    """Probes in the refine stage after a first hit at probe ``j`` (``n / w~ = j``)."""
    return math.ceil(kappa * j / epsilon**2)


def rough_estimate_singletons(session: OracleSession, key: int, max_queries: int,
                              as_samples: bool = False) -> tuple[float, int]:
    """``(n / j, j)`` for the first positive singleton probe ``j``."""
    n = session.shape.n
    issued, offset = session.probe_singletons(key, 0, max_queries, first_hit=True,
                                              as_samples=as_samples)
    if offset < 0:
        raise CapExceeded(f"no positive singleton within {max_queries} probes")
    j = offset + 1
    return n / j, j


def refine_singletons(session: OracleSession, w_tilde: float, epsilon: float, key: int,
                      start: int = 0, kappa: float = 8.0, as_samples: bool = False) -> float:
    """``n * (positives / s)`` over ``s = ceil(kappa * (n / w~) / eps**2)`` probes."""
    n = session.shape.n
    s = math.ceil(kappa * (n / w_tilde) / epsilon**2)
    _, hits = session.probe_singletons(key, start, s, as_samples=as_samples)
    return n * hits / s


class SingletonBranch:
    """Rough stage then refine stage over one probe stream, resumable.

    The rough stage gives up after ``rough_cap_factor * n`` probes and makes
    one call on the whole universe: empty means ``w = 0``, otherwise the
    branch ends with status ``cap``.
    """

    def __init__(self, session: OracleSession, config: EstimatorConfig, key: int,
                 as_samples: bool = False):
        self.session = session
        self.config = config
        self.key = key
        self.as_samples = as_samples
        self.n = session.shape.n
        self.cap = config.rough_cap_factor * self.n
        self.count = 0
        self.total = None
        self.value = None
        self.status = "ok"
        self.info = {}
        self._phase = "rough"
        self._j = 0
        self._size = 0
        self._remaining = 0
        self._hits = 0

    def _done(self, value, status="ok", **info):
        self.value, self.status, self.total = value, status, self.count
        self.info.update(info)

    def min_total(self) -> int:
        if self.total is not None:
            return self.total
        if self._phase == "rough":
            nxt = self.count + 1
            return min(nxt + refine_count(self.config.epsilon, self.config.kappa, nxt), self.cap + 1)
        if self._phase == "confirm":
            return self.count + 1
        return self.count + self._remaining

    def step(self, limit) -> None:
        while self.count < limit and self.total is None:
            if self._phase == "rough":
                budget = min(limit, self.cap) - self.count
                issued, offset = self.session.probe_singletons(
                    self.key, self.count, budget, first_hit=True, as_samples=self.as_samples
                )
                self.count += issued
                if offset >= 0:
                    self._j = self.count
                    self._size = self._remaining = refine_count(
                        self.config.epsilon, self.config.kappa, self._j
                    )
                    self._phase = "refine"
                    self.info.update(j=self._j, w_tilde=self.n / self._j)
                elif self.count >= self.cap:
                    self._phase = "confirm"
            elif self._phase == "confirm":
                self.count += 1
                if self.as_samples:
                    empty = self.session.sample(Whole()) is None
                else:
                    empty = not self.session.query(Whole())
                if empty:
                    self._done(0.0, stage="empty")
                else:
                    self._done(None, "cap", stage="rough")
            else:
                take = min(self._remaining, limit - self.count)
                start = self._j + (self._size - self._remaining)
                _, hits = self.session.probe_singletons(
                    self.key, start, take, as_samples=self.as_samples
                )
                self._hits += hits
                self._remaining -= take
                self.count += take
                if self._remaining == 0:
                    self._done(self.n * self._hits / self._size, s=self._size, hits=self._hits)

    def run(self) -> None:
        self.step(math.inf)


def estimate_interval_query_nonadaptive(session: OracleSession, config: EstimatorConfig | None = None,
                                        rng: np.random.Generator | None = None) -> Estimate:
    config = config or EstimatorConfig()
    rng = rng if rng is not None else np.random.default_rng()
    branch = SingletonBranch(session, config, draw_key(rng))
    branch.run()
    return finish(session, branch.value, branch.status, **branch.info)


# --- exact recovery ----------------------------------------------------------------


class ExactBranch:
    """Breadth-first halving search; every positive interval of length > 1 is split
    into its left ``ceil(len/2)`` and right ``floor(len/2)`` parts."""

    def __init__(self, session: OracleSession):
        self.session = session
        self.queue = deque([(1, session.shape.n)])
        self.found = []
        self.count = 0
        self.total = None
        self.status = "ok"
        self.info = {}

    @property
    def value(self):
        return float(len(self.found)) if self.total is not None else None

    def min_total(self) -> int:
        return self.total if self.total is not None else self.count + len(self.queue)

    def step(self, limit) -> None:
        queue = self.queue
        while self.count < limit and queue:
            take = min(len(queue), limit - self.count)
            batch = [queue.popleft() for _ in range(take)]
            answers = self.session.query_intervals(batch)
            self.count += take
            for (lo, hi), positive in zip(batch, answers):
                if not positive:
                    continue
                if lo == hi:
                    self.found.append(lo)
                else:
                    mid = lo + (hi - lo + 2) // 2 - 1
                    queue.append((lo, mid))
                    queue.append((mid + 1, hi))
        if not queue and self.total is None:
            self.total = self.count

    def run(self) -> None:
        self.step(math.inf)


def exact_recover_binary_search(session: OracleSession) -> tuple[list[int], int]:
    """Recover ``S`` exactly; returns ``(sorted elements, queries used)``."""
    branch = ExactBranch(session)
    branch.run()
    return sorted(branch.found), branch.count


def recovery_bound(n: int, w: int) -> int:
    """Worst-case query count of the halving search."""
    return 2 * w * n.bit_length() + 1


# --- interleaving --------------------------------------------------------------------


def interleave(first, second) -> str:
    """Run two branches as if their calls strictly alternated, ``first`` going first.

    The ``k``-th call of ``first`` sits at position ``2k - 1`` and that of
    ``second`` at ``2k``, so ``first`` wins iff its total ``a`` satisfies
    ``a <= b``. Branches advance in blocks bounded by the other's
    :meth:`min_total`, which never issues a call strict alternation would not
    have issued; on return the loser has made exactly the calls it would have
    made by then (``a - 1`` if ``first`` won, ``b`` otherwise).
    Returns ``"first"`` or ``"second"``.
    """
    while True:
        if first.total is not None:
            a = first.total
            second.step(a - 1)
            if second.total is not None and second.total <= a - 1:
                return "second"
            return "first"
        if second.total is not None:
            b = second.total
            first.step(b)
            if first.total is not None and first.total <= b:
                return "first"
            return "second"
        first.step(second.min_total())
        if first.total is None:
            second.step(first.min_total() - 1)


def _interleaved(session, first, second, names) -> Estimate:
    winner = first if interleave(first, second) == "first" else second
    name = names[0] if winner is first else names[1]
    return finish(session, winner.value, winner.status, winner=name,
                  branch_calls={names[0]: first.count, names[1]: second.count}, **winner.info)


def estimate_interval_query_adaptive(session: OracleSession, config: EstimatorConfig | None = None,
                                     rng: np.random.Generator | None = None) -> Estimate:
    """Exact recovery interleaved with singleton probing; the first to finish answers."""
    config = config or EstimatorConfig()
    rng = rng if rng is not None else np.random.default_rng()
    exact = ExactBranch(session)
    probing = SingletonBranch(session, config, draw_key(rng))
    return _interleaved(session, exact, probing, ("exact", "singletons"))


def estimate_interval_sample_nonadaptive(session: OracleSession, config: EstimatorConfig | None = None,
                                         rng: np.random.Generator | None = None) -> Estimate:
    """Collision estimator on ``U`` interleaved with singleton sampling."""
    config = config or EstimatorConfig()
    rng = rng if rng is not None else np.random.default_rng()
    collision = CollisionBranch(session, config)
    probing = SingletonBranch(session, config, draw_key(rng), as_samples=True)
    return _interleaved(session, collision, probing, ("collision", "singletons"))


# --- nested intervals ------------------------------------------------------------------


def median_sample_count(delta: float) -> int:
    return math.ceil(4 * math.log(3 / delta))


def split_interval_by_sample_median(session: OracleSession, prev: Interval, delta: float) -> SplitResult:
    """Sample ``ceil(4 ln(3/delta))`` times from ``prev``; stop if all samples agree,
    else keep ``[prev.lo, v]`` for the sample median ``v``.

    When the median is ``prev.hi`` itself the interval would not shrink, so
    ``[prev.lo, v - 1]`` is used; it still holds every smaller sample.
    """
    s = median_sample_count(delta)
    batch = session.sample_batch(prev, s)
    if batch.empty:
        return SplitResult("empty")
    if batch.values.size == 1:
        return SplitResult("terminal")
    samples = batch.sorted_samples()
    v = int(samples[(s + 1) // 2 - 1])
    if v == prev.hi:
        v -= 1
    return SplitResult("region", Interval(prev.lo, v))


def estimate_interval_sample_adaptive(session: OracleSession, config: EstimatorConfig | None = None,
                                      rng: np.random.Generator | None = None) -> Estimate:
    """Telescoping product of ratio estimates along nested intervals."""
    config = config or EstimatorConfig()
    n = session.shape.n
    return run_nested(
        session,
        config,
        Interval(1, n),
        lambda region, delta: split_interval_by_sample_median(session, region, delta),
        Schedule(config.epsilon),
        d=1,
    )
