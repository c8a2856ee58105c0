"""Set size from uniform samples of the whole universe, by counting collisions.

Stage 1 samples until the first repeated element; if that happens at sample
``j`` then ``w`` is roughly ``j**2``. Stage 2 takes ``s = ceil(kappa * j / eps**2)``
fresh samples, counts coincident pairs ``eta`` and returns ``C(s, 2) / eta``,
since every pair collides with probability exactly ``1 / w``.
"""
from __future__ import annotations

import math
from collections import Counter

import numpy as np

from .config import Estimate, EstimatorConfig, finish
from .domain import Whole
from .errors import CapExceeded
from .oracle import OracleSession, SampleBatch


def nonempty_check(session: OracleSession, sampling: bool = False) -> bool:
    """One call on the whole universe: a query, or a sample in the sampling model."""
    if sampling:
        return session.sample(Whole()) is not None
    return session.query(Whole())


def coincident_pairs(counts) -> int:
    """``eta``: number of pairs ``i < j`` of samples that are equal."""
    return sum(c * (c - 1) // 2 for c in (int(x) for x in counts))


def refine_size(epsilon: float, kappa: float, j: int) -> int:
    """Stage-2 sample count for a stage-1 collision at sample ``j`` (so ``sqrt(w~) = j``)."""
    eps = min(epsilon, 0.5)
    return math.ceil(kappa * j / eps**2)


def rough_estimate_by_collision(session: OracleSession, max_samples: int | None = None,
                                first: int | None = None) -> int:
    """``j**2`` where sample ``j`` is the first repeat. ``first`` reuses an earlier sample."""
    seen = set()
    j = 0
    if first is not None:
        seen.add(first)
        j = 1
    while True:
        if max_samples is not None and j >= max_samples:
            raise CapExceeded(f"no collision within {max_samples} samples")
        x = session.sample(Whole())
        j += 1
        if x is None:
            raise CapExceeded("universe sample came back empty")
        if x in seen:
            return j * j
        seen.add(x)


def collision_refine(session: OracleSession, w_tilde: float, config: EstimatorConfig) -> float | None:
    """``C(s, 2) / eta`` from ``s = ceil(kappa * sqrt(w~) / eps**2)`` samples.

    With no collisions at all the stage is repeated once with ``2s`` samples;
    ``None`` if that also sees none.
    """
    eps = min(config.epsilon, 0.5)
    s = math.ceil(config.kappa * math.sqrt(w_tilde) / eps**2)
    for size in (s, 2 * s):
        eta = coincident_pairs(session.sample_batch(Whole(), size).counts)
        if eta:
            return math.comb(size, 2) / eta
    return None


class CollisionBranch:
    """The full estimator as a resumable procedure, for interleaving.

    ``count`` is the number of calls issued so far, ``total`` the final number
    once finished. :meth:`min_total` is a lower bound on ``total`` given what
    has been seen.
    """

    def __init__(self, session: OracleSession, config: EstimatorConfig, spec=None):
        self.session = session
        self.config = config
        self.spec = spec if spec is not None else Whole()
        self.eps = min(config.epsilon, 0.5)
        self.count = 0
        self.total = None
        self.value = None
        self.status = "ok"
        self.info = {}
        self._seen = set()
        self._phase = "rough"
        self._size = 0
        self._remaining = 0
        self._hist = Counter()
        self._retried = False

    def _done(self, value, status="ok", **info):
        self.value, self.status, self.total = value, status, self.count
        self.info.update(info)

    def min_total(self) -> int:
        if self.total is not None:
            return self.total
        if self._phase == "rough":
            if self.count == 0:
                return 1
            nxt = self.count + 1
            return min(nxt + refine_size(self.eps, self.config.kappa, nxt), self.config.max_samples)
        return self.count + self._remaining

    def step(self, limit: int) -> None:
        while self.count < limit and self.total is None:
            if self._phase == "rough":
                x = self.session.sample(self.spec)
                self.count += 1
                if x is None:
                    self._done(0.0, stage="empty")
                elif x in self._seen:
                    j = self.count
                    self.info["j"] = j
                    self.info["w_tilde"] = j * j
                    self._size = self._remaining = refine_size(self.eps, self.config.kappa, j)
                    self._phase = "refine"
                elif self.count >= self.config.max_samples:
                    self._done(None, "cap", stage="rough")
                else:
                    self._seen.add(x)
            else:
                take = min(self._remaining, limit - self.count)
                batch: SampleBatch = self.session.sample_batch(self.spec, take)
                self._hist.update(dict(zip(batch.values.tolist(), batch.counts.tolist())))
                self._remaining -= take
                self.count += take
                if self._remaining == 0:
                    self._finish_refine()

    def _finish_refine(self):
        eta = coincident_pairs(self._hist.values())
        if eta:
            self._done(math.comb(self._size, 2) / eta, eta=eta, s=self._size)
        elif not self._retried:
            self._retried = True
            self._size *= 2
            self._remaining = self._size
            self._hist = Counter()
        else:
            self._done(None, "failed", stage="no-collisions", s=self._size)

    def run(self) -> None:
        self.step(math.inf)


def estimate_universe_sampling(session: OracleSession, config: EstimatorConfig | None = None,
                               rng: np.random.Generator | None = None) -> Estimate:
    """Estimate ``w`` from samples of ``U`` only. ``rng`` is unused: the estimator is deterministic given answers."""
    config = config or EstimatorConfig()
    branch = CollisionBranch(session, config)
    branch.run()
    return finish(session, branch.value, branch.status, **branch.info)
