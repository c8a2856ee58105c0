"""Estimators for the unrestricted family: queries on random subsets.

A level with hypothesis size ``e`` queries ``t`` random subsets that contain
each element independently with probability ``1/e``. A query is negative with
probability ``p(w) = (1 - 1/e)**w = rho**(w/e)`` where ``rho = (1 - 1/e)**e``,
so the fraction of negative answers locates ``w`` relative to ``e``: it lands
in the acceptance window around ``rho`` when ``e`` is within a factor
``sqrt(2)`` of ``w`` (``epsilon = 1``), falls below it when ``e`` is too
small and rises above it when ``e`` is too large.

The random subsets are :class:`~setsize.domain.Hashed` predicates keyed by a
counter stream, one stream per level, so they are never materialized and the
non-adaptive estimator's subsets depend on the seed alone.

Level sizes: ``e(i) = 2**(i-1)`` for ``epsilon = 1`` and
``floor((1 + epsilon/4)**(i-1))`` for ``epsilon < 1``; levels repeating an
earlier size are skipped, as is ``e = 1`` (one query on ``U`` decides
``w = 0`` up front).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .config import Estimate, EstimatorConfig, finish
from .domain import Explicit, Whole
from .errors import InvalidParams
from .oracle import OracleSession

SQRT2 = math.sqrt(2.0)


def level_size(i: int, epsilon: float) -> int:
    if i < 1:
        raise InvalidParams(f"level index must be >= 1, got {i}")
    if epsilon >= 1:
        return 1 << (i - 1)
    return math.floor((1 + epsilon / 4) ** (i - 1))


def rho(e: int) -> float:
    """``(1 - 1/e)**e``; via ``log1p`` so large ``e`` does not round ``1 - 1/e`` to 1."""
    if e <= 1:
        return 0.0
    return math.exp(e * math.log1p(-1 / e))


def level_delta(i: int) -> float:
    return 1.0 / (10 * i * i)


def probe_count(delta: float, epsilon: float, c: float, scale_eps: bool = True) -> int:
    """``ceil(c ln(1/delta))``, divided by ``epsilon**2`` when ``epsilon < 1``."""
    t = c * math.log(1 / delta)
    if scale_eps and epsilon < 1:
        t /= epsilon**2
    return math.ceil(t)


def accept_window(e: int, epsilon: float, c_prime: float = 12.0) -> tuple[float, float]:
    """Acceptance interval for the negative fraction at a level of size ``e >= 2``.

    ``epsilon = 1``: ``[rho**sqrt2 - 0.02, rho**(1/sqrt2) + 0.02]``.
    ``epsilon < 1``: ``[rho**(1+eps/4) - eps/c', rho**(1/(1+eps/4)) + eps/c']``.
    The lower edge sits between ``rho**2`` (``e <= w/2``) and the smallest
    in-range value ``rho**sqrt2``; the upper edge between the largest
    in-range value ``rho**(1/sqrt2)`` and ``rho**(1/2)`` (``e >= 2w``).
    """
    if e < 2:
        raise InvalidParams("the window is defined for levels with e >= 2")
    r = rho(e)
    if epsilon >= 1:
        return r**SQRT2 - 0.02, r ** (1 / SQRT2) + 0.02
    g = 1 + epsilon / 4
    return r**g - epsilon / c_prime, r ** (1 / g) + epsilon / c_prime


@dataclass(frozen=True)
class LevelParams:
    i: int
    e: int
    rho: float
    delta: float
    t: int


def make_level(i: int, epsilon: float, c: float, delta: float | None = None) -> LevelParams:
    e = level_size(i, epsilon)
    delta = level_delta(i) if delta is None else delta
    return LevelParams(i, e, rho(e), delta, probe_count(delta, epsilon, c))


def levels(epsilon: float, max_e: int) -> list[int]:
    """Indices ``i`` with distinct sizes ``2 <= e(i) <= max_e``, ascending."""
    out = []
    last = 1
    i = 1
    while True:
        e = level_size(i, epsilon)
        if e > max_e:
            return out
        if e > last:
            out.append(i)
            last = e
        i += 1


def levels_through(epsilon: float, target: int) -> list[int]:
    """Distinct levels ascending up to and including the first with ``e >= target``."""
    out = levels(epsilon, max(target - 1, 1))
    last = level_size(out[-1], epsilon) if out else 1
    i = out[-1] + 1 if out else 2
    while last < target:
        e = level_size(i, epsilon)
        if e > last:
            out.append(i)
            last = e
        i += 1
    return out


def random_subset_spec(rng: np.random.Generator, n: int, p: float) -> Explicit:
    """Explicit subset containing each element independently with probability ``p``."""
    if not 0 < p <= 1:
        raise InvalidParams(f"inclusion probability must lie in (0, 1], got {p}")
    bits = np.zeros(n + 1, dtype=bool)
    bits[1:] = rng.random(n) < p
    return Explicit(bits)


def probe_level(session: OracleSession, key: int, e: int, t: int) -> float:
    """Negative fraction over ``t`` hashed subsets of inclusion probability ``1/e``."""
    negatives = session.query_hashed(key, 0, t, kernels.threshold_for(1 / e))
    return negatives / t


def _level_key(base: int, i: int) -> int:
    return kernels.stream_value(base, i)


def _base_key(rng) -> int:
    rng = rng if rng is not None else np.random.default_rng()
    return int(rng.integers(0, 2**64, dtype=np.uint64))


def _top_exponent(n: int) -> int:
    return max(0, math.ceil(math.log2(n)))


def _classify(p_hat: float, window) -> int:
    """-1 below the window (``e`` too small), 0 inside, +1 above (``e`` too large)."""
    low, high = window
    if p_hat < low:
        return -1
    if p_hat > high:
        return 1
    return 0


def estimate_unrestricted_nonadaptive(session: OracleSession, config: EstimatorConfig | None = None,
                                      rng: np.random.Generator | None = None) -> Estimate:
    """Ascending levels; output ``e`` of the first level whose negative fraction is in window.

    A negative fraction above the window at the first level means ``w = 1``.
    """
    config = config or EstimatorConfig()
    eps = config.epsilon
    base = _base_key(rng)
    if not session.query(Whole()):
        return finish(session, 0.0, stage="empty")
    if session.shape.n == 1:
        return finish(session, 1.0, stage="singleton-universe")
    max_e = 1 << (_top_exponent(session.shape.n) + 1)
    trace = []
    for rank, i in enumerate(levels(eps, max_e)):
        lv = make_level(i, eps, config.c)
        p_hat = probe_level(session, _level_key(base, i), lv.e, lv.t)
        verdict = _classify(p_hat, accept_window(lv.e, eps, config.c_prime))
        trace.append([lv.e, p_hat])
        if verdict == 0:
            return finish(session, float(lv.e), level=i, levels=trace)
        if verdict > 0 and rank == 0:
            return finish(session, 1.0, level=i, levels=trace)
    return finish(session, None, "cap", stage="levels", levels=trace)


def estimate_unrestricted_descending(session: OracleSession, config: EstimatorConfig | None = None,
                                     rng: np.random.Generator | None = None) -> Estimate:
    """Descending levels from the first size ``>= n``; confidence indexed by step count.

    Passing below the lowest level means ``w = 1``.
    """
    config = config or EstimatorConfig()
    eps = config.epsilon
    base = _base_key(rng)
    if not session.query(Whole()):
        return finish(session, 0.0, stage="empty")
    if session.shape.n == 1:
        return finish(session, 1.0, stage="singleton-universe")
    idx = levels_through(eps, 1 << _top_exponent(session.shape.n))
    trace = []
    for step, i in enumerate(reversed(idx), start=1):
        lv = make_level(i, eps, config.c, delta=level_delta(step))
        p_hat = probe_level(session, _level_key(base, i), lv.e, lv.t)
        trace.append([lv.e, p_hat])
        if _classify(p_hat, accept_window(lv.e, eps, config.c_prime)) == 0:
            return finish(session, float(lv.e), level=i, levels=trace)
    return finish(session, 1.0, level=1, levels=trace)


def estimate_unrestricted_adaptive(session: OracleSession, config: EstimatorConfig | None = None,
                                   rng: np.random.Generator | None = None) -> Estimate:
    """Doubling search over the level index, then binary search inside the bracket.

    Stage 1 probes levels ``2**l`` (size ``2**(2**l - 1)``), ``l = 1, 2, ...``
    with ``ceil(c ln(10 l^2))`` subsets each and stops once the negative
    fraction exceeds ``rho**(1/2) - 0.01``. Stage 2 binary-searches the
    (``epsilon``-mode) levels whose sizes fall in
    ``[max(2, 2**(2**(l*-1) - 2)), 2**(2**l* - 1)]``.
    """
    config = config or EstimatorConfig()
    eps = config.epsilon
    base = _base_key(rng)
    if not session.query(Whole()):
        return finish(session, 0.0, stage="empty")
    if session.shape.n == 1:
        return finish(session, 1.0, stage="singleton-universe")
    top = _top_exponent(session.shape.n)
    stage1 = []
    ell = 0
    while True:
        ell += 1
        i = 1 << ell
        e = level_size(i, 1.0)
        t = probe_count(level_delta(ell), 1.0, config.c, scale_eps=False)
        p_hat = probe_level(session, _level_key(base ^ 0x5A5A5A5A5A5A5A5A, i), e, t)
        stage1.append([e, p_hat])
        if p_hat > rho(e) ** 0.5 - 0.01:
            break
        if i - 1 > top + 2:
            return finish(session, None, "cap", stage="doubling", doubling=stage1)
    lo_i = max(2, (1 << (ell - 1)) - 1)
    e_lo, e_hi = level_size(lo_i, 1.0), level_size(i, 1.0)
    cand = [k for k in levels(eps, e_hi) if level_size(k, eps) >= e_lo]
    first_level = levels(eps, 2)[0]
    lo, hi = 0, len(cand) - 1
    search = []
    while lo <= hi:
        mid = (lo + hi) // 2
        k = cand[mid]
        lv = make_level(k, eps, config.c)
        p_hat = probe_level(session, _level_key(base, k), lv.e, lv.t)
        search.append([lv.e, p_hat])
        verdict = _classify(p_hat, accept_window(lv.e, eps, config.c_prime))
        if verdict == 0:
            return finish(session, float(lv.e), level=k, ell=ell, doubling=stage1, search=search)
        if verdict < 0:
            lo = mid + 1
        else:
            if k == first_level:
                return finish(session, 1.0, level=1, ell=ell, doubling=stage1, search=search)
            hi = mid - 1
    return finish(session, None, "failed", stage="empty-bracket", ell=ell, doubling=stage1,
                  search=search)
