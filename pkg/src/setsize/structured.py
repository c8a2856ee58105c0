"""Nested-region sampling estimators for grids (sub-grid subsets) and hypercubes
(sub-cube subsets).

Grid rounds cut the current box along one axis. Every prefix cut
``[lo_k, x]`` and suffix cut ``[x, hi_k]`` at a sampled coordinate ``x`` is a
candidate; the accepted band of sample fractions is ``[1/(4d), 1/2]`` and the
candidate with the largest fraction wins (ties: earlier axis, prefix before
suffix, smaller ``x``). If no axis has an in-band cut, one grid point holds
more than half of the samples, which for a set with at least two points in
the box is a sampling accident.

Cube rounds restrict the free coordinates in ascending order. The prefix
sub-cubes form a binary trie; walking down while a child holds more than 3/4
of the samples, the children of the last node visited are the maximal
sub-cubes holding between 1/4 and 3/4 of them. There are one or two; with
two, a second sample picks the first holding between 1/4 and 7/8.
"""
from __future__ import annotations

import math

import numpy as np

from .config import Estimate, EstimatorConfig
from .domain import Grid, Hypercube, SubCube, SubGrid
from .errors import InvalidParams
from .nested import Schedule, SplitResult, run_nested
from .oracle import OracleSession

MAX_GRID_D = 8


# --- grids -------------------------------------------------------------------


def grid_sample_count(d: int, delta: float, kappa_g: float) -> int:
    """``ceil(kappa_g * d * ln(3/delta))``; ``delta`` already divided by ``d``."""
    return math.ceil(kappa_g * d * math.log(3 / delta))


def best_grid_cut(shape: Grid, region: SubGrid, values: np.ndarray, counts: np.ndarray):
    """In-band cut for a histogram of sampled points, or ``None``.

    Returns ``(axis, side, x, hits)`` with ``side`` 0 for a prefix cut
    (``hi[axis] = x``) and 1 for a suffix cut (``lo[axis] = x``).
    """
    d = shape.d
    s = int(counts.sum())
    coords = shape.unravel(values)
    best = None
    for axis in range(d):
        order = np.argsort(coords[:, axis], kind="stable")
        xs = coords[order, axis]
        cs = counts[order]
        uniq, first = np.unique(xs, return_index=True)
        per_value = np.add.reduceat(cs, first)
        below = np.cumsum(per_value)
        above = s - below + per_value
        for side, hits_arr in ((0, below), (1, above)):
            for x, hits in zip(uniq.tolist(), hits_arr.tolist()):
                if 4 * d * hits >= s and 2 * hits <= s:
                    key = (-hits, axis, side, x)
                    if best is None or key < best:
                        best = key
    if best is None:
        return None
    hits, axis, side, x = -best[0], best[1], best[2], best[3]
    return axis, side, x, hits


def split_grid_by_sample(session: OracleSession, region: SubGrid, delta: float,
                         kappa_g: float = 8.0) -> SplitResult:
    """One grid round; ``delta`` is the per-round confidence already divided by ``d``."""
    shape = session.shape
    s = grid_sample_count(shape.d, delta, kappa_g)
    batch = session.sample_batch(region, s)
    if batch.empty:
        return SplitResult("empty")
    if batch.values.size == 1:
        return SplitResult("terminal")
    cut = best_grid_cut(shape, region, batch.values, batch.counts)
    if cut is None:
        return SplitResult("failed", reason="no-cut")
    axis, side, x, _ = cut
    lo, hi = list(region.lo), list(region.hi)
    if side == 0:
        hi[axis] = x
    else:
        lo[axis] = x
    return SplitResult("region", SubGrid(tuple(lo), tuple(hi)))


def estimate_grid_sample_adaptive(session: OracleSession, config: EstimatorConfig | None = None,
                                  rng: np.random.Generator | None = None) -> Estimate:
    config = config or EstimatorConfig()
    shape = session.shape
    if not isinstance(shape, Grid):
        raise InvalidParams("grid estimator needs a grid universe")
    if shape.d > MAX_GRID_D:
        raise InvalidParams(f"grid dimension is limited to {MAX_GRID_D}, got {shape.d}")
    root = SubGrid(tuple(1 for _ in shape.dims), shape.dims)
    return run_nested(
        session,
        config,
        root,
        lambda region, delta: split_grid_by_sample(session, region, delta, config.kappa_g),
        Schedule(config.epsilon),
        d=shape.d,
    )


# --- hypercubes ------------------------------------------------------------------


def cube_sample_count(delta: float, kappa_c: float) -> int:
    return math.ceil(kappa_c * math.log(3 / delta))


def cube_candidates(d: int, t: int, samples: np.ndarray) -> tuple[list[tuple[int, ...]], int]:
    """Maximal prefix sub-cubes with sample fraction in ``[1/4, 3/4]``.

    ``samples`` are linear indices inside a sub-cube whose restricted
    coordinates are ``1..t``. Each candidate is the tuple of bits for
    coordinates ``t+1, t+2, ...``. Also returns the depth of the last node on
    the heavy path.
    """
    free = d - t
    s = samples.size
    offsets = (samples - 1) & ((1 << free) - 1)
    path: list[int] = []
    current = offsets
    depth = 0
    while depth < free:
        bit = (current >> (free - depth - 1)) & 1
        ones = int(bit.sum())
        sizes = (current.size - ones, ones)
        heavy = [b for b in (0, 1) if 4 * sizes[b] > 3 * s]
        if not heavy:
            out = []
            for b in (0, 1):
                if 4 * sizes[b] >= s and 4 * sizes[b] <= 3 * s:
                    out.append(tuple(path + [b]))
            return out, depth
        b = heavy[0]
        path.append(b)
        current = current[bit == b]
        depth += 1
    return [], depth


def _restrict(region: SubCube, bits) -> SubCube:
    t = len(region.restrictions)
    extra = tuple((t + 1 + k, b) for k, b in enumerate(bits))
    return SubCube(region.restrictions + extra)


def _fraction_in(d: int, t: int, samples: np.ndarray, bits) -> tuple[int, int]:
    free = d - t
    k = len(bits)
    prefix = 0
    for b in bits:
        prefix = (prefix << 1) | b
    top = ((samples - 1) & ((1 << free) - 1)) >> (free - k)
    return int((top == prefix).sum()), samples.size


def split_cube_by_sample(session: OracleSession, region: SubCube, delta: float,
                         kappa_c: float = 8.0) -> SplitResult:
    d = session.shape.d
    t = len(region.restrictions)
    if [c for c, _ in region.restrictions] != list(range(1, t + 1)):
        raise InvalidParams("cube regions must restrict a prefix of the coordinates")
    s = cube_sample_count(delta, kappa_c)
    batch = session.sample_batch(region, s)
    if batch.empty:
        return SplitResult("empty")
    if batch.values.size == 1:
        return SplitResult("terminal")
    candidates, _ = cube_candidates(d, t, batch.sorted_samples())
    if not candidates:
        return SplitResult("failed", reason="no-candidate")
    if len(candidates) > 2:  # pragma: no cover - excluded by maximality
        return SplitResult("failed", reason="too-many-candidates")
    if len(candidates) == 1:
        return SplitResult("region", _restrict(region, candidates[0]))
    second = session.sample_batch(region, s).sorted_samples()
    for bits in candidates:
        hits, total = _fraction_in(d, t, second, bits)
        if 4 * hits >= total and 8 * hits <= 7 * total:
            return SplitResult("region", _restrict(region, bits))
    return SplitResult("failed", reason="tie-break")


def estimate_hypercube_sample_adaptive(session: OracleSession, config: EstimatorConfig | None = None,
                                       rng: np.random.Generator | None = None) -> Estimate:
    config = config or EstimatorConfig()
    if not isinstance(session.shape, Hypercube):
        raise InvalidParams("hypercube estimator needs a hypercube universe")
    return run_nested(
        session,
        config,
        SubCube(()),
        lambda region, delta: split_cube_by_sample(session, region, delta, config.kappa_c),
        Schedule(config.epsilon),
        d=1,
    )
