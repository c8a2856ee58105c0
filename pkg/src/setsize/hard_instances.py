"""Pairs of hidden sets that are hard to tell apart, for adversarial testing.

Each generator returns an :class:`InstancePair` with ``|S1| < |S2|`` and the
hidden choices in ``metadata``. When a block size does not divide ``n`` the
universe is cut into whole blocks and the remainder at the top of ``[1, n]``
is left out of every block, so the set sizes stay exact.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .domain import DomainShape, HiddenSet, Line, SubsetFamily, write_hidden_set
from .errors import InvalidParams
from .oracle import OracleSession


@dataclass
class InstancePair:
    kind: str
    s1: HiddenSet
    s2: HiddenSet
    metadata: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.s1.n


def _block(j: int, size: int) -> np.ndarray:
    """Elements of the ``j``-th (1-based) block of length ``size``."""
    return np.arange((j - 1) * size + 1, j * size + 1, dtype=np.int64)


def _check_sizes(n: int, w_tilde: int) -> None:
    if n < 1 or w_tilde < 1:
        raise InvalidParams(f"need n >= 1 and w~ >= 1, got n={n}, w~={w_tilde}")


def gen_interval_query_pair(n: int, w_tilde: int, rng: np.random.Generator) -> InstancePair:
    """``S1`` is one block of length ``w~``, ``S2`` that block and the next."""
    _check_sizes(n, w_tilde)
    blocks = n // w_tilde
    if blocks < 2:
        raise InvalidParams(f"need n >= 2 w~, got n={n}, w~={w_tilde}")
    j_star = int(rng.integers(1, blocks))
    first = _block(j_star, w_tilde)
    both = np.concatenate([first, _block(j_star + 1, w_tilde)])
    return InstancePair(
        "interval-query",
        HiddenSet(first, n),
        HiddenSet(both, n),
        {"n": n, "w_tilde": w_tilde, "j_star": j_star, "blocks": blocks},
    )


def subinterval_bounds(lo: int, length: int, m: int) -> list[tuple[int, int]]:
    """Split ``[lo, lo + length - 1]`` into ``m`` consecutive parts of near-equal length."""
    cuts = [lo + (length * k) // m for k in range(m + 1)]
    return [(cuts[k], cuts[k + 1] - 1) for k in range(m)]


def gen_interval_adaptive_pair(n: int, w_tilde: int, rng: np.random.Generator) -> InstancePair:
    """``w~`` blocks, each cut into ``m = ceil(n / w~^2)`` sub-blocks.

    Both sets hold the first element of every block and the two end points
    of one random sub-block ``l(j)`` per block; ``S2`` also holds every
    element of the sub-block chosen in the special block ``j*``.
    """
    _check_sizes(n, w_tilde)
    if w_tilde * w_tilde >= n:
        raise InvalidParams(f"need w~ < sqrt(n), got n={n}, w~={w_tilde}")
    length = n // w_tilde
    m = math.ceil(n / w_tilde**2)
    if m > length:
        raise InvalidParams("blocks are too short to hold the sub-blocks")
    ell = rng.integers(1, m + 1, size=w_tilde)
    j_star = int(rng.integers(1, w_tilde + 1))
    base = set()
    special = None
    for j in range(1, w_tilde + 1):
        lo = (j - 1) * length + 1
        sub = subinterval_bounds(lo, length, m)[int(ell[j - 1]) - 1]
        base.update((lo, sub[0], sub[1]))
        if j == j_star:
            special = sub
    s1 = HiddenSet.of(base, n)
    s2 = HiddenSet.of(base.union(range(special[0], special[1] + 1)), n)
    return InstancePair(
        "interval-adaptive",
        s1,
        s2,
        {
            "n": n,
            "w_tilde": w_tilde,
            "m": m,
            "block_length": length,
            "ell": ell.tolist(),
            "j_star": j_star,
            "special": list(special),
        },
    )


def gen_interval_sample_pair(n: int, w_tilde: int, rng: np.random.Generator) -> InstancePair:
    """``S2`` is one random block of length ``w~``; ``S1`` is ``floor(w~/2)`` of its elements."""
    _check_sizes(n, w_tilde)
    if w_tilde < 2:
        raise InvalidParams("need w~ >= 2")
    blocks = n // w_tilde
    if blocks < 1:
        raise InvalidParams(f"need n >= w~, got n={n}, w~={w_tilde}")
    j_star = int(rng.integers(1, blocks + 1))
    block = _block(j_star, w_tilde)
    half = np.sort(rng.choice(block, size=w_tilde // 2, replace=False))
    return InstancePair(
        "interval-sample",
        HiddenSet(half, n),
        HiddenSet(block, n),
        {"n": n, "w_tilde": w_tilde, "j_star": j_star, "blocks": blocks},
    )


def gen_unrestricted_pair(n: int, rng: np.random.Generator) -> InstancePair:
    """Random sets of sizes ``2**i`` and ``2**(i+1)`` for ``i`` uniform in ``0 .. log2(n) - 1``."""
    if n < 2 or n & (n - 1):
        raise InvalidParams(f"n must be a power of two >= 2, got {n}")
    i = int(rng.integers(0, n.bit_length() - 1))
    return InstancePair(
        "unrestricted",
        HiddenSet.random(n, 1 << i, rng),
        HiddenSet.random(n, 1 << (i + 1), rng),
        {"n": n, "i": i},
    )


def gen_collision_pair(n: int, w_tilde: int, rng: np.random.Generator) -> InstancePair:
    """Random sets of sizes ``floor(w~/4)`` and ``4 w~``."""
    if not 4 <= w_tilde <= n // 4:
        raise InvalidParams(f"need 4 <= w~ <= n/4, got n={n}, w~={w_tilde}")
    return InstancePair(
        "collision",
        HiddenSet.random(n, w_tilde // 4, rng),
        HiddenSet.random(n, 4 * w_tilde, rng),
        {"n": n, "w_tilde": w_tilde},
    )


# --- multiple single elements ------------------------------------------------------


@dataclass(frozen=True)
class MSEInstance:
    """``b`` bit strings of length ``m``, string ``j`` having its single 1 at ``positions[j-1]``."""

    b: int
    m: int
    positions: tuple[int, ...]


def gen_mse_instance(b: int, m: int, rng: np.random.Generator) -> MSEInstance:
    if b < 1 or m < 1:
        raise InvalidParams(f"need b >= 1 and m >= 1, got b={b}, m={m}")
    return MSEInstance(b, m, tuple(int(x) for x in rng.integers(1, m + 1, size=b)))


def mse_query(instance: MSEInstance, j: int, lo: int, hi: int) -> bool:
    """Whether substring ``lo..hi`` of string ``j`` contains its 1."""
    if not 1 <= j <= instance.b:
        raise InvalidParams(f"string index {j} outside 1..{instance.b}")
    if not 1 <= lo <= hi <= instance.m:
        raise InvalidParams(f"substring {lo}..{hi} outside 1..{instance.m}")
    return lo <= instance.positions[j - 1] <= hi


def mse_reveal(instance: MSEInstance, j: int) -> tuple[int, int]:
    """Locate the 1 of string ``j`` by bisection; returns ``(position, queries)``."""
    lo, hi, used = 1, instance.m, 0
    while lo < hi:
        mid = (lo + hi) // 2
        used += 1
        if mse_query(instance, j, lo, mid):
            hi = mid
        else:
            lo = mid + 1
    return lo, used


# --- distinguishing -----------------------------------------------------------------


def transcript_distinguishable(specs, s1: HiddenSet, s2: HiddenSet,
                               shape: DomainShape | None = None) -> bool:
    """Whether some subset query in ``specs`` is answered differently on ``s1`` and ``s2``."""
    shape = shape if shape is not None else Line(s1.n)
    one = OracleSession(shape, s1, SubsetFamily.UNRESTRICTED)
    two = OracleSession(shape, s2, SubsetFamily.UNRESTRICTED)
    for spec in specs:
        if (one.intersection_size(spec) > 0) != (two.intersection_size(spec) > 0):
            return True
    return False


def export_pair(pair: InstancePair, directory, stem: str | None = None) -> list[Path]:
    """Write ``<stem>.S1.txt``, ``<stem>.S2.txt`` and a ``<stem>.json`` sidecar."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stem = stem or pair.kind
    p1, p2, meta = (directory / f"{stem}.S1.txt", directory / f"{stem}.S2.txt",
                    directory / f"{stem}.json")
    write_hidden_set(p1, pair.s1)
    write_hidden_set(p2, pair.s2)
    sidecar = {
        "kind": pair.kind,
        "S1": p1.name,
        "S2": p2.name,
        "w1": pair.s1.w,
        "w2": pair.s2.w,
        "metadata": pair.metadata,
    }
    meta.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return [p1, p2, meta]


GENERATORS = {
    "interval-query": gen_interval_query_pair,
    "interval-adaptive": gen_interval_adaptive_pair,
    "interval-sample": gen_interval_sample_pair,
    "unrestricted": lambda n, w_tilde, rng: gen_unrestricted_pair(n, rng),
    "collision": gen_collision_pair,
}
