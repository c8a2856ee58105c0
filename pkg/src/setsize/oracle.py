"""Oracle sessions: subset queries and subset samples against a hidden set.

A session owns the hidden set, the allowed subset family, a private random
stream (used only to pick sampled elements) and the tally of calls. Besides
the one-call-at-a-time operations there are metered batch forms the
estimators use on their hot paths; each is equivalent, call for call, to the
corresponding run of single calls:

* :meth:`OracleSession.sample_batch` returns the histogram of ``m``
  independent samples (the multiset the ``m`` calls would return);
* :meth:`OracleSession.probe_singletons` answers a run of singleton queries
  whose indices come from a counter-based stream chosen by the caller;
* :meth:`OracleSession.query_hashed` answers a run of queries on hashed
  random subsets;
* :meth:`OracleSession.query_intervals` answers a list of interval queries.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .domain import (
    DomainShape,
    Explicit,
    Hashed,
    HiddenSet,
    Interval,
    SubCube,
    SubGrid,
    SubsetFamily,
    SubsetSpec,
    Whole,
    spec_allowed,
    validate_spec,
)
from .errors import FamilyViolation, InvalidSpec


@dataclass
class OracleTally:
    queries: int = 0
    samples: int = 0
    transcript: list | None = None

    @property
    def calls(self) -> int:
        return self.queries + self.samples


@dataclass(frozen=True)
class SampleBatch:
    """Histogram of a batch of samples: distinct ``values`` with ``counts``."""

    values: np.ndarray
    counts: np.ndarray

    @property
    def empty(self) -> bool:
        return self.values.size == 0

    @property
    def size(self) -> int:
        return int(self.counts.sum())

    def sorted_samples(self) -> np.ndarray:
        return np.repeat(self.values, self.counts)


@dataclass
class OracleSession:
    shape: DomainShape
    hidden: HiddenSet
    family: SubsetFamily
    rng: np.random.Generator = field(default_factory=np.random.default_rng)
    record: bool = False
    tally: OracleTally = field(init=False)

    def __post_init__(self):
        if self.hidden.n != self.shape.n:
            raise InvalidSpec(
                f"hidden set universe size {self.hidden.n} != shape size {self.shape.n}"
            )
        if not isinstance(self.rng, np.random.Generator):
            self.rng = np.random.default_rng(self.rng)
        self.tally = OracleTally(transcript=[] if self.record else None)
        self._bitmap = None

    # -- internals -------------------------------------------------------------

    def _check(self, spec: SubsetSpec) -> None:
        validate_spec(self.shape, spec)
        if not spec_allowed(self.family, spec, self.shape):
            raise FamilyViolation(f"{spec!r} is not in family {self.family.value}")

    def _log(self, kind: str, spec, answer) -> None:
        if self.tally.transcript is not None:
            self.tally.transcript.append((kind, spec, answer))

    def _span(self, lo: int, hi: int) -> tuple[int, int]:
        items = self.hidden._list
        return bisect.bisect_left(items, lo), bisect.bisect_right(items, hi)

    def _members(self, spec: SubsetSpec) -> np.ndarray:
        """Sorted elements of ``T ∩ S``."""
        elems = self.hidden.elements
        if isinstance(spec, Whole):
            return elems
        if isinstance(spec, Interval):
            a, b = self._span(spec.lo, spec.hi)
            return elems[a:b]
        if isinstance(spec, SubGrid):
            shape = self.shape
            stride0 = shape.strides[0]
            a, b = self._span((spec.lo[0] - 1) * stride0 + 1, spec.hi[0] * stride0)
            part = elems[a:b]
            if shape.d == 1 or part.size == 0:
                return part
            keep = np.ones(part.size, dtype=bool)
            rest = part - 1
            for k in range(1, shape.d):
                coord = (rest // shape.strides[k]) % shape.dims[k] + 1
                keep &= (coord >= spec.lo[k]) & (coord <= spec.hi[k])
            return part[keep]
        if isinstance(spec, SubCube):
            d = self.shape.d
            span = spec.prefix_range(d)
            if span is not None:
                a, b = self._span(*span)
                return elems[a:b]
            mask, value = spec.mask_value(d)
            return elems[((elems - 1) & mask) == value]
        if isinstance(spec, Explicit):
            return elems[spec.members[elems]]
        if isinstance(spec, Hashed):
            keep = [kernels.hashed_member(spec.key, x, spec.threshold) for x in self.hidden._list]
            return elems[np.asarray(keep, dtype=bool)] if keep else elems
        raise InvalidSpec(f"unknown subset spec {spec!r}")

    def _count(self, spec: SubsetSpec) -> int:
        if isinstance(spec, Interval):
            a, b = self._span(spec.lo, spec.hi)
            return b - a
        if isinstance(spec, Whole):
            return self.hidden.w
        return int(self._members(spec).size)

    @property
    def bitmap(self) -> np.ndarray:
        if self._bitmap is None:
            bits = np.zeros(self.shape.n + 1, dtype=np.uint8)
            bits[self.hidden.elements] = 1
            self._bitmap = bits
        return self._bitmap

    # -- single calls ------------------------------------------------------------

    def query(self, spec: SubsetSpec) -> bool:
        self._check(spec)
        if isinstance(spec, Hashed):
            answer = self._hashed_hit(spec.key, spec.threshold)
        else:
            answer = self._count(spec) > 0
        self.tally.queries += 1
        self._log("query", spec, answer)
        return answer

    def sample(self, spec: SubsetSpec) -> int | None:
        """A uniform element of ``T ∩ S``, or ``None`` when the intersection is empty."""
        self._check(spec)
        members = self._members(spec)
        value = None
        if members.size:
            value = int(members[self.rng.integers(members.size)])
        self.tally.samples += 1
        self._log("sample", spec, value)
        return value

    def intersection_size(self, spec: SubsetSpec) -> int:
        """Exact ``|T ∩ S|``. Ground truth for tests; not metered."""
        validate_spec(self.shape, spec)
        return self._count(spec)

    # -- metered batches -----------------------------------------------------------

    def sample_batch(self, spec: SubsetSpec, m: int) -> SampleBatch:
        """Histogram of ``m`` independent samples from ``T ∩ S``."""
        self._check(spec)
        m = int(m)
        members = self._members(spec)
        k = members.size
        if k == 0 or m == 0:
            batch = SampleBatch(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
        elif k == 1:
            batch = SampleBatch(members.copy(), np.array([m], dtype=np.int64))
        elif m < k:
            picks = members[self.rng.integers(k, size=m)]
            values, counts = np.unique(picks, return_counts=True)
            batch = SampleBatch(values, counts.astype(np.int64))
        else:
            counts = self.rng.multinomial(m, np.full(k, 1.0 / k))
            hit = counts > 0
            batch = SampleBatch(members[hit], counts[hit].astype(np.int64))
        self.tally.samples += m
        if self.tally.transcript is not None:
            values = batch.sorted_samples().tolist() if not batch.empty else [None] * m
            for v in values:
                self._log("sample", spec, v)
        return batch

    def sample_hits(self, spec: SubsetSpec, m: int, inner: SubsetSpec) -> int:
        """How many of ``m`` independent samples from ``T ∩ S`` fall in ``inner``.

        The samples are metered in full; only their coarsening to the two
        cells ``inner`` / not ``inner`` is returned, which is all a ratio
        estimate needs. ``inner`` is evaluated on sampled elements, so it is
        not itself a call and need not belong to the family.
        """
        if self.tally.transcript is not None:
            batch = self.sample_batch(spec, m)
            inside = self._members(inner)
            return int(batch.counts[np.isin(batch.values, inside)].sum())
        self._check(spec)
        validate_spec(self.shape, inner)
        m = int(m)
        total = self._count(spec)
        hits = 0
        if total and m:
            members = self._members(spec)
            inside = int(np.isin(members, self._members(inner), assume_unique=True).sum())
            hits = int(self.rng.binomial(m, inside / total)) if inside < total else m
        self.tally.samples += m
        return hits

    def probe_singletons(self, key: int, start: int, count: int, *,
                         first_hit: bool = False, as_samples: bool = False) -> tuple[int, int]:
        """Singleton calls on ``probe_index(key, c, n)`` for ``c`` in ``start .. start+count-1``.

        With ``first_hit`` the run stops at the first element of ``S``.
        Returns ``(issued, result)`` where ``result`` is the number of hits,
        or with ``first_hit`` the 0-based offset of the hit (``-1`` if none).
        Singletons belong to every family except ``UniverseOnly``.
        """
        n = self.shape.n
        if n > kernels.MAX_PROBE_N:
            raise InvalidSpec(f"singleton probes support n <= 2^26, got {n}")
        if self.family is SubsetFamily.UNIVERSE_ONLY and n > 1:
            raise FamilyViolation("singleton subsets are not allowed in family universe")
        if count <= 0:
            return 0, (-1 if first_hit else 0)
        if first_hit:
            offset = kernels.first_probe_hit(self.bitmap, n, key, start, count)
            issued = count if offset < 0 else offset + 1
            result = offset
        else:
            issued = count
            result = kernels.count_probe_hits(self.bitmap, n, key, start, count)
        if as_samples:
            self.tally.samples += issued
        else:
            self.tally.queries += issued
        if self.tally.transcript is not None:
            kind = "sample" if as_samples else "query"
            bits = self.bitmap
            for x in kernels.probe_indices(key, start, issued, n).tolist():
                hit = bool(bits[x])
                self._log(kind, Interval(x, x), (x if hit else None) if as_samples else hit)
        return issued, result

    def _hashed_hit(self, key: int, threshold: int) -> bool:
        return any(kernels.hashed_member(key, x, threshold) for x in self.hidden._list)

    def query_hashed(self, key: int, start: int, count: int, threshold: int) -> int:
        """Queries on hashed subsets ``Hashed(subset_key(key, c), threshold)``; returns #negatives."""
        if self.family is not SubsetFamily.UNRESTRICTED:
            raise FamilyViolation(f"hashed subsets are not in family {self.family.value}")
        if count <= 0:
            return 0
        negatives = kernels.count_hashed_negatives(self.hidden.elements, key, start, count, threshold)
        self.tally.queries += count
        if self.tally.transcript is not None:
            for c in range(start, start + count):
                spec = Hashed(kernels.subset_key(key, c), threshold)
                self._log("query", spec, self._hashed_hit(spec.key, threshold))
        return negatives

    def query_intervals(self, bounds) -> list[bool]:
        """Answer interval queries ``[(lo, hi), ...]`` in order."""
        n = self.shape.n
        arr = np.asarray(bounds, dtype=np.int64).reshape(-1, 2)
        lo, hi = arr[:, 0], arr[:, 1]
        bad = (lo < 1) | (lo > hi) | (hi > n)
        if bad.any():
            k = int(np.flatnonzero(bad)[0])
            raise InvalidSpec(f"interval [{lo[k]}, {hi[k]}] outside [1, {n}]")
        if not spec_allowed(self.family, Interval(1, min(2, n)), self.shape):
            for a, b in arr.tolist():
                if not spec_allowed(self.family, Interval(a, b), self.shape):
                    raise FamilyViolation(f"[{a}, {b}] is not in family {self.family.value}")
        elements = self.hidden.elements
        out = (np.searchsorted(elements, hi, "right") > np.searchsorted(elements, lo, "left")).tolist()
        self.tally.queries += len(out)
        if self.tally.transcript is not None:
            for (lo, hi), ans in zip(bounds, out):
                self._log("query", Interval(lo, hi), ans)
        return out


def subset_query(session: OracleSession, spec: SubsetSpec) -> bool:
    return session.query(spec)


def subset_sample(session: OracleSession, spec: SubsetSpec) -> int | None:
    return session.sample(spec)


def intersection_size(session: OracleSession, spec: SubsetSpec) -> int:
    return session.intersection_size(spec)
