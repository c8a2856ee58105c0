"""Universe geometry, subset descriptions and the hidden set.

Elements are 1-indexed integers in ``[1, n]``. Grid points ``(c_1, ..., c_d)``
with ``1 <= c_k <= dims[k]`` map to linear indices in row-major order (last
coordinate fastest)::

    index = 1 + sum((c_k - 1) * stride_k),   stride_d = 1

A hypercube point with bits ``(b_1, ..., b_d)`` maps to
``1 + sum(b_k * 2**(d - k))``, i.e. coordinate 1 is the most significant bit.
This is the same row-major order applied to ``{0, 1}^d``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Union

import numpy as np

from .errors import InvalidSpec

EXPLICIT_MAX_N = 1 << 26


# --- shapes -----------------------------------------------------------------


@dataclass(frozen=True)
class Grid:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(k) for k in self.dims)
        if not dims or any(k < 1 for k in dims):
            raise InvalidSpec(f"grid dimensions must be positive, got {self.dims}")
        object.__setattr__(self, "dims", dims)

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def n(self) -> int:
        return math.prod(self.dims)

    @property
    def strides(self) -> tuple[int, ...]:
        out = [1] * self.d
        for k in range(self.d - 2, -1, -1):
            out[k] = out[k + 1] * self.dims[k + 1]
        return tuple(out)

    def ravel(self, coords) -> np.ndarray:
        """Linear indices of an ``(m, d)`` array of 1-based coordinates."""
        coords = np.asarray(coords, dtype=np.int64).reshape(-1, self.d)
        return 1 + (coords - 1) @ np.asarray(self.strides, dtype=np.int64)

    def unravel(self, index) -> np.ndarray:
        """``(m, d)`` coordinates of linear indices."""
        rest = np.asarray(index, dtype=np.int64).reshape(-1) - 1
        out = np.empty((rest.size, self.d), dtype=np.int64)
        for k, stride in enumerate(self.strides):
            out[:, k] = rest // stride + 1
            rest = rest % stride
        return out


def Line(n: int) -> Grid:
    """The fully ordered universe ``{1..n}``; identical to ``Grid((n,))``."""
    return Grid((n,))


@dataclass(frozen=True)
class Hypercube:
    d: int

    def __post_init__(self):
        if int(self.d) < 1:
            raise InvalidSpec(f"hypercube dimension must be positive, got {self.d}")

    @property
    def n(self) -> int:
        return 1 << self.d

    def bit(self, index, coord: int):
        """Value of coordinate ``coord`` (1-based) at linear ``index``."""
        return ((np.asarray(index, dtype=np.int64) - 1) >> (self.d - coord)) & 1


DomainShape = Union[Grid, Hypercube]


# --- subset specs -------------------------------------------------------------


@dataclass(frozen=True)
class Whole:
    pass


@dataclass(frozen=True)
class Interval:
    lo: int
    hi: int

    def __len__(self) -> int:
        return self.hi - self.lo + 1


@dataclass(frozen=True)
class SubGrid:
    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(int(c) for c in self.lo))
        object.__setattr__(self, "hi", tuple(int(c) for c in self.hi))


@dataclass(frozen=True)
class SubCube:
    """Sub-cube fixing some coordinates; ``restrictions`` is sorted (coord, bit) pairs."""

    restrictions: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        items = self.restrictions
        if isinstance(items, dict):
            items = items.items()
        object.__setattr__(
            self, "restrictions", tuple(sorted((int(c), int(b)) for c, b in items))
        )

    def mask_value(self, d: int) -> tuple[int, int]:
        mask = value = 0
        for coord, bit in self.restrictions:
            mask |= 1 << (d - coord)
            value |= bit << (d - coord)
        return mask, value

    def prefix_range(self, d: int) -> tuple[int, int] | None:
        """Linear index range when the restricted coordinates are exactly ``1..t``."""
        coords = [c for c, _ in self.restrictions]
        if coords != list(range(1, len(coords) + 1)):
            return None
        t = len(coords)
        top = 0
        for _, bit in self.restrictions:
            top = (top << 1) | bit
        span = 1 << (d - t)
        return 1 + top * span, (top + 1) * span


@dataclass(frozen=True, eq=False)
class Explicit:
    """Arbitrary subset as a boolean vector; ``members[i]`` for element ``i`` (index 0 unused)."""

    members: np.ndarray

    @classmethod
    def from_elements(cls, elements: Iterable[int], n: int) -> "Explicit":
        idx = np.asarray(list(elements), dtype=np.int64)
        if idx.size and (idx.min() < 1 or idx.max() > n):
            raise InvalidSpec(f"explicit members must lie in [1, {n}]")
        bits = np.zeros(n + 1, dtype=bool)
        bits[idx] = True
        return cls(bits)

    def __len__(self) -> int:
        return int(self.members[1:].sum())


@dataclass(frozen=True)
class Hashed:
    """Pseudo-random subset ``{x : h(key, x) < threshold}``.

    Compact stand-in for an explicit random subset with inclusion
    probability ``threshold / 2**64``; see :func:`setsize.kernels.hashed_member`.
    """

    key: int
    threshold: int

    def materialize(self, n: int) -> Explicit:
        from .kernels import hashed_member

        bits = np.zeros(n + 1, dtype=bool)
        for x in range(1, n + 1):
            bits[x] = hashed_member(self.key, x, self.threshold)
        return Explicit(bits)


SubsetSpec = Union[Whole, Interval, SubGrid, SubCube, Explicit, Hashed]


class SubsetFamily(enum.Enum):
    UNIVERSE_ONLY = "universe"
    INTERVALS = "intervals"
    SUBGRIDS = "subgrids"
    SUBCUBES = "subcubes"
    UNRESTRICTED = "unrestricted"


def validate_spec(shape: DomainShape, spec: SubsetSpec) -> None:
    """Raise :class:`InvalidSpec` unless ``spec`` is well formed for ``shape``."""
    n = shape.n
    if isinstance(spec, Whole):
        return
    if isinstance(spec, Interval):
        if not (1 <= spec.lo <= spec.hi <= n):
            raise InvalidSpec(f"interval [{spec.lo}, {spec.hi}] outside [1, {n}]")
        return
    if isinstance(spec, SubGrid):
        if not isinstance(shape, Grid):
            raise InvalidSpec("sub-grid spec on a non-grid universe")
        if len(spec.lo) != shape.d or len(spec.hi) != shape.d:
            raise InvalidSpec(f"sub-grid corners must have {shape.d} coordinates")
        for lo, hi, k in zip(spec.lo, spec.hi, shape.dims):
            if not (1 <= lo <= hi <= k):
                raise InvalidSpec(f"sub-grid {spec.lo}..{spec.hi} outside dims {shape.dims}")
        return
    if isinstance(spec, SubCube):
        if not isinstance(shape, Hypercube):
            raise InvalidSpec("sub-cube spec on a non-hypercube universe")
        coords = [c for c, _ in spec.restrictions]
        if len(set(coords)) != len(coords):
            raise InvalidSpec("sub-cube restricts a coordinate twice")
        for coord, bit in spec.restrictions:
            if not 1 <= coord <= shape.d or bit not in (0, 1):
                raise InvalidSpec(f"bad sub-cube restriction {coord}->{bit}")
        return
    if isinstance(spec, Explicit):
        if n > EXPLICIT_MAX_N:
            raise InvalidSpec(f"explicit subsets are capped at n = 2^26, got n = {n}")
        if spec.members.shape != (n + 1,):
            raise InvalidSpec(f"explicit subset must have length n + 1 = {n + 1}")
        return
    if isinstance(spec, Hashed):
        if not 0 <= spec.threshold < 1 << 64:
            raise InvalidSpec("hashed subset threshold must fit in 64 bits")
        return
    raise InvalidSpec(f"unknown subset spec {spec!r}")


def spec_size(shape: DomainShape, spec: SubsetSpec) -> int | None:
    """``|T|`` for structured specs; ``None`` for hashed subsets."""
    if isinstance(spec, Whole):
        return shape.n
    if isinstance(spec, Interval):
        return len(spec)
    if isinstance(spec, SubGrid):
        return math.prod(h - l + 1 for l, h in zip(spec.lo, spec.hi))
    if isinstance(spec, SubCube):
        return 1 << (shape.d - len(spec.restrictions))
    if isinstance(spec, Explicit):
        return len(spec)
    return None


def _is_universe(shape, spec) -> bool:
    if isinstance(spec, Explicit):
        return bool(spec.members[1:].all())
    return spec_size(shape, spec) == shape.n


def spec_allowed(family: SubsetFamily, spec: SubsetSpec, shape: DomainShape | None = None) -> bool:
    """Whether the set described by ``spec`` belongs to ``family``.

    Whole is allowed everywhere and singletons count as intervals, sub-grids
    and sub-cubes. ``shape`` is needed to recognise specs that happen to
    describe all of ``U`` or a single element; without it only the type of ``spec``
    is considered.
    """
    if family is SubsetFamily.UNRESTRICTED or isinstance(spec, Whole):
        return True
    size = spec_size(shape, spec) if shape is not None else None
    if shape is not None and size == shape.n and _is_universe(shape, spec):
        return True
    if family is SubsetFamily.UNIVERSE_ONLY:
        return False
    singleton = size == 1 and not isinstance(spec, (Explicit, Hashed))
    line = isinstance(shape, Grid) and shape.d == 1
    if family is SubsetFamily.INTERVALS:
        return isinstance(spec, Interval) or singleton or (isinstance(spec, SubGrid) and line)
    if family is SubsetFamily.SUBGRIDS:
        return (
            isinstance(spec, SubGrid)
            or singleton
            or (isinstance(spec, Interval) and (line or shape is None))
            or isinstance(spec, SubCube)
        )
    if family is SubsetFamily.SUBCUBES:
        return isinstance(spec, SubCube) or singleton
    return False


# --- hidden set -------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HiddenSet:
    """The unknown set ``S`` as a strictly increasing array of indices in ``[1, n]``."""

    elements: np.ndarray
    n: int
    _list: list = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        arr = np.asarray(self.elements, dtype=np.int64).reshape(-1)
        if arr.size:
            if np.any(np.diff(arr) <= 0):
                raise InvalidSpec("hidden set elements must be strictly increasing")
            if arr[0] < 1 or arr[-1] > self.n:
                raise InvalidSpec(f"hidden set elements must lie in [1, {self.n}]")
        arr.setflags(write=False)
        object.__setattr__(self, "elements", arr)
        object.__setattr__(self, "_list", arr.tolist())

    @classmethod
    def of(cls, elements: Iterable[int], n: int) -> "HiddenSet":
        return cls(np.unique(np.asarray(list(elements), dtype=np.int64)), n)

    @classmethod
    def random(cls, n: int, w: int, rng: np.random.Generator) -> "HiddenSet":
        """Uniformly random subset of ``[1, n]`` of size ``w``."""
        if not 0 <= w <= n:
            raise InvalidSpec(f"cannot draw {w} elements from a universe of {n}")
        picks = rng.choice(n, size=w, replace=False, shuffle=False)
        return cls(np.sort(picks.astype(np.int64)) + 1, n)

    @property
    def w(self) -> int:
        return int(self.elements.size)

    def __len__(self) -> int:
        return self.w

    def __contains__(self, x) -> bool:
        import bisect

        i = bisect.bisect_left(self._list, x)
        return i < len(self._list) and self._list[i] == x

    def __eq__(self, other) -> bool:
        if not isinstance(other, HiddenSet):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.elements, other.elements)

    def __hash__(self):
        return hash((self.n, self.elements.tobytes()))

    def as_set(self) -> set[int]:
        return set(self._list)


def load_hidden_set(path, n: int | None = None) -> HiddenSet:
    """Read a hidden-set file: one index per line, optional ``# n=<size>`` header."""
    header_n = None
    values = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip().replace(" ", "")
            if lineno == 1 and body.startswith("n="):
                try:
                    header_n = int(body[2:])
                except ValueError:
                    raise InvalidSpec(f"{path}: bad header {line!r}") from None
            continue
        try:
            values.append(int(line))
        except ValueError:
            raise InvalidSpec(f"{path}:{lineno}: not an integer index: {line!r}") from None
    if n is not None and header_n is not None and n != header_n:
        raise InvalidSpec(f"{path}: header says n={header_n} but n={n} was given")
    size = n if n is not None else header_n
    if size is None:
        raise InvalidSpec(f"{path}: universe size missing (no '# n=' header and no n given)")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InvalidSpec(f"{path}: indices must be strictly increasing")
    return HiddenSet(np.asarray(values, dtype=np.int64), size)


def write_hidden_set(path, hidden: HiddenSet) -> None:
    lines = [f"# n={hidden.n}"] + [str(x) for x in hidden.elements.tolist()]
    Path(path).write_text("\n".join(lines) + "\n")
