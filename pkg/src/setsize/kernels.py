"""Backend selection for the probe kernels.

The compiled extension is used when it imports; otherwise the numpy
fallback is used. Set ``SETSIZE_PURE=1`` to force the fallback.

Scalar helpers here are plain Python integer arithmetic; they define the
reference semantics both backends must match.
"""
import os

from . import _fallback

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
GAMMA2 = 0xD1B54A32D192ED03
MAX_PROBE_N = 1 << 26

BACKEND = "python"
if not os.environ.get("SETSIZE_PURE"):
    try:
        from . import _kernels as _impl

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _fallback
else:
    _impl = _fallback


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_value(key: int, counter: int) -> int:
    return mix64((key + (counter + 1) * GAMMA) & MASK64)


def probe_index(key: int, counter: int, n: int) -> int:
    """Singleton probed at position ``counter`` of the stream ``key``."""
    return 1 + (((stream_value(key, counter) >> 26) * n) >> 38)


def hashed_member(key: int, x: int, threshold: int) -> bool:
    return mix64((key + x * GAMMA2) & MASK64) < threshold


def subset_key(key: int, counter: int) -> int:
    """Key of the ``counter``-th hashed subset drawn from stream ``key``."""
    return stream_value(key, counter)


def threshold_for(p: float) -> int:
    """64-bit threshold giving inclusion probability ``p`` (``p < 1``)."""
    return min(int(p * 2.0**64), MASK64)


probe_indices = _fallback.probe_indices


def count_probe_hits(bitmap, n, key, start, count):
    return int(_impl.count_probe_hits(bitmap, n, key, start, count))


def first_probe_hit(bitmap, n, key, start, max_count):
    return int(_impl.first_probe_hit(bitmap, n, key, start, max_count))


def count_hashed_negatives(elements, key, start, count, threshold):
    return int(_impl.count_hashed_negatives(elements, key, start, count, threshold))
