"""Pure numpy implementation of the probe kernels.

Every function mirrors its counterpart in ``_kernels.pyx`` exactly: the same
splitmix64 counter stream, the same index reduction, the same hash.
"""
import numpy as np

GAMMA = np.uint64(0x9E3779B97F4A7C15)
GAMMA2 = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S26 = np.uint64(26)
_S38 = np.uint64(38)

CHUNK = 1 << 20


def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _stream(key, counters):
    with np.errstate(over="ignore"):
        return _mix64(np.uint64(key) + (counters + np.uint64(1)) * GAMMA)


def probe_indices(key, start, count, n):
    """Indices in ``[1, n]`` probed by counters ``start .. start+count-1``."""
    counters = np.arange(start, start + count, dtype=np.uint64)
    with np.errstate(over="ignore"):
        v = _stream(key, counters)
        return ((v >> _S26) * np.uint64(n) >> _S38).astype(np.int64) + 1


def count_probe_hits(bitmap, n, key, start, count):
    hits = 0
    for lo in range(start, start + count, CHUNK):
        size = min(CHUNK, start + count - lo)
        hits += int(bitmap[probe_indices(key, lo, size, n)].sum(dtype=np.int64))
    return hits


def first_probe_hit(bitmap, n, key, start, max_count):
    done = 0
    size = 1024
    while done < max_count:
        size = min(size, max_count - done)
        found = np.flatnonzero(bitmap[probe_indices(key, start + done, size, n)])
        if found.size:
            return done + int(found[0])
        done += size
        size = min(2 * size, CHUNK)
    return -1


def count_hashed_negatives(elements, key, start, count, threshold):
    xs = np.asarray(elements, dtype=np.int64).astype(np.uint64) * GAMMA2
    subs = _stream(key, np.arange(start, start + count, dtype=np.uint64))
    thr = np.uint64(threshold)
    negatives = 0
    with np.errstate(over="ignore"):
        for sub in subs:
            if not (_mix64(sub + xs) < thr).any():
                negatives += 1
    return negatives
