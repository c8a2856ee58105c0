# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled probe kernels.

Must stay bit-for-bit in agreement with ``_fallback.py``; the test suite
cross-checks both backends on the same inputs.
"""
from libc.stdint cimport int64_t, uint8_t, uint64_t

cdef uint64_t GAMMA = 0x9E3779B97F4A7C15ULL
cdef uint64_t GAMMA2 = 0xD1B54A32D192ED03ULL


cdef inline uint64_t mix64(uint64_t z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t stream_value(uint64_t key, uint64_t counter) noexcept nogil:
    return mix64(key + (counter + 1) * GAMMA)


cdef inline int64_t probe_at(uint64_t key, uint64_t counter, uint64_t n) noexcept nogil:
    return 1 + <int64_t>(((stream_value(key, counter) >> 26) * n) >> 38)


def count_probe_hits(const uint8_t[::1] bitmap, uint64_t n, uint64_t key,
                     uint64_t start, uint64_t count):
    cdef uint64_t c, stop = start + count, hits = 0
    with nogil:
        for c in range(start, stop):
            hits += bitmap[probe_at(key, c, n)]
    return hits


def first_probe_hit(const uint8_t[::1] bitmap, uint64_t n, uint64_t key,
                    uint64_t start, uint64_t max_count):
    cdef uint64_t c
    cdef int64_t found = -1
    with nogil:
        for c in range(max_count):
            if bitmap[probe_at(key, start + c, n)]:
                found = <int64_t>c
                break
    return found


def count_hashed_negatives(const int64_t[::1] elements, uint64_t key,
                           uint64_t start, uint64_t count, uint64_t threshold):
    cdef uint64_t j, sub, negatives = 0
    cdef Py_ssize_t i, w = elements.shape[0]
    cdef bint hit
    with nogil:
        for j in range(count):
            sub = stream_value(key, start + j)
            hit = False
            for i in range(w):
                if mix64(sub + <uint64_t>elements[i] * GAMMA2) < threshold:
                    hit = True
                    break
            if not hit:
                negatives += 1
    return negatives
