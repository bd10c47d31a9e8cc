# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitset kernels.  Same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef extern from *:
    int popcount64 "__builtin_popcountll"(unsigned long long) nogil
    int ctz64 "__builtin_ctzll"(unsigned long long) nogil


cdef inline uint64_t _word(const uint64_t[:, ::1] table, const int64_t[:, ::1] idx,
                           Py_ssize_t v, Py_ssize_t w) noexcept nogil:
    cdef Py_ssize_t f
    cdef uint64_t x = table[idx[v, 0], w]
    for f in range(1, idx.shape[1]):
        x &= table[idx[v, f], w]
    return x


def first_hits(const uint64_t[:, ::1] table, const int64_t[:, ::1] idx,
               const int64_t[::1] queries, const uint64_t[::1] mask):
    cdef Py_ssize_t n = queries.shape[0], W = mask.shape[0], i, w
    cdef int64_t v
    cdef uint64_t x
    out = np.full(n, -1, dtype=np.int64)
    cdef int64_t[::1] o = out
    with nogil:
        for i in range(n):
            v = queries[i]
            for w in range(W):
                if mask[w] == 0:
                    continue
                x = _word(table, idx, v, w) & mask[w]
                if x:
                    o[i] = w * 64 + ctz64(x)
                    break
    return out


def count_hits(const uint64_t[:, ::1] table, const int64_t[:, ::1] idx,
               const int64_t[::1] queries, const uint64_t[::1] mask):
    cdef Py_ssize_t n = queries.shape[0], W = mask.shape[0], i, w
    cdef int64_t v, c
    out = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] o = out
    with nogil:
        for i in range(n):
            v = queries[i]
            c = 0
            for w in range(W):
                if mask[w]:
                    c += popcount64(_word(table, idx, v, w) & mask[w])
            o[i] = c
    return out


def or_rows(const uint64_t[:, ::1] table, const int64_t[:, ::1] idx,
            const int64_t[::1] vertices, Py_ssize_t W):
    cdef Py_ssize_t n = vertices.shape[0], i, w
    out = np.zeros(W, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    with nogil:
        for i in range(n):
            for w in range(W):
                o[w] |= _word(table, idx, vertices[i], w)
    return out


def greedy_fill(const uint64_t[:, ::1] table, const int64_t[:, ::1] idx,
                const int64_t[::1] order, uint64_t[::1] members, uint64_t[::1] blocked):
    """Scan ``order``; add each vertex that is neither a member nor blocked."""
    cdef Py_ssize_t n = order.shape[0], W = members.shape[0], i, w
    cdef int64_t v
    cdef uint64_t bit
    with nogil:
        for i in range(n):
            v = order[i]
            bit = (<uint64_t>1) << (v & 63)
            if (members[v >> 6] | blocked[v >> 6]) & bit:
                continue
            members[v >> 6] |= bit
            for w in range(W):
                blocked[w] |= _word(table, idx, v, w)
