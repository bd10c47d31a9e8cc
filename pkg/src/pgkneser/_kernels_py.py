"""Numpy implementations of the bitset kernels (used when the compiled
extension is unavailable or ``PGKNESER_PURE=1``)."""
from __future__ import annotations

import numpy as np

CHUNK = 512


def _rows(table, idx, vs):
    out = table[idx[vs, 0]]
    for f in range(1, idx.shape[1]):
        out = out & table[idx[vs, f]]
    return out


def first_hits(table, idx, queries, mask):
    out = np.full(len(queries), -1, dtype=np.int64)
    for s in range(0, len(queries), CHUNK):
        hit = _rows(table, idx, queries[s : s + CHUNK]) & mask
        nz = hit != 0
        has = nz.any(axis=1)
        w = nz.argmax(axis=1)
        word = hit[np.arange(len(hit)), w]
        low = word & (~word + np.uint64(1))
        bit = np.bitwise_count(low - np.uint64(1)).astype(np.int64)
        out[s : s + CHUNK] = np.where(has, w * 64 + bit, -1)
    return out


def count_hits(table, idx, queries, mask):
    out = np.zeros(len(queries), dtype=np.int64)
    for s in range(0, len(queries), CHUNK):
        hit = _rows(table, idx, queries[s : s + CHUNK]) & mask
        out[s : s + CHUNK] = np.bitwise_count(hit).sum(axis=1, dtype=np.int64)
    return out


def or_rows(table, idx, vertices, W):
    out = np.zeros(W, dtype=np.uint64)
    for s in range(0, len(vertices), CHUNK):
        out |= np.bitwise_or.reduce(_rows(table, idx, vertices[s : s + CHUNK]), axis=0)
    return out


def greedy_fill(table, idx, order, members, blocked):
    one = np.uint64(1)
    for v in order.tolist():
        w, b = v >> 6, np.uint64(v & 63)
        if (members[w] | blocked[w]) >> b & one:
            continue
        members[w] |= one << b
        blocked |= _rows(table, idx, np.array([v]))[0]
