"""Opposition graphs on chambers and coflags, with independence tooling.

A graph never stores a Python adjacency structure.  Each vertex row is the
AND of a few precomputed bitsets (one per opposition condition), e.g. for a
chamber (P, l, pi, S) of PG(4, q) the row is
``not_in_solid[P] & misses_plane[l] & misses_line[pi] & avoids_point[S]``.
Below ``explicit_threshold`` vertices the rows are materialised once.
"""
from __future__ import annotations

import json
import os
import struct
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .flags import (
    chamber_from_ids,
    chamber_table,
    coflag_from_ids,
    coflag_table,
    decode_chamber,
    decode_coflag,
)
from .geometry import ProjectiveSpace

EXPLICIT_THRESHOLD = 50_000
EXACT_THRESHOLD = 2_000
FLAVORS = ("chambers", "coflags")
RULES = ("fast", "pairwise")
MAGIC = b"KNSET"
FORMAT_VERSION = 1


class UsageError(ValueError):
    """A precondition of an operation does not hold."""


class PropertyViolation(AssertionError):
    """A structural claim failed on a concrete instance."""


def default_threads() -> int:
    return int(os.environ.get("PGKNESER_THREADS", os.cpu_count() or 1))


def words(n: int) -> int:
    return (n + 63) // 64


def pack_bits(rows: np.ndarray) -> np.ndarray:
    """Pack a boolean (r, n) matrix into little-endian uint64 words (r, words(n))."""
    r, n = rows.shape
    W = words(n)
    padded = np.zeros((r, W * 64), dtype=bool)
    padded[:, :n] = rows
    return np.packbits(padded, axis=1, bitorder="little").view("<u8").astype(np.uint64)


def unpack_bits(bits: np.ndarray, n: int) -> np.ndarray:
    return np.unpackbits(bits.astype("<u8").view(np.uint8), bitorder="little")[:n].astype(bool)


def bits_from_indices(indices: Iterable[int], n: int) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    mask[np.fromiter(indices, dtype=np.int64)] = True
    return pack_bits(mask[None, :])[0]


def indices_from_bits(bits: np.ndarray, n: int) -> np.ndarray:
    return np.flatnonzero(unpack_bits(bits, n))


def _factor_specs(space: ProjectiveSpace, flavor: str, rule: str):
    """(source part, target part, relation matrix) triples.

    ``rel[x, y]`` is True when a vertex whose source part is x can be
    opposite to a vertex whose target part is y.
    """
    d = space.d
    if flavor == "chambers":
        dims = list(range(d))
    else:
        dims = list(range(1, d - 1))
    specs = []
    if rule == "fast":
        if flavor == "chambers":
            for i in range(d):
                specs.append((i, d - 1 - i, ~space.meets(i, d - 1 - i)))
        else:
            if d != 4:
                raise UsageError("the fast coflag rule is the d = 4 line-plane form; use rule='pairwise'")
            specs.append((0, 1, ~space.meets(1, 2)))
            specs.append((1, 0, ~space.meets(2, 1)))
    elif rule == "pairwise":
        for a, i in enumerate(dims):
            for b, j in enumerate(dims):
                md = space.meet_dims(i, j)
                specs.append((a, b, (md == -1) | (i + j - md == d)))
    else:
        raise UsageError(f"unknown rule {rule!r}")
    return specs


@dataclass
class OppositionGraph:
    space: ProjectiveSpace
    flavor: str
    ids: np.ndarray
    table: np.ndarray
    idx: np.ndarray
    explicit: bool
    rule: str = "fast"
    threads: int = 1

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def W(self) -> int:
        return words(self.n)

    @property
    def d(self) -> int:
        return self.space.d

    @property
    def q(self) -> int:
        return self.space.q

    def __len__(self):
        return self.n

    @property
    def valid(self) -> np.ndarray:
        return bits_from_indices(range(self.n), self.n)

    def row(self, v: int) -> np.ndarray:
        r = self.table[self.idx[v, 0]].copy()
        for f in range(1, self.idx.shape[1]):
            r &= self.table[self.idx[v, f]]
        return r

    def rows(self, vs: np.ndarray) -> np.ndarray:
        vs = np.asarray(vs, dtype=np.int64)
        out = self.table[self.idx[vs, 0]]
        for f in range(1, self.idx.shape[1]):
            out = out & self.table[self.idx[vs, f]]
        return out

    def adjacent(self, u: int, v: int) -> bool:
        return bool(self.row(u)[v >> 6] >> np.uint64(v & 63) & np.uint64(1))

    def neighbours(self, v: int) -> np.ndarray:
        return indices_from_bits(self.row(v), self.n)

    def degree(self, v: int) -> int:
        return int(np.bitwise_count(self.row(v)).sum())

    def vertex(self, v: int):
        if self.flavor == "chambers":
            return chamber_from_ids(self.space, self.ids[v])
        return coflag_from_ids(self.space, self.ids[v])

    def encode(self, v: int) -> str:
        return self.vertex(v).encode()

    def index_of(self, obj) -> int:
        key = tuple(self.space.index_of(S) for S in obj.parts)
        return self._lookup[key]

    @property
    def _lookup(self) -> dict:
        if not hasattr(self, "_lookup_cache"):
            self._lookup_cache = {tuple(r): i for i, r in enumerate(self.ids.tolist())}
        return self._lookup_cache

    def _split(self, fn, queries: np.ndarray, *args):
        queries = np.ascontiguousarray(queries, dtype=np.int64)
        if self.threads <= 1 or len(queries) < 4096:
            return fn(self.table, self.idx, queries, *args)
        chunks = np.array_split(queries, self.threads)
        with ThreadPoolExecutor(self.threads) as pool:
            parts = list(pool.map(lambda c: fn(self.table, self.idx, c, *args), chunks))
        return np.concatenate(parts)

    def first_hits(self, queries, mask) -> np.ndarray:
        return self._split(kernels.first_hits, queries, np.ascontiguousarray(mask, dtype=np.uint64))

    def count_hits(self, queries, mask) -> np.ndarray:
        return self._split(kernels.count_hits, queries, np.ascontiguousarray(mask, dtype=np.uint64))

    def union_of_rows(self, vertices) -> np.ndarray:
        vertices = np.ascontiguousarray(vertices, dtype=np.int64)
        return kernels.or_rows(self.table, self.idx, vertices, self.W)

    def explicit_rows(self) -> np.ndarray:
        if self.explicit:
            return self.table
        return self.rows(np.arange(self.n))


def build_graph(
    space: ProjectiveSpace,
    flavor: str = "chambers",
    *,
    explicit: bool | None = None,
    explicit_threshold: int = EXPLICIT_THRESHOLD,
    rule: str = "fast",
    threads: int = 1,
) -> OppositionGraph:
    """Opposition graph on chambers (Kneser graph on chambers) or on coflags
    (f-opposition; for d = 4 the Kneser graph on line-plane flags)."""
    if flavor not in FLAVORS:
        raise UsageError(f"flavor must be one of {FLAVORS}")
    ids = chamber_table(space) if flavor == "chambers" else coflag_table(space)
    n = len(ids)
    if explicit is None:
        explicit = n <= explicit_threshold
    elif explicit and n > explicit_threshold:
        raise UsageError(f"refusing explicit adjacency for {n} vertices (threshold {explicit_threshold})")

    blocks, idx_cols, offset = [], [], 0
    for src, tgt, rel in _factor_specs(space, flavor, rule):
        target = ids[:, tgt]
        rows = np.empty((rel.shape[0], words(n)), dtype=np.uint64)
        step = max(1, 2**22 // max(n, 1))
        for s in range(0, rel.shape[0], step):
            rows[s : s + step] = pack_bits(rel[s : s + step][:, target])
        blocks.append(rows)
        idx_cols.append(ids[:, src] + offset)
        offset += rel.shape[0]
    table = np.ascontiguousarray(np.concatenate(blocks))
    idx = np.ascontiguousarray(np.stack(idx_cols, axis=1), dtype=np.int64)
    G = OppositionGraph(space, flavor, ids, table, idx, explicit=False, rule=rule, threads=threads)
    if explicit:
        full = np.ascontiguousarray(G.rows(np.arange(n)))
        G = OppositionGraph(space, flavor, ids, full, np.arange(n, dtype=np.int64)[:, None].copy(),
                            explicit=True, rule=rule, threads=threads)
    return G


@dataclass
class VertexSet:
    graph: OppositionGraph
    bits: np.ndarray

    @classmethod
    def empty(cls, graph: OppositionGraph) -> "VertexSet":
        return cls(graph, np.zeros(graph.W, dtype=np.uint64))

    @classmethod
    def from_indices(cls, graph: OppositionGraph, indices: Iterable[int]) -> "VertexSet":
        return cls(graph, bits_from_indices(list(indices), graph.n))

    @classmethod
    def from_objects(cls, graph: OppositionGraph, objs) -> "VertexSet":
        return cls.from_indices(graph, [graph.index_of(o) for o in objs])

    def __len__(self) -> int:
        return int(np.bitwise_count(self.bits).sum())

    def __contains__(self, v: int) -> bool:
        return bool(self.bits[v >> 6] >> np.uint64(v & 63) & np.uint64(1))

    def __eq__(self, other):
        return isinstance(other, VertexSet) and other.graph is self.graph and np.array_equal(self.bits, other.bits)

    def indices(self) -> np.ndarray:
        return indices_from_bits(self.bits, self.graph.n)

    def with_vertex(self, v: int) -> "VertexSet":
        b = self.bits.copy()
        b[v >> 6] |= np.uint64(1) << np.uint64(v & 63)
        return VertexSet(self.graph, b)

    def without_vertex(self, v: int) -> "VertexSet":
        b = self.bits.copy()
        b[v >> 6] &= ~(np.uint64(1) << np.uint64(v & 63))
        return VertexSet(self.graph, b)

    def encodings(self) -> list[str]:
        return [self.graph.encode(int(v)) for v in self.indices()]

    # -- serialization -------------------------------------------------

    def to_json(self) -> str:
        G = self.graph
        doc = {"d": G.d, "q": G.q, "flavor": G.flavor, "size": len(self), "vertices": self.encodings()}
        return json.dumps(doc, indent=1)

    @classmethod
    def from_json(cls, graph: OppositionGraph, text: str) -> "VertexSet":
        doc = json.loads(text)
        if isinstance(doc, dict):
            if (doc.get("d"), doc.get("q"), doc.get("flavor")) != (graph.d, graph.q, graph.flavor):
                raise UsageError("vertex set file does not match the graph")
            doc = doc["vertices"]
        decode = decode_chamber if graph.flavor == "chambers" else decode_coflag
        return cls.from_objects(graph, [decode(t, graph.d, graph.q) for t in doc])

    def to_bytes(self) -> bytes:
        G = self.graph
        header = MAGIC + struct.pack("<BBBBQ", FORMAT_VERSION, G.q, G.d, FLAVORS.index(G.flavor), G.n)
        return header + self.bits.astype("<u8").tobytes()

    @classmethod
    def from_bytes(cls, graph: OppositionGraph, data: bytes) -> "VertexSet":
        if data[:5] != MAGIC:
            raise UsageError("not a KNSET file")
        version, q, d, flavor, n = struct.unpack_from("<BBBBQ", data, 5)
        if version != FORMAT_VERSION:
            raise UsageError(f"unsupported KNSET version {version}")
        if (q, d, FLAVORS[flavor], n) != (graph.q, graph.d, graph.flavor, graph.n):
            raise UsageError("KNSET file does not match the graph")
        payload = np.frombuffer(data, dtype="<u8", offset=5 + 12, count=graph.W)
        return cls(graph, payload.astype(np.uint64))


def _as_set(S) -> VertexSet:
    if not isinstance(S, VertexSet):
        raise UsageError("expected a VertexSet")
    return S


def is_independent(S: VertexSet) -> tuple[bool, tuple[int, int] | None]:
    """(True, None) or (False, adjacent pair)."""
    S = _as_set(S)
    members = S.indices()
    hits = S.graph.first_hits(members, S.bits)
    bad = np.flatnonzero(hits >= 0)
    if len(bad):
        return False, (int(members[bad[0]]), int(hits[bad[0]]))
    return True, None


def is_maximal_independent(S: VertexSet) -> tuple[bool, int | None]:
    """(True, None) or (False, a vertex that extends S).  S must be independent."""
    ok, pair = is_independent(S)
    if not ok:
        raise UsageError(f"set is not independent: {pair} adjacent")
    G = S.graph
    covered = G.union_of_rows(S.indices()) | S.bits
    free = G.valid & ~covered
    nz = np.flatnonzero(free)
    if len(nz):
        w = int(nz[0])
        word = int(free[w])
        return False, w * 64 + (word & -word).bit_length() - 1
    return True, None


def greedy_complete(S: VertexSet, order: str | int = "deterministic") -> VertexSet:
    """Extend an independent set to a maximal one.

    ``order="deterministic"`` scans vertices by ascending id; an integer
    seeds a numpy PCG64 generator that permutes the scan order.
    """
    G = S.graph
    if order == "deterministic":
        seq = np.arange(G.n, dtype=np.int64)
    elif isinstance(order, (int, np.integer)) and not isinstance(order, bool):
        seq = np.random.Generator(np.random.PCG64(int(order))).permutation(G.n).astype(np.int64)
    else:
        raise UsageError("order must be 'deterministic' or an integer seed")
    members = S.bits.copy()
    blocked = G.union_of_rows(S.indices())
    kernels.greedy_fill(G.table, G.idx, seq, members, blocked)
    return VertexSet(G, members)


# -- exact search -------------------------------------------------------


@dataclass
class ExactResult:
    status: str  # "optimal" or "inconclusive"
    size: int
    witness: list[int]
    nodes: int = 0
    elapsed: float = 0.0


class _Timeout(Exception):
    pass


def _python_rows(G: OppositionGraph) -> list[int]:
    rows = G.explicit_rows()
    return [int.from_bytes(r.astype("<u8").tobytes(), "little") for r in rows]


def exact_max_independent(
    G: OppositionGraph,
    *,
    budget: float | None = None,
    exact_threshold: int = EXACT_THRESHOLD,
    override: bool = False,
    seed_set: VertexSet | None = None,
) -> ExactResult:
    """Maximum independent set by branch and bound.

    Vertices are coloured greedily into cliques of G; an independent set
    picks at most one vertex per clique, which bounds each branch.  With a
    time ``budget`` (seconds) the search may stop early and then reports
    ``"inconclusive"`` with the best set seen.
    """
    if G.n > exact_threshold and not override:
        raise UsageError(f"{G.n} vertices exceed exact_threshold={exact_threshold}; pass override=True")
    t0 = time.monotonic()
    n = G.n
    raw = _python_rows(G)
    # renumber: high-degree vertices first, so colour classes start large
    order = sorted(range(n), key=lambda v: (-raw[v].bit_count(), v))
    pos = {v: i for i, v in enumerate(order)}
    adj = [0] * n
    for v in range(n):
        r, x = raw[v], 0
        while r:
            low = r & -r
            x |= 1 << pos[low.bit_length() - 1]
            r ^= low
        adj[pos[v]] = x

    start = seed_set if seed_set is not None else greedy_complete(VertexSet.empty(G))
    best = [pos[int(v)] for v in start.indices()]
    nodes = 0
    deadline = None if budget is None else t0 + budget

    def colour(P: int):
        out_v, out_c = [], []
        k = 0
        uncoloured = P
        while uncoloured:
            k += 1
            Q = uncoloured
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                uncoloured ^= low
                Q &= adj[v]
                out_v.append(v)
                out_c.append(k)
        return out_v, out_c

    R: list[int] = []

    def expand(P: int):
        nonlocal best, nodes
        nodes += 1
        if deadline is not None and nodes % 1024 == 0 and time.monotonic() > deadline:
            raise _Timeout
        vs, cs = colour(P)
        for i in range(len(vs) - 1, -1, -1):
            if len(R) + cs[i] <= len(best):
                return
            v = vs[i]
            R.append(v)
            newP = P & ~adj[v] & ~(1 << v)
            if newP:
                expand(newP)
            elif len(R) > len(best):
                best = list(R)
            R.pop()
            P &= ~(1 << v)

    status = "optimal"
    try:
        expand((1 << n) - 1)
    except _Timeout:
        status = "inconclusive"
    witness = sorted(order[v] for v in best)
    return ExactResult(status, len(witness), witness, nodes, time.monotonic() - t0)


def maximal_independent_sets(G: OppositionGraph) -> list[list[int]]:
    """All maximal independent sets (Bron-Kerbosch with pivoting on the
    complement).  Only sensible for small graphs."""
    n = G.n
    adj = _python_rows(G)
    full = (1 << n) - 1
    non = [full & ~adj[v] & ~(1 << v) for v in range(n)]
    out = []

    def bk(R, P, X):
        if not P and not X:
            out.append(sorted(R))
            return
        PX = P | X
        pivot, best = -1, -1
        while PX:
            low = PX & -PX
            u = low.bit_length() - 1
            c = (P & non[u]).bit_count()
            if c > best:
                pivot, best = u, c
            PX ^= low
        cand = P & ~non[pivot]
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            bk(R + [v], P & non[v], X & non[v])
            P &= ~low
            X |= low
            cand ^= low

    bk([], full, 0)
    return sorted(out)


# -- the projective plane ------------------------------------------------


@dataclass
class Gamma2Class:
    kind: str  # "a": all chambers share the line or the point of a flag; "b": triangle
    size: int
    flag: tuple[int, int] | None = None  # (point id, line id) for kind "a"
    points: list[int] = field(default_factory=list)


def classify_gamma2_maximal(S: VertexSet) -> Gamma2Class:
    """Sort a maximal independent set of the chamber graph of PG(2, q) into
    the two possible shapes, or raise PropertyViolation."""
    G = S.graph
    if G.flavor != "chambers" or G.d != 2:
        raise UsageError("classification applies to chambers of PG(2, q)")
    q = G.q
    members = S.indices()
    pairs = {tuple(r) for r in G.ids[members].tolist()}
    size = len(pairs)
    if size == 2 * q + 1:
        for P, l in pairs:
            if all(p == P or m == l for p, m in pairs):
                expected = {tuple(r) for r in G.ids.tolist() if r[0] == P or r[1] == l}
                if pairs == expected:
                    return Gamma2Class("a", size, (int(P), int(l)))
    if size == 3:
        pts = sorted({p for p, _ in pairs})
        if len(pts) == 3:
            inc = G.space.incidence(0, 1)
            collinear = bool((inc[pts[0]] & inc[pts[1]] & inc[pts[2]]).any())
            if not collinear:
                return Gamma2Class("b", size, None, [int(p) for p in pts])
    raise PropertyViolation(f"maximal set of size {size} fits neither shape: {sorted(pairs)}")


def perturbation_search(
    G: OppositionGraph,
    start: VertexSet | None = None,
    *,
    budget: float = 10.0,
    seed: int = 0,
    drop: float = 0.2,
    max_rounds: int | None = None,
) -> tuple[VertexSet, int]:
    """Repeatedly drop a random fraction of the best set and greedily refill.

    Returns the largest maximal independent set seen and the number of
    rounds.  A heuristic only: it can witness large sets, never bound them.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    best = greedy_complete(start if start is not None else VertexSet.empty(G), int(rng.integers(2**63)))
    deadline = time.monotonic() + budget
    rounds = 0
    while time.monotonic() < deadline and (max_rounds is None or rounds < max_rounds):
        rounds += 1
        members = best.indices()
        keep = members[rng.random(len(members)) >= drop]
        cand = greedy_complete(VertexSet.from_indices(G, keep), int(rng.integers(2**63)))
        if len(cand) >= len(best):
            best = cand
    return best, rounds
