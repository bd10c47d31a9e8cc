"""Chambers and coflags of PG(d, q) and their opposition predicates."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import GeometryError, ProjectiveSpace, Subspace, decode


@dataclass(frozen=True)
class Chamber:
    """A full flag (S_0, ..., S_{d-1}) with proj_dim(S_i) = i."""

    parts: tuple[Subspace, ...]

    def __post_init__(self):
        _check_nested(self.parts, 0)

    @property
    def point(self) -> Subspace:
        return self.parts[0]

    @property
    def hyperplane(self) -> Subspace:
        return self.parts[-1]

    def encode(self) -> str:
        return "|".join(p.encode() for p in self.parts)


@dataclass(frozen=True)
class Coflag:
    """A chamber with its point and hyperplane removed: (S_1, ..., S_{d-2})."""

    parts: tuple[Subspace, ...]

    def __post_init__(self):
        _check_nested(self.parts, 1)

    def encode(self) -> str:
        return "|".join(p.encode() for p in self.parts)


def _check_nested(parts, first_dim):
    for i, S in enumerate(parts):
        if S.proj_dim != first_dim + i:
            raise GeometryError(f"part {i} has dimension {S.proj_dim}, expected {first_dim + i}")
    for A, B in zip(parts, parts[1:]):
        if not B.contains(A):
            raise GeometryError(f"{A} is not contained in {B}")


def decode_chamber(text: str, d: int, q: int) -> Chamber:
    return Chamber(tuple(decode(t, d, q) for t in text.split("|")))


def decode_coflag(text: str, d: int, q: int) -> Coflag:
    return Coflag(tuple(decode(t, d, q) for t in text.split("|")))


def _extend(paths: np.ndarray, inc: np.ndarray) -> np.ndarray:
    """Append to every path each b with inc[last, b]; keeps lexicographic order."""
    last = paths[:, -1]
    src, dst = np.nonzero(inc)
    starts = np.searchsorted(src, np.arange(inc.shape[0]))
    counts = np.bincount(src, minlength=inc.shape[0])
    rep = counts[last]
    out_prefix = np.repeat(paths, rep, axis=0)
    offsets = np.repeat(starts[last], rep) + (np.arange(rep.sum()) - np.repeat(np.cumsum(rep) - rep, rep))
    return np.concatenate([out_prefix, dst[offsets][:, None]], axis=1)


def flag_table(space: ProjectiveSpace, dims: range) -> np.ndarray:
    """Id table of all flags whose parts have the consecutive dimensions ``dims``.

    Row r lists subspace ids (one per dimension); rows are in lexicographic
    order, which is the canonical-encoding order of the flags.
    """
    dims = list(dims)
    paths = np.arange(space.count(dims[0]), dtype=np.int64)[:, None]
    for a, b in zip(dims, dims[1:]):
        paths = _extend(paths, space.incidence(a, b))
    return paths


@lru_cache(maxsize=16)
def chamber_table(space: ProjectiveSpace) -> np.ndarray:
    if space.d < 2:
        raise GeometryError("chambers need d >= 2")
    t = flag_table(space, range(0, space.d))
    t.setflags(write=False)
    return t


@lru_cache(maxsize=16)
def coflag_table(space: ProjectiveSpace) -> np.ndarray:
    if space.d < 3:
        raise GeometryError("coflags need d >= 3")
    t = flag_table(space, range(1, space.d - 1))
    t.setflags(write=False)
    return t


@lru_cache(maxsize=16)
def chamber_to_coflag(space: ProjectiveSpace) -> np.ndarray:
    """Row index in ``coflag_table`` of the coflag of every chamber."""
    cof = coflag_table(space)
    ch = chamber_table(space)
    base = np.int64(space.count(space.d - 2) + 1)
    keys = np.zeros(len(cof), dtype=np.int64)
    ckeys = np.zeros(len(ch), dtype=np.int64)
    for j in range(cof.shape[1]):
        keys = keys * base + cof[:, j]
        ckeys = ckeys * base + ch[:, j + 1]
    out = np.searchsorted(keys, ckeys)
    out.setflags(write=False)
    return out


def chamber_count(d: int, q: int) -> int:
    n = 1
    for i in range(1, d + 1):
        n *= (q ** (i + 1) - 1) // (q - 1)
    return n


def coflag_count(d: int, q: int) -> int:
    return chamber_count(d, q) // (q + 1) ** 2


def chamber_from_ids(space: ProjectiveSpace, ids) -> Chamber:
    return Chamber(tuple(space.subspaces(k)[int(i)] for k, i in enumerate(ids)))


def coflag_from_ids(space: ProjectiveSpace, ids) -> Coflag:
    return Coflag(tuple(space.subspaces(k + 1)[int(i)] for k, i in enumerate(ids)))


def chamber_ids(space: ProjectiveSpace, C: Chamber) -> tuple[int, ...]:
    return tuple(space.index_of(S) for S in C.parts)


def coflag_ids(space: ProjectiveSpace, f: Coflag) -> tuple[int, ...]:
    return tuple(space.index_of(S) for S in f.parts)


def enumerate_chambers(space: ProjectiveSpace) -> list[Chamber]:
    return [chamber_from_ids(space, row) for row in chamber_table(space)]


def enumerate_coflags(space: ProjectiveSpace) -> list[Coflag]:
    return [coflag_from_ids(space, row) for row in coflag_table(space)]


def _disjoint_or_spanning(A: Subspace, B: Subspace) -> bool:
    return A.meet(B).proj_dim == -1 or A.span(B).proj_dim == A.d


def is_opposite(C1: Chamber, C2: Chamber) -> bool:
    """S_i and R_{d-1-i} are disjoint for every i (checked in both directions)."""
    d = len(C1.parts)
    if len(C2.parts) != d:
        raise GeometryError("chambers of different spaces")
    for i in range(d):
        if C1.parts[i].meet(C2.parts[d - 1 - i]).proj_dim != -1:
            return False
        if C2.parts[i].meet(C1.parts[d - 1 - i]).proj_dim != -1:
            return False
    return True


def is_opposite_pairwise(C1: Chamber, C2: Chamber) -> bool:
    """Every S_i, R_j pair is disjoint or spans the whole space."""
    return all(_disjoint_or_spanning(A, B) for A in C1.parts for B in C2.parts)


def is_f_opposite(f: Coflag, g: Coflag) -> bool:
    """Every pair of components is disjoint or spans the whole space."""
    if len(f.parts) != len(g.parts):
        raise GeometryError("coflags of different spaces")
    return all(_disjoint_or_spanning(A, B) for A in f.parts for B in g.parts)


def is_f_opposite_lineplane(f: Coflag, g: Coflag) -> bool:
    """d = 4 form: the line of each flag misses the plane of the other."""
    (l1, p1), (l2, p2) = f.parts, g.parts
    return l1.meet(p2).proj_dim == -1 and l2.meet(p1).proj_dim == -1


def chamber_coflag(C: Chamber) -> Coflag:
    if len(C.parts) < 3:
        raise GeometryError("coflags need d >= 3")
    return Coflag(C.parts[1:-1])


def chambers_on_coflag(space: ProjectiveSpace, f: Coflag) -> list[Chamber]:
    """The (q+1)^2 chambers (P, f, H): points on the first part times
    hyperplanes through the last part."""
    first, last = f.parts[0], f.parts[-1]
    pts = [P for P in space.subspaces(0) if first.contains(P)]
    hyps = [H for H in space.subspaces(space.d - 1) if H.contains(last)]
    return [Chamber((P, *f.parts, H)) for P in pts for H in hyps]


def dual_chamber(C: Chamber) -> Chamber:
    return Chamber(tuple(S.perp() for S in reversed(C.parts)))


def dual_coflag(f: Coflag) -> Coflag:
    return Coflag(tuple(S.perp() for S in reversed(f.parts)))
