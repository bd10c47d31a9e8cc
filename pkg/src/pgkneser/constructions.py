"""The four large families of pairwise non-f-opposite line-plane flags of
PG(4, q) and their blowups to sets of chambers."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .flags import Coflag, chamber_to_coflag, coflag_table
from .geometry import ProjectiveSpace, Subspace, canonicalize
from .kneser import (
    OppositionGraph,
    UsageError,
    VertexSet,
    build_graph,
    is_independent,
    is_maximal_independent,
)

KINDS = ("a", "b", "c", "d")


def family_size(q: int) -> int:
    return (q * q + q + 1) * (q**3 + 2 * q * q + q + 1)


def blowup_size(q: int) -> int:
    return family_size(q) * (q + 1) ** 2


def _std(space: ProjectiveSpace, k: int) -> Subspace:
    n = space.d + 1
    return canonicalize([[int(i == j) for j in range(n)] for i in range(k + 1)], space.d, space.q)


@dataclass(frozen=True)
class FamilyParams:
    """Kind plus anchors.  Kinds a and c use (solid, point), b uses
    (solid, plane), d uses (line, point).  Unset anchors default to the
    coordinate subspaces <e0>, <e0,e1>, <e0,e1,e2>, <e0,..,e3>."""

    kind: str
    solid: Subspace | None = None
    point: Subspace | None = None
    plane: Subspace | None = None
    line: Subspace | None = None

    def resolved(self, space: ProjectiveSpace) -> "FamilyParams":
        if self.kind not in KINDS:
            raise UsageError(f"family kind must be one of {KINDS}, got {self.kind!r}")
        if space.d != 4:
            raise UsageError("line-plane families live in PG(4, q)")
        need = {"a": ("solid", "point"), "b": ("solid", "plane"), "c": ("solid", "point"), "d": ("line", "point")}[self.kind]
        dims = {"point": 0, "line": 1, "plane": 2, "solid": 3}
        vals = {}
        for name in need:
            S = getattr(self, name) or _std(space, dims[name])
            if S.proj_dim != dims[name] or (S.d, S.q) != (space.d, space.q):
                raise UsageError(f"anchor {name} must be a {name} of {space}, got {S}")
            vals[name] = S
        big = vals.get("solid") or vals.get("line")
        small = vals.get("point") or vals.get("plane")
        if not big.contains(small):
            raise UsageError(f"anchor {small} is not contained in {big}")
        return FamilyParams(self.kind, **vals)


def in_family(params: FamilyParams, f: Coflag) -> bool:
    """Membership predicate on a single flag, written with subspace operations."""
    l, pi = f.parts
    k = params.kind
    if k in ("a", "b"):
        S0 = params.solid
        if S0.contains(pi):
            return True
        if pi.meet(S0) != l:
            return False
        return l.contains(params.point) if k == "a" else params.plane.contains(l)
    P0 = params.point
    if l.contains(P0):
        return True
    if l.span(P0) != pi:
        return False
    return params.solid.contains(pi) if k == "c" else pi.contains(params.line)


def lineplane_family(space: ProjectiveSpace, params: FamilyParams) -> np.ndarray:
    """Sorted coflag-table indices of the flags in the family."""
    p = params.resolved(space)
    cof = coflag_table(space)
    lines, planes = cof[:, 0], cof[:, 1]
    idx = space.index_of
    pt_on_line = space.incidence(0, 1)
    pt_on_plane = space.incidence(0, 2)
    line_in_plane = space.incidence(1, 2)
    plane_in_solid = space.incidence(2, 3)
    line_in_solid = space.incidence(1, 3)
    if p.kind in ("a", "b"):
        s = idx(p.solid)
        inside = plane_in_solid[planes, s]
        # pi not in S0 and l in S0 forces l = pi meet S0
        cut = ~inside & line_in_solid[lines, s]
        if p.kind == "a":
            extra = pt_on_line[idx(p.point), lines]
        else:
            extra = line_in_plane[lines, idx(p.plane)]
        keep = inside | (cut & extra)
    else:
        P0 = idx(p.point)
        through = pt_on_line[P0, lines]
        spanned = ~through & pt_on_plane[P0, planes]
        if p.kind == "c":
            extra = plane_in_solid[planes, idx(p.solid)]
        else:
            extra = line_in_plane[idx(p.line), planes]
        keep = through | (spanned & extra)
    return np.flatnonzero(keep)


def blowup(space: ProjectiveSpace, coflags: np.ndarray) -> np.ndarray:
    """Sorted chamber-table indices of all chambers whose coflag is listed."""
    mark = np.zeros(len(coflag_table(space)), dtype=bool)
    mark[np.asarray(coflags, dtype=np.int64)] = True
    return np.flatnonzero(mark[chamber_to_coflag(space)])


@dataclass
class FamilyReport:
    kind: str
    q: int
    flags: int
    chambers: int
    checks: dict[str, bool] = field(default_factory=dict)
    witnesses: dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def verify_family(
    space: ProjectiveSpace,
    params: FamilyParams,
    *,
    coflag_graph: OppositionGraph | None = None,
    chamber_graph: OppositionGraph | None = None,
    family: np.ndarray | None = None,
) -> FamilyReport:
    """Independence/maximality of the flag family and of its blowup, sizes
    against the closed forms, and full weight of every blown-up coflag."""
    q = space.q
    Gf = coflag_graph or build_graph(space, "coflags")
    Gc = chamber_graph or build_graph(space, "chambers")
    N_idx = lineplane_family(space, params) if family is None else np.asarray(family)
    M_idx = blowup(space, N_idx)
    rep = FamilyReport(params.kind, q, len(N_idx), len(M_idx))

    N = VertexSet.from_indices(Gf, N_idx)
    ok, pair = is_independent(N)
    rep.checks["flags_independent"] = ok
    if not ok:
        rep.witnesses["flags_independent"] = [Gf.encode(v) for v in pair]
        rep.checks["flags_maximal"] = False
    else:
        ok, v = is_maximal_independent(N)
        rep.checks["flags_maximal"] = ok
        if not ok:
            rep.witnesses["flags_maximal"] = Gf.encode(v)

    M = VertexSet.from_indices(Gc, M_idx)
    ok, pair = is_independent(M)
    rep.checks["chambers_independent"] = ok
    if not ok:
        rep.witnesses["chambers_independent"] = [Gc.encode(v) for v in pair]
        rep.checks["chambers_maximal"] = False
    else:
        ok, v = is_maximal_independent(M)
        rep.checks["chambers_maximal"] = ok
        if not ok:
            rep.witnesses["chambers_maximal"] = Gc.encode(v)

    rep.checks["sizes_match_formulas"] = len(N_idx) == family_size(q) and len(M_idx) == blowup_size(q)
    weights = np.bincount(chamber_to_coflag(space)[M_idx], minlength=len(coflag_table(space)))
    present = weights[weights > 0]
    rep.checks["full_weight"] = bool(np.all(present == (q + 1) ** 2))
    return rep


def corrupt_family(graph: OppositionGraph, family: np.ndarray) -> np.ndarray:
    """Negative control: swap one member for a flag f-opposite to another member."""
    members = set(int(x) for x in family)
    target = int(family[-1])
    for v in graph.neighbours(target):
        if int(v) not in members:
            out = sorted((members - {int(family[0])}) | {int(v)})
            return np.array(out, dtype=np.int64)
    raise UsageError("no f-opposite replacement available")
