"""Weights of coflags in independent chamber sets, the structural checks
that go with them, and sweep-based counting oracles for PG(4, q)."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from functools import cached_property
from typing import Any

import numpy as np

from .flags import chamber_to_coflag, coflag_table
from .geometry import ProjectiveSpace
from .kneser import (
    OppositionGraph,
    PropertyViolation,
    UsageError,
    VertexSet,
    build_graph,
    is_maximal_independent,
    unpack_bits,
)
from .polynomials import bound_polynomials


@dataclass
class Claim:
    """One report line; serialises to the JSON report schema."""

    claim_id: str
    paper_anchor: str
    parameters: dict[str, Any]
    computed_value: Any
    bound_value: Any
    status: str  # pass | fail | finding
    witness: Any = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["witness"] is None:
            del d["witness"]
        return d


def claims_to_json(claims: list[Claim]) -> str:
    return json.dumps([c.to_dict() for c in claims], indent=1, default=_jsonable)


def _jsonable(x):
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    return str(x)


class Context:
    """Tables for PG(4, q) shared by all weight computations."""

    def __init__(self, space: ProjectiveSpace, chambers: OppositionGraph | None = None,
                 coflags: OppositionGraph | None = None, threads: int = 1):
        if space.d != 4:
            raise UsageError("weight analysis is implemented for PG(4, q)")
        self.space = space
        self.q = space.q
        self.chambers = chambers or build_graph(space, "chambers", threads=threads)
        self.coflags = coflags or build_graph(space, "coflags", threads=threads)
        self.ch = self.chambers.ids
        self.cof = coflag_table(space)
        self.cof_of = chamber_to_coflag(space)
        self.pt_in_solid = space.incidence(0, 3)
        self.pt_in_plane = space.incidence(0, 2)
        self.pt_on_line = space.incidence(0, 1)
        self.plane_in_solid = space.incidence(2, 3)

    @cached_property
    def fopp(self) -> np.ndarray:
        """Dense boolean f-opposition matrix on coflags (small q only)."""
        rows = self.coflags.explicit_rows()
        return np.stack([unpack_bits(r, self.coflags.n) for r in rows])

    def fopp_row(self, f: int) -> np.ndarray:
        if "fopp" in self.__dict__:
            return self.fopp[f]
        return unpack_bits(self.coflags.row(f), self.coflags.n)


def _indices(M) -> np.ndarray:
    return M.indices() if isinstance(M, VertexSet) else np.asarray(M, dtype=np.int64)


def coflag_weights(ctx: Context, M) -> np.ndarray:
    """Weight of every coflag (number of M-chambers through it)."""
    return np.bincount(ctx.cof_of[_indices(M)], minlength=len(ctx.cof))


def coflag_weight(ctx: Context, M, f: int) -> int:
    return int(np.count_nonzero(ctx.cof_of[_indices(M)] == f))


def allowed_weights(q: int) -> set[int]:
    return {1, 2, q + 1, 2 * q + 1, (q + 1) ** 2}


@dataclass
class WeightReport:
    weights: np.ndarray
    spectrum: dict[int, int]
    total: int
    p_pairs: list[int] = field(default_factory=list)
    s_pairs: list[int] = field(default_factory=list)
    violations: list[dict] = field(default_factory=list)


def _require_maximal(M: VertexSet):
    if not isinstance(M, VertexSet):
        raise UsageError("expected a VertexSet of chambers")
    ok, _ = is_maximal_independent(M)
    if not ok:
        raise UsageError("weight laws need a maximal independent set")


def weight_spectrum(ctx: Context, M: VertexSet, *, check_maximal: bool = True) -> WeightReport:
    if check_maximal:
        _require_maximal(M)
    w = coflag_weights(ctx, M)
    present = w[w > 0]
    spectrum = dict(sorted(Counter(present.tolist()).items()))
    allowed = allowed_weights(ctx.q)
    viol = [{"coflag": int(f), "weight": int(w[f])} for f in np.flatnonzero(w) if int(w[f]) not in allowed]
    rep = WeightReport(w, spectrum, int(w.sum()), violations=viol)
    sm = sm_pm_pairs(ctx, M, weights=w)
    rep.p_pairs, rep.s_pairs = sm.p_pairs, sm.s_pairs
    rep.violations += sm.violations
    return rep


def _pair_counts(ctx: Context, M_idx: np.ndarray, which: str):
    """Counts of (coflag, point) or (coflag, solid) among M-chambers."""
    col = 0 if which == "point" else 3
    n = ctx.space.count(0 if which == "point" else 3)
    key = ctx.cof_of[M_idx] * n + ctx.ch[M_idx, col]
    keys, counts = np.unique(key, return_counts=True)
    return keys // n, keys % n, counts


def pair_weights(ctx: Context, M, f: int) -> tuple[dict[int, int], dict[int, int]]:
    """Weights of (P, f) for every point P on the line of f and of (f, H)
    for every solid H through the plane of f."""
    M_idx = _indices(M)
    line, plane = ctx.cof[f]
    on_f = M_idx[ctx.cof_of[M_idx] == f]
    pts = np.flatnonzero(ctx.pt_on_line[:, line])
    sols = np.flatnonzero(ctx.plane_in_solid[plane])
    pw = {int(P): int(np.count_nonzero(ctx.ch[on_f, 0] == P)) for P in pts}
    sw = {int(H): int(np.count_nonzero(ctx.ch[on_f, 3] == H)) for H in sols}
    return pw, sw


def check_pair_weights(ctx: Context, M) -> list[dict]:
    """Every point-coflag and coflag-solid weight must be 0, 1 or q+1."""
    M_idx = _indices(M)
    ok = {1, ctx.q + 1}
    out = []
    for which in ("point", "solid"):
        f, x, c = _pair_counts(ctx, M_idx, which)
        for fi, xi, ci in zip(f[~np.isin(c, list(ok))], x[~np.isin(c, list(ok))], c[~np.isin(c, list(ok))]):
            out.append({"check": f"{which}_pair_weight", "coflag": int(fi), which: int(xi), "weight": int(ci)})
    return out


def check_full_weight_biconditional(ctx: Context, M) -> list[dict]:
    """A coflag has weight (q+1)^2 exactly when no M-coflag is f-opposite to it."""
    M_idx = _indices(M)
    w = coflag_weights(ctx, M_idx)
    mcof = np.flatnonzero(w)
    mask = np.zeros(ctx.coflags.W, dtype=np.uint64)
    mask |= _bits(mcof, ctx.coflags.n)
    hits = ctx.coflags.first_hits(np.arange(ctx.coflags.n), mask)
    full = w == (ctx.q + 1) ** 2
    isolated = hits < 0
    bad = np.flatnonzero(full != isolated)
    return [{"check": "full_weight_iff_isolated", "coflag": int(f), "weight": int(w[f]),
             "f_opposite_m_coflag": int(hits[f])} for f in bad]


def _bits(indices, n):
    from .kneser import bits_from_indices

    return bits_from_indices(indices, n)


def check_weight_structure(ctx: Context, M) -> list[dict]:
    """Shape of the M-chambers on coflags of weight 2, q+1 and 2q+1, and the
    constraints they put on M-chambers with an f-opposite coflag."""
    q = ctx.q
    M_idx = _indices(M)
    w = coflag_weights(ctx, M_idx)
    cof_M = ctx.cof_of[M_idx]
    P_M, R_M = ctx.ch[M_idx, 0], ctx.ch[M_idx, 3]
    out = []
    for f in np.flatnonzero((w == 2) | (w == q + 1) | (w == 2 * q + 1)):
        on = cof_M == f
        Ps, Hs = P_M[on], R_M[on]
        opp = ctx.fopp_row(f)[cof_M]
        Q, R = P_M[opp], R_M[opp]
        wf = int(w[f])
        if wf == 2:
            (P1, P2), (H1, H2) = Ps, Hs
            ok = P1 != P2 and H1 != H2
            ok = ok and bool(np.all((ctx.pt_in_solid[P1, R] & ctx.pt_in_solid[Q, H2])
                                    | (ctx.pt_in_solid[P2, R] & ctx.pt_in_solid[Q, H1])))
        elif wf == q + 1:
            if len(set(Ps.tolist())) == 1:
                ok = bool(np.all(ctx.pt_in_solid[Ps[0], R]))
            elif len(set(Hs.tolist())) == 1:
                ok = bool(np.all(ctx.pt_in_solid[Q, Hs[0]]))
            else:
                ok = False
        else:
            Pc = Counter(Ps.tolist()).most_common(1)[0][0]
            Hc = Counter(Hs.tolist()).most_common(1)[0][0]
            ok = bool(np.all((Ps == Pc) | (Hs == Hc)))
            ok = ok and bool(np.all(ctx.pt_in_solid[Q, Hc] & ctx.pt_in_solid[Pc, R]))
            # every such g has weight one
            ok = ok and bool(np.all(w[cof_M[opp]] == 1))
        if not ok:
            out.append({"check": "weight_structure", "coflag": int(f), "weight": wf})
    return out


@dataclass
class PairClasses:
    p_pairs: list[int]
    s_pairs: list[int]
    violations: list[dict]


def sm_pm_pairs(ctx: Context, M, *, weights: np.ndarray | None = None) -> PairClasses:
    """Coflags of weight q+1 or 2q+1 with a point (P_M) or solid (S_M) of
    pair weight q+1; checks that no two of one kind are f-opposite."""
    q = ctx.q
    M_idx = _indices(M)
    w = coflag_weights(ctx, M_idx) if weights is None else weights
    fp, _, cp = _pair_counts(ctx, M_idx, "point")
    fs, _, cs = _pair_counts(ctx, M_idx, "solid")
    mid = (w == q + 1) | (w == 2 * q + 1)
    p_set = {f for f in fp[cp == q + 1].tolist() if mid[f]}
    s_set = {f for f in fs[cs == q + 1].tolist() if mid[f]}
    viol = []
    for f in np.flatnonzero(mid).tolist():
        isp, iss = f in p_set, f in s_set
        if w[f] == 2 * q + 1 and not (isp and iss):
            viol.append({"check": "weight_2q1_is_both", "coflag": f})
        if w[f] == q + 1 and not (isp or iss):
            viol.append({"check": "weight_q1_is_pair", "coflag": f})
        if w[f] == q + 1 and isp and iss:
            viol.append({"check": "weight_q1_not_both", "coflag": f})
    p_pairs, s_pairs = sorted(p_set), sorted(s_set)
    for name, pairs in (("S_M", s_pairs), ("P_M", p_pairs)):
        if len(pairs) > 1:
            mask = _bits(pairs, ctx.coflags.n)
            hits = ctx.coflags.first_hits(np.array(pairs), mask)
            for f, h in zip(pairs, hits):
                if h >= 0:
                    viol.append({"check": f"{name}_pairs_not_f_opposite", "coflag": f, "other": int(h)})
    return PairClasses(p_pairs, s_pairs, viol)


def weight_one_witnesses(ctx: Context, M, v: int) -> tuple[int, int]:
    """For an M-chamber (P, f, H) whose coflag has weight one, M-chambers
    (Q1, g1, R1), (Q2, g2, R2) with g_i f-opposite to f, P in R1, Q1 not in
    H, P not in R2, Q2 in H.  Raises PropertyViolation when none exist."""
    M_idx = _indices(M)
    f = int(ctx.cof_of[v])
    if coflag_weight(ctx, M_idx, f) != 1:
        raise UsageError("the chamber's coflag does not have weight one")
    P, H = ctx.ch[v, 0], ctx.ch[v, 3]
    opp = ctx.fopp_row(f)[ctx.cof_of[M_idx]]
    Q, R = ctx.ch[M_idx, 0], ctx.ch[M_idx, 3]
    P_in_R = ctx.pt_in_solid[P, R]
    Q_in_H = ctx.pt_in_solid[Q, H]
    first = np.flatnonzero(opp & P_in_R & ~Q_in_H)
    second = np.flatnonzero(opp & ~P_in_R & Q_in_H)
    if not len(first) or not len(second):
        raise PropertyViolation(f"no witness pair for weight-one chamber {v}")
    return int(M_idx[first[0]]), int(M_idx[second[0]])


def check_weight_one(ctx: Context, M) -> tuple[int, list[dict]]:
    M_idx = _indices(M)
    w = coflag_weights(ctx, M_idx)
    ones = M_idx[w[ctx.cof_of[M_idx]] == 1]
    viol = []
    for v in ones.tolist():
        try:
            weight_one_witnesses(ctx, M_idx, v)
        except PropertyViolation:
            viol.append({"check": "weight_one_witnesses", "chamber": v})
    return len(ones), viol


# -- counting oracles ------------------------------------------------------


def count_lines_meeting_two_planes(space: ProjectiveSpace, pi1: int, pi2: int) -> int:
    """Lines meeting both planes, by sweeping all lines."""
    if pi1 == pi2:
        raise UsageError("the two planes must differ")
    m = space.meets(1, 2)
    return int(np.count_nonzero(m[:, pi1] & m[:, pi2]))


def _admissible_pair(ctx: Context, f1: int, f2: int) -> bool:
    return ctx.cof[f1, 0] != ctx.cof[f2, 0] and ctx.cof[f1, 1] != ctx.cof[f2, 1]


def count_nonfopp_two_flags(ctx: Context, f1: int, f2: int) -> int:
    """Coflags non-f-opposite to both f1 and f2 (full sweep)."""
    G = ctx.coflags
    return int(np.bitwise_count(G.valid & ~G.row(f1) & ~G.row(f2)).sum())


def through_point_mask(ctx: Context, P0: int) -> np.ndarray:
    """Coflags (g, tau) with P0 in tau and P0 not on g, as bits."""
    keep = ctx.pt_in_plane[P0, ctx.cof[:, 1]] & ~ctx.pt_on_line[P0, ctx.cof[:, 0]]
    return _bits(np.flatnonzero(keep), len(ctx.cof))


def count_nonfopp_two_flags_through_point(ctx: Context, f1: int, f2: int, P0: int) -> int:
    (l1, p1), (l2, p2) = ctx.cof[f1], ctx.cof[f2]
    if not _admissible_pair(ctx, f1, f2):
        raise UsageError("need distinct lines and distinct planes")
    if not (ctx.pt_in_plane[P0, p1] and ctx.pt_in_plane[P0, p2]):
        raise UsageError("P0 must lie in both planes")
    if ctx.pt_on_line[P0, l1] or ctx.pt_on_line[P0, l2]:
        raise UsageError("P0 must lie on neither line")
    G = ctx.coflags
    return int(np.bitwise_count(through_point_mask(ctx, P0) & ~G.row(f1) & ~G.row(f2)).sum())


@dataclass
class SweepResult:
    inputs: int
    max_count: int
    witness: tuple | None
    bound: int

    @property
    def ok(self) -> bool:
        return self.max_count <= self.bound


def sweep_nonfopp_two_flags(ctx: Context, pairs=None) -> SweepResult:
    """Max of count_nonfopp_two_flags over admissible pairs (all of them if
    ``pairs`` is None)."""
    G = ctx.coflags
    comp = G.valid & ~G.explicit_rows() if G.explicit else None
    n = G.n
    best, wit, inputs = -1, None, 0
    if pairs is None:
        for f1 in range(n):
            adm = (ctx.cof[:, 0] != ctx.cof[f1, 0]) & (ctx.cof[:, 1] != ctx.cof[f1, 1])
            rows = comp[adm] if comp is not None else G.valid & ~G.rows(np.flatnonzero(adm))
            r1 = comp[f1] if comp is not None else G.valid & ~G.row(f1)
            counts = np.bitwise_count(rows & r1).sum(axis=1)
            inputs += len(counts)
            j = int(np.argmax(counts))
            if counts[j] > best:
                best, wit = int(counts[j]), (f1, int(np.flatnonzero(adm)[j]))
    else:
        for f1, f2 in pairs:
            c = count_nonfopp_two_flags(ctx, f1, f2)
            inputs += 1
            if c > best:
                best, wit = c, (f1, f2)
    return SweepResult(inputs, best, wit, bound_polynomials()["z_B"](ctx.q))


def admissible_point_triples(ctx: Context, P0: int) -> tuple[np.ndarray, np.ndarray]:
    """Coflags whose plane contains P0 and line misses it, and the pair
    admissibility matrix among them."""
    F = np.flatnonzero(ctx.pt_in_plane[P0, ctx.cof[:, 1]] & ~ctx.pt_on_line[P0, ctx.cof[:, 0]])
    L, Pl = ctx.cof[F, 0], ctx.cof[F, 1]
    adm = (L[:, None] != L[None, :]) & (Pl[:, None] != Pl[None, :])
    return F, adm


def sweep_nonfopp_through_point(ctx: Context, triples=None) -> SweepResult:
    G = ctx.coflags
    best, wit, inputs = -1, None, 0
    if triples is None:
        for P0 in range(ctx.space.num_points):
            F, adm = admissible_point_triples(ctx, P0)
            mask = through_point_mask(ctx, P0)
            comp = mask & ~G.rows(F)
            for a in range(len(F)):
                sel = np.flatnonzero(adm[a])
                if not len(sel):
                    continue
                counts = np.bitwise_count(comp[sel] & comp[a]).sum(axis=1)
                inputs += len(sel)
                j = int(np.argmax(counts))
                if counts[j] > best:
                    best, wit = int(counts[j]), (int(F[a]), int(F[sel[j]]), P0)
    else:
        for f1, f2, P0 in triples:
            c = count_nonfopp_two_flags_through_point(ctx, f1, f2, P0)
            inputs += 1
            if c > best:
                best, wit = c, (f1, f2, P0)
    return SweepResult(inputs, best, wit, bound_polynomials()["z_A"](ctx.q))


def random_admissible_pairs(ctx: Context, k: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    out = []
    n = len(ctx.cof)
    while len(out) < k:
        f1, f2 = (int(x) for x in rng.integers(0, n, 2))
        if _admissible_pair(ctx, f1, f2):
            out.append((f1, f2))
    return out


def random_admissible_triples(ctx: Context, k: int, rng: np.random.Generator) -> list[tuple[int, int, int]]:
    out = []
    npts = ctx.space.num_points
    while len(out) < k:
        P0 = int(rng.integers(0, npts))
        F, adm = admissible_point_triples(ctx, P0)
        a, b = (int(x) for x in rng.integers(0, len(F), 2))
        if adm[a, b]:
            out.append((int(F[a]), int(F[b]), P0))
    return out


# -- low-weight chambers near a plane or solid ------------------------------


@dataclass
class CasePattern:
    full_weight: int
    a1_points: list[int]
    a2_solids: list[int]

    @property
    def case(self) -> str:
        if self.a1_points:
            return "A1"
        if self.a2_solids:
            return "A2"
        return "B"


def case_pattern(ctx: Context, M) -> CasePattern:
    """Which structural patterns the weight-(q+1)^2 coflags of M follow: all
    flags with a line through a point P0 (A1), all flags with a plane in a
    solid S0 (A2), or neither (B)."""
    w = coflag_weights(ctx, M)
    full = w == (ctx.q + 1) ** 2
    lines, planes = ctx.cof[:, 0], ctx.cof[:, 1]
    a1 = [P for P in range(ctx.space.num_points) if np.all(full[ctx.pt_on_line[P, lines]])]
    a2 = [S for S in range(ctx.space.count(3)) if np.all(full[ctx.plane_in_solid[planes, S]])]
    return CasePattern(int(full.sum()), a1, a2)


def low_weight_points(ctx: Context, M) -> np.ndarray:
    """Point ids of the M-chambers whose coflag has weight at most two."""
    M_idx = _indices(M)
    w = coflag_weights(ctx, M_idx)
    low = M_idx[w[ctx.cof_of[M_idx]] <= 2]
    return ctx.ch[low, 0]


def count_weight_le2_points_in_plane(ctx: Context, M, sigma: int | None = None):
    pts = low_weight_points(ctx, M)
    counts = ctx.pt_in_plane[pts].sum(axis=0)
    return counts if sigma is None else int(counts[sigma])


def count_weight_le2_points_in_solid(ctx: Context, M, S: int | None = None):
    pts = low_weight_points(ctx, M)
    counts = ctx.pt_in_solid[pts].sum(axis=0)
    return counts if S is None else int(counts[S])


def check_low_weight_bounds(ctx: Context, M) -> list[Claim]:
    B = bound_polynomials()
    q = ctx.q
    pat = case_pattern(ctx, M)
    case = pat.case
    tag = "A" if case in ("A1", "A2") else "B"
    y, x = B[f"y_{tag}"](q), B[f"x_{tag}"](q)
    planes = count_weight_le2_points_in_plane(ctx, M)
    solids = count_weight_le2_points_in_solid(ctx, M)
    if case == "A2":
        solids = solids.copy()
        solids[pat.a2_solids] = -1
    out = [
        Claim("low_weight_in_plane", f"|Y| <= y_{tag}", {"q": q, "case": case},
              int(planes.max()), y, "pass" if planes.max() <= y else "fail"),
        Claim("low_weight_in_solid", f"|X| <= x_{tag}", {"q": q, "case": case},
              int(solids.max()), x, "pass" if solids.max() <= x else "fail"),
    ]
    return out
