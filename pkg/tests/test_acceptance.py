"""One test per acceptance criterion; each prints a PASS/FAIL line with its timing.

Runtime limits are asserted alongside correctness.  Set
PGKNESER_CONSISTENCY_BUDGET (seconds, default 600) to shorten the q=2
search in criterion 8 during development.
"""
import os
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from pgkneser.analysis import (
    Context,
    check_full_weight_biconditional,
    check_pair_weights,
    check_weight_one,
    count_lines_meeting_two_planes,
    random_admissible_pairs,
    random_admissible_triples,
    sweep_nonfopp_through_point,
    sweep_nonfopp_two_flags,
    weight_spectrum,
)
from pgkneser.constructions import KINDS, FamilyParams, blowup, lineplane_family
from pgkneser.flags import chamber_table
from pgkneser.geometry import ProjectiveSpace
from pgkneser.kneser import (
    VertexSet,
    build_graph,
    classify_gamma2_maximal,
    exact_max_independent,
    greedy_complete,
    is_independent,
    is_maximal_independent,
    maximal_independent_sets,
    perturbation_search,
)
from pgkneser.polynomials import bound_polynomials, identity_checks, threshold_q

B = bound_polynomials()


@contextmanager
def criterion(number: int, title: str, limit: float):
    t0 = time.perf_counter()
    info = {}
    try:
        yield info
    except BaseException as exc:
        dt = time.perf_counter() - t0
        ACCEPTANCE_LINES.append(f"FAIL criterion {number}: {title} ({dt:.1f}s) -- {type(exc).__name__}: {exc}")
        raise
    dt = time.perf_counter() - t0
    ok = dt < limit
    detail = "; ".join(f"{k}={v}" for k, v in info.items())
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({dt:.1f}s < {limit:g}s) {detail}")
    print(ACCEPTANCE_LINES[-1])
    assert ok, f"runtime {dt:.1f}s exceeds {limit}s"


@pytest.mark.parametrize("q,limit", [(2, 10), (3, 120)])
def test_criterion_1_construction_sizes(q, limit):
    with criterion(1, f"construction sizes q={q}", limit) as info:
        S = ProjectiveSpace(q=q, d=4)
        for kind in KINDS:
            N = lineplane_family(S, FamilyParams(kind))
            M = blowup(S, N)
            assert len(N) == B["family_size"](q) == {2: 133, 3: 637}[q]
            assert len(M) == B["alpha"](q) == {2: 1197, 3: 10192}[q]
            info[kind] = f"{len(N)}/{len(M)}"


def _independent_pairwise_check(S, M_idx):
    """Opposition straight from subspace meet tables, bypassing the bitset kernels."""
    ch = chamber_table(S)
    d = S.d
    members = ch[M_idx]
    opp_to_members = np.zeros((len(M_idx), len(ch)), dtype=bool)
    opp_to_members[:] = True
    for i in range(d):
        m = S.meets(i, d - 1 - i)
        opp_to_members &= ~m[members[:, i]][:, ch[:, d - 1 - i]]
    independent = not opp_to_members[:, M_idx].any()
    covered = opp_to_members.any(axis=0)
    covered[M_idx] = True
    return independent, bool(covered.all()), len(M_idx) * (len(M_idx) - 1) // 2, len(M_idx) * len(ch)


def test_criterion_2_q2():
    with criterion(2, "independence + maximality q=2 (kernel and numpy cross-check)", 10) as info:
        S = ProjectiveSpace(4, 2)
        G = build_graph(S, "chambers")
        for kind in KINDS:
            M = VertexSet.from_indices(G, blowup(S, lineplane_family(S, FamilyParams(kind))))
            assert is_independent(M)[0]
            assert is_maximal_independent(M)[0]
            ind, mx, npairs, ntests = _independent_pairwise_check(S, M.indices())
            assert ind and mx
        info["pairs"] = npairs
        info["opposition_tests"] = ntests


def test_criterion_2_q3():
    with criterion(2, "independence + maximality q=3 (implicit adjacency)", 300) as info:
        S = ProjectiveSpace(4, 3)
        G = build_graph(S, "chambers", explicit=False)
        assert not G.explicit
        M = VertexSet.from_indices(G, blowup(S, lineplane_family(S, FamilyParams("a"))))
        assert len(M) == 10192
        assert is_independent(M)[0]
        assert is_maximal_independent(M)[0]
        info["size"] = len(M)


def test_criterion_3_gamma2():
    with criterion(3, "Gamma_2 exact optimum and classification", 60) as info:
        for q in (2, 3):
            G = build_graph(ProjectiveSpace(2, q), "chambers")
            r = exact_max_independent(G)
            assert r.status == "optimal" and r.size == 2 * q + 1
            info[f"alpha_q{q}"] = r.size
        G = build_graph(ProjectiveSpace(2, 2), "chambers")
        sets = maximal_independent_sets(G)
        kinds = [classify_gamma2_maximal(VertexSet.from_indices(G, s)).kind for s in sets]
        info["maximal_sets"] = len(sets)
        info["shapes"] = {k: kinds.count(k) for k in sorted(set(kinds))}


def test_criterion_4_weight_laws():
    with criterion(4, "weight laws over 100 seeded greedy sets in Gamma_4(2)", 600) as info:
        S = ProjectiveSpace(4, 2)
        ctx = Context(S)
        violations = 0
        weight_one = 0
        spectrum = set()
        for seed in range(100):
            M = greedy_complete(VertexSet.empty(ctx.chambers), seed)
            rep = weight_spectrum(ctx, M)
            spectrum |= set(rep.spectrum)
            violations += len(rep.violations)
            violations += len(check_pair_weights(ctx, M))
            violations += len(check_full_weight_biconditional(ctx, M))
            n1, v1 = check_weight_one(ctx, M)
            weight_one += n1
            violations += len(v1)
        assert spectrum <= {1, 2, 3, 5, 9}
        assert violations == 0
        info["spectrum"] = sorted(spectrum)
        info["weight_one_coflags"] = weight_one
        info["violations"] = violations


def test_criterion_5_counting_oracles():
    with criterion(5, "counting oracles (exhaustive q=2, sampled q=3)", 600) as info:
        S = ProjectiveSpace(4, 2)
        md = S.meet_dims(2, 2)
        want = {1: B["lines_meeting_planes_line"](2), 0: B["lines_meeting_planes_point"](2)}
        assert want == {1: 59, 0: 51}
        for i in range(S.count(2)):
            for j in range(i + 1, S.count(2)):
                assert count_lines_meeting_two_planes(S, i, j) == want[int(md[i, j])]
        ctx = Context(S)
        r2 = sweep_nonfopp_two_flags(ctx)
        rp = sweep_nonfopp_through_point(ctx)
        assert r2.ok and rp.ok and rp.bound == 385
        info["q2_pairs"] = f"{r2.inputs} max {r2.max_count}<= {r2.bound}"
        info["q2_triples"] = f"{rp.inputs} max {rp.max_count}<= {rp.bound}"
        ctx3 = Context(ProjectiveSpace(4, 3))
        rng = np.random.Generator(np.random.PCG64(3))
        s2 = sweep_nonfopp_two_flags(ctx3, random_admissible_pairs(ctx3, 1000, rng))
        sp = sweep_nonfopp_through_point(ctx3, random_admissible_triples(ctx3, 1000, rng))
        assert s2.ok and sp.ok
        assert (s2.bound, sp.bound) == (B["z_B"](3), B["z_A"](3))
        info["q3_pairs"] = f"{s2.inputs} max {s2.max_count}<= {s2.bound}"
        info["q3_triples"] = f"{sp.inputs} max {sp.max_count}<= {sp.bound}"


def test_criterion_6_identity_audit():
    with criterion(6, "polynomial identity audit", 1) as info:
        checks = {c.claim_id: c for c in identity_checks()}
        assert checks["beta_sum"].status == "pass"
        assert checks["W_A"].status == "pass" and checks["W_B"].status == "pass"
        assert checks["gamma_sum"].status == "pass"
        finding = checks["gamma_vs_stated_case_B"]
        assert finding.status == "finding" and finding.stated.leading == 824
        assert finding.computed == B["gamma"]
        assert all(c.status == "pass" for k, c in checks.items() if k != "gamma_vs_stated_case_B")
        info["identities"] = len(checks)
        info["finding"] = "gamma_vs_stated_case_B"


def test_criterion_7_threshold():
    with criterion(7, "threshold", 1) as info:
        t = threshold_q()
        assert t.smallest_q <= 749
        info["smallest_q"] = t.smallest_q
        info["smallest_prime_power"] = t.smallest_prime_power


def test_criterion_8_consistency():
    budget = float(os.environ.get("PGKNESER_CONSISTENCY_BUDGET", 600))
    with criterion(8, "no independent set above alpha(2) found by search", budget + 60) as info:
        S = ProjectiveSpace(4, 2)
        G = build_graph(S, "chambers")
        alpha = B["alpha"](2)
        seed_set = VertexSet.from_indices(G, blowup(S, lineplane_family(S, FamilyParams("a"))))
        near, r1 = perturbation_search(G, seed_set, budget=budget / 2, seed=11, drop=0.1)
        far, r2 = perturbation_search(G, None, budget=budget / 2, seed=12, drop=0.3)
        best = max(len(near), len(far))
        assert is_maximal_independent(near)[0] and is_maximal_independent(far)[0]
        assert best <= alpha
        info["status"] = "finding: consistent"
        info["best"] = best
        info["alpha"] = alpha
        info["rounds"] = r1 + r2
        info["budget_s"] = budget
