import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pgkneser.field import gf
from pgkneser.geometry import (
    GeometryError,
    ProjectiveSpace,
    Subspace,
    canonicalize,
    decode,
    dual,
    empty_space,
    full_space,
    gaussian_binomial,
    rref,
)

# [n k]_q reference values
GAUSS = {(5, 2, 2): 155, (5, 2, 3): 1210, (5, 1, 3): 121, (5, 2, 4): 5797, (5, 2, 5): 20306, (3, 1, 2): 7, (4, 2, 2): 35}


@pytest.mark.parametrize("nkq,val", GAUSS.items())
def test_gaussian_binomial(nkq, val):
    assert gaussian_binomial(*nkq) == val


def test_gaussian_binomial_edges():
    assert gaussian_binomial(5, 0, 3) == 1
    assert gaussian_binomial(5, 5, 3) == 1
    assert gaussian_binomial(3, 4, 2) == 0


@pytest.mark.parametrize("n,q", [(4, 2), (5, 3), (6, 2)])
def test_gaussian_symmetry_and_pascal(n, q):
    for k in range(1, n):
        assert gaussian_binomial(n, k, q) == gaussian_binomial(n, n - k, q)
        assert gaussian_binomial(n, k, q) == gaussian_binomial(n - 1, k - 1, q) + q**k * gaussian_binomial(n - 1, k, q)


@pytest.mark.parametrize("d,q", [(2, 2), (2, 3), (3, 2), (4, 2), (4, 3), (2, 4), (3, 4)])
def test_enumeration_counts(d, q):
    S = ProjectiveSpace(d, q)
    for k in range(d):
        B = S.bases(k)
        assert len(B) == gaussian_binomial(d + 1, k + 1, q)
        assert len({tuple(b.ravel()) for b in B}) == len(B)


def test_pg4_3_has_1210_lines():
    assert ProjectiveSpace(4, 3).count(1) == 1210


def test_rref_canonical():
    F = gf(3)
    assert rref([[2, 1, 0], [1, 2, 0]], F) == [[1, 2, 0]]
    assert rref([[0, 0, 0]], F) == []


def _subspace(d, q):
    F = gf(q)
    return st.lists(st.lists(st.integers(0, q - 1), min_size=d + 1, max_size=d + 1), min_size=0, max_size=d + 1).map(
        lambda rows: canonicalize(rows, d, q)
    )


@st.composite
def pairs(draw):
    d, q = draw(st.sampled_from([(2, 3), (3, 2), (4, 2), (4, 3), (3, 4)]))
    return draw(_subspace(d, q)), draw(_subspace(d, q)), draw(_subspace(d, q))


def vdim(S):
    return S.proj_dim + 1


@settings(max_examples=150, deadline=None)
@given(pairs())
def test_dimension_formula(abc):
    A, B, _ = abc
    assert vdim(A.span(B)) + vdim(A.meet(B)) == vdim(A) + vdim(B)


@settings(max_examples=150, deadline=None)
@given(pairs())
def test_lattice_laws(abc):
    A, B, C = abc
    assert A.span(A) == A and A.meet(A) == A
    assert A.span(B) == B.span(A) and A.meet(B) == B.meet(A)
    assert A.span(B).span(C) == A.span(B.span(C))
    assert A.meet(B).meet(C) == A.meet(B.meet(C))
    assert A.span(A.meet(B)) == A and A.meet(A.span(B)) == A
    assert A.span(B).contains(A) and A.contains(A.meet(B))
    # modular law: if A <= C then A v (B ^ C) = (A v B) ^ C
    if C.contains(A):
        assert A.span(B.meet(C)) == A.span(B).meet(C)


@settings(max_examples=150, deadline=None)
@given(pairs())
def test_perp_is_an_antiautomorphism(abc):
    A, B, _ = abc
    assert A.perp().perp() == A
    assert vdim(A.perp()) == A.d + 1 - vdim(A)
    assert A.span(B).perp() == A.perp().meet(B.perp())
    assert dual(A) == A.perp()


@settings(max_examples=150, deadline=None)
@given(pairs())
def test_encoding_round_trip(abc):
    for S in abc:
        assert decode(S.encode(), S.d, S.q) == S


def test_encoding_forms():
    assert empty_space(4, 2).encode() == "-"
    assert full_space(2, 2).encode() == "100;010;001"
    assert decode("1,0,0,0,0;0,1,0,0,0", 4, 2) == decode("10000;01000", 4, 2)
    with pytest.raises(GeometryError):
        decode("1x000", 4, 2)
    with pytest.raises(GeometryError):
        decode("1000", 4, 2)


def test_subspace_order_matches_encoding():
    S = ProjectiveSpace(3, 3)
    for k in range(3):
        enc = [s.encode() for s in S.subspaces(k)]
        assert enc == sorted(enc)


def test_index_of(pg4_2):
    for k in range(4):
        for i, s in enumerate(pg4_2.subspaces(k)):
            assert pg4_2.index_of(s) == i


@pytest.mark.parametrize("j,k", [(0, 1), (0, 3), (1, 2), (1, 1), (2, 2), (2, 3)])
def test_meet_dims_against_objects(pg4_2, j, k):
    md = pg4_2.meet_dims(j, k)
    A, B = pg4_2.subspaces(j), pg4_2.subspaces(k)
    rng = np.random.default_rng(5)
    for a, b in zip(rng.integers(0, len(A), 60), rng.integers(0, len(B), 60)):
        assert md[a, b] == A[a].meet(B[b]).proj_dim


def test_points_of_line(pg4_2):
    line = pg4_2.subspaces(1)[7]
    pts = line.points()
    assert len(pts) == 3 and all(line.contains(p) for p in pts)
    assert pg4_2.incidence(0, 1)[:, 7].sum() == 3


def test_projective_space_limits():
    with pytest.raises((GeometryError, ValueError)):
        ProjectiveSpace(7, 2)
    with pytest.raises(ValueError):
        ProjectiveSpace(2, 6)
