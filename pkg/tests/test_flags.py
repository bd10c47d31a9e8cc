import itertools

import numpy as np
import pytest

from pgkneser.flags import (
    Chamber,
    Coflag,
    chamber_coflag,
    chamber_count,
    chamber_from_ids,
    chamber_ids,
    chamber_table,
    chamber_to_coflag,
    chambers_on_coflag,
    coflag_count,
    coflag_from_ids,
    coflag_table,
    decode_chamber,
    decode_coflag,
    dual_chamber,
    dual_coflag,
    enumerate_chambers,
    enumerate_coflags,
    is_f_opposite,
    is_f_opposite_lineplane,
    is_opposite,
    is_opposite_pairwise,
)
from pgkneser.geometry import GeometryError, ProjectiveSpace

COUNTS = {(2, 2): 21, (2, 3): 52, (3, 2): 315, (4, 2): 9765, (4, 3): 251_680}


@pytest.mark.parametrize("dq,n", COUNTS.items())
def test_chamber_counts(dq, n):
    assert chamber_count(*dq) == n
    if dq != (4, 3):
        assert len(chamber_table(ProjectiveSpace(*dq))) == n


def test_chamber_count_q3_enumerated(pg4_3):
    assert len(chamber_table(pg4_3)) == 251_680


@pytest.mark.parametrize("dq,n", {(3, 2): 35, (4, 2): 1085, (4, 3): 15_730}.items())
def test_coflag_counts(dq, n):
    assert coflag_count(*dq) == n
    assert len(coflag_table(ProjectiveSpace(*dq))) == n


def test_table_order_is_encoding_order(pg4_2):
    enc = [c.encode() for c in enumerate_chambers(pg4_2)]
    assert enc == sorted(enc) and len(set(enc)) == len(enc)
    enc = [f.encode() for f in enumerate_coflags(pg4_2)]
    assert enc == sorted(enc)


def test_chamber_round_trip(pg4_2):
    for i in (0, 17, 4000, 9764):
        C = chamber_from_ids(pg4_2, chamber_table(pg4_2)[i])
        assert decode_chamber(C.encode(), 4, 2) == C
        assert tuple(chamber_table(pg4_2)[i]) == chamber_ids(pg4_2, C)
    f = coflag_from_ids(pg4_2, coflag_table(pg4_2)[3])
    assert decode_coflag(f.encode(), 4, 2) == f


def test_nesting_is_validated():
    with pytest.raises(GeometryError):
        decode_chamber("10000|00100;00010|10000;01000;00100|10000;01000;00100;00010", 4, 2)


def test_chamber_to_coflag(pg4_2):
    ch, cof, m = chamber_table(pg4_2), coflag_table(pg4_2), chamber_to_coflag(pg4_2)
    assert np.array_equal(cof[m], ch[:, 1:3])
    assert np.all(np.bincount(m) == 9)


def test_chambers_on_coflag(pg4_2):
    f = enumerate_coflags(pg4_2)[100]
    cs = chambers_on_coflag(pg4_2, f)
    assert len(cs) == 9 and all(chamber_coflag(c) == f for c in cs)


def _sample(objs, k, seed):
    rng = np.random.default_rng(seed)
    return [objs[i] for i in rng.choice(len(objs), k, replace=False)]


@pytest.mark.parametrize("d,q", [(2, 2), (2, 3), (3, 2), (4, 2)])
def test_opposition_rules_agree(d, q):
    cs = _sample(enumerate_chambers(ProjectiveSpace(d, q)), 20, d * q)
    for a, b in itertools.product(cs, repeat=2):
        o = is_opposite(a, b)
        assert o == is_opposite(b, a) == is_opposite_pairwise(a, b)
        assert o == is_opposite(dual_chamber(a), dual_chamber(b))


def test_f_opposition_rules_agree(pg4_2):
    fs = _sample(enumerate_coflags(pg4_2), 40, 1)
    for f, g in itertools.product(fs, repeat=2):
        o = is_f_opposite(f, g)
        assert o == is_f_opposite_lineplane(f, g) == is_f_opposite(g, f)
        assert o == is_f_opposite(dual_coflag(f), dual_coflag(g))


def test_no_self_opposition(pg4_2):
    for c in _sample(enumerate_chambers(pg4_2), 30, 2):
        assert not is_opposite(c, c)


def test_duality_is_involution(pg4_2):
    for c in _sample(enumerate_chambers(pg4_2), 30, 3):
        assert dual_chamber(dual_chamber(c)) == c
        f = chamber_coflag(c)
        assert dual_coflag(dual_coflag(f)) == f
        assert chamber_coflag(dual_chamber(c)) == dual_coflag(f)


def test_opposite_chambers_have_f_opposite_coflags(pg4_2):
    # opposite chambers project to f-opposite coflags; the converse fails
    cs = _sample(enumerate_chambers(pg4_2), 60, 4)
    seen_converse_failure = False
    for a, b in itertools.product(cs, repeat=2):
        fo = is_f_opposite(chamber_coflag(a), chamber_coflag(b))
        if is_opposite(a, b):
            assert fo
        elif fo:
            seen_converse_failure = True
    assert seen_converse_failure


def test_each_chamber_over_f_opposite_pair_has_opposite_partner(pg4_2):
    # for f-opposite coflags, every chamber on one has an opposite chamber on the other
    fs = _sample(enumerate_coflags(pg4_2), 30, 6)
    checked = 0
    for f, g in itertools.product(fs, repeat=2):
        if not is_f_opposite(f, g):
            continue
        cg = chambers_on_coflag(pg4_2, g)
        for c in chambers_on_coflag(pg4_2, f):
            assert any(is_opposite(c, e) for e in cg)
        checked += 1
    assert checked > 0
