import pytest
from hypothesis import given, strategies as st

from teachkit.classic import has_teaching_set_within
from teachkit.concepts import ConceptClass, intro_cycle_class, powerset, warmuth_class
from teachkit.matching import BipartiteGraph, Matching
from teachkit.pbtd import (
    build_gk,
    format_preference_witness,
    gk_samples,
    has_alternating_cycle,
    pbtd,
    pbtd_le_k,
    rtd_peel,
    uniquely_restricted_saturating_matching,
)

from oracles import classes


def test_gk_powerset2_k1():
    g, samples = build_gk(powerset(2), 1)
    assert len(samples) == 4
    assert all(len(a) == 2 for a in g.white_adj)


def test_gk_intro_positive_k1():
    cc = intro_cycle_class()
    g, samples = build_gk(cc, 1, positive_only=True)
    for i, c in enumerate(cc.concepts):
        nonempty = [samples[w].pos for w in g.black_adj[i] if len(samples[w])]
        assert sorted(nonempty) == sorted(1 << x for x in range(4) if c >> x & 1)


def test_gk_warmuth_k2_degrees():
    cc = warmuth_class()
    g, samples = build_gk(cc, 2)
    assert len(samples) == 4 * 10
    # every concept agrees with exactly one labelling of each pair of instances
    assert all(len(a) == 10 for a in g.black_adj)


def test_gk_range_checked():
    with pytest.raises(ValueError):
        build_gk(powerset(2), 0)
    with pytest.raises(ValueError):
        build_gk(powerset(2), 3)


def test_positive_samples_include_empty():
    assert [str(s) for s in gk_samples(2, 1, positive_only=True)] == ["", "(0,1)", "(1,1)"]


def test_ursm_path():
    g = BipartiteGraph(1, 1, frozenset({(0, 0)}))
    m, order = uniquely_restricted_saturating_matching(g)
    assert m.pairs == {(0, 0)} and order == [0]


def test_ursm_k22():
    g = BipartiteGraph(2, 2, frozenset({(0, 0), (0, 1), (1, 0), (1, 1)}))
    assert uniquely_restricted_saturating_matching(g) is None


def test_ursm_gk1_powerset2():
    g, _ = build_gk(powerset(2), 1)
    assert uniquely_restricted_saturating_matching(g) is None
    assert not rtd_peel(powerset(2), 1)


def test_ursm_rejects_larger_black_side():
    with pytest.raises(ValueError):
        uniquely_restricted_saturating_matching(BipartiteGraph(2, 1, frozenset()))


def test_warmuth_decisions():
    cc = warmuth_class()
    w = pbtd_le_k(cc, 3)
    assert w is not None and w.verify(cc) and w.order <= 3
    assert pbtd_le_k(cc, 2) is None
    assert rtd_peel(cc, 3) and not rtd_peel(cc, 2)
    assert pbtd(cc) == 3


def test_intro_positive():
    cc = intro_cycle_class()
    assert pbtd_le_k(cc, 2, positive_only=True) is not None
    assert pbtd_le_k(cc, 1, positive_only=True) is None
    assert pbtd(cc, positive_only=True) == 2


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_powerset(m):
    assert pbtd(powerset(m)) == m


def test_single_concept():
    assert pbtd(ConceptClass(2, (3,))) == 0


def test_witness_format():
    cc = warmuth_class()
    text = format_preference_witness(pbtd_le_k(cc, 3), cc)
    assert len(text.splitlines()) == 10


@given(classes(max_m=4, max_size=10), st.booleans())
def test_matching_agrees_with_peeling(cc, positive):
    for k in range(1, cc.m + 1):
        w = pbtd_le_k(cc, k, positive)
        assert (w is not None) == rtd_peel(cc, k, positive)
        if w is not None:
            assert w.verify(cc)


@given(classes(max_m=4, max_size=10), st.booleans())
def test_peeling_matching_has_no_alternating_cycle(cc, positive):
    for k in range(1, cc.m + 1):
        g, _ = build_gk(cc, k, positive)
        if g.black_count > g.white_count or len(g.edges) > 200:
            continue
        found = uniquely_restricted_saturating_matching(g)
        if found is not None:
            assert not has_alternating_cycle(g, found[0])


@given(classes(max_m=4, max_size=10), st.booleans())
def test_some_concept_is_easy_to_teach(cc, positive):
    d = pbtd(cc, positive)
    assert any(has_teaching_set_within(cc, i, max(d, 0), positive) for i in range(len(cc)))


def test_alternating_cycle_detected():
    g = BipartiteGraph(2, 2, frozenset({(0, 0), (0, 1), (1, 0), (1, 1)}))
    assert has_alternating_cycle(g, Matching(frozenset({(0, 0), (1, 1)})))
