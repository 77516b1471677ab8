from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from teachkit.concepts import (
    Concept,
    ConceptClass,
    Sample,
    WARMUTH_ROWS,
    all_samples,
    deg_avg,
    degree,
    disjoint_union,
    dominance,
    format_class,
    free_combination,
    intro_cycle_class,
    is_consistent,
    k_power,
    load_class,
    neighbors,
    parse_class,
    powerset,
    project,
    remove_empty,
    singletons_plus_empty,
    vc_dimension,
    warmuth_class,
)
from teachkit.errors import ClassFormatError, ContradictorySample, DimensionMismatch, InvalidClass

from oracles import brute_vcd, classes


def canon(cc):
    """Rows as a set, for comparisons up to concept order."""
    return set(cc.rows())


class TestConsistency:
    def test_member_and_nonmember_labels(self):
        assert is_consistent(Concept.from_row("1100"), Sample.parse("(0,1),(3,0)"))

    def test_wrong_label(self):
        assert not is_consistent(Concept.from_row("1100"), Sample.parse("(1,0)"))

    def test_empty_sample(self):
        assert is_consistent(Concept.from_row("0101"), Sample())

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            is_consistent(Concept.from_row("11"), Sample.parse("(3,1)"))

    def test_contradictory_sample_rejected(self):
        with pytest.raises(ContradictorySample):
            Sample.from_pairs([(0, 1), (0, 0)])

    @given(st.integers(0, 63), st.integers(0, 63), st.integers(0, 63))
    def test_consistency_monotone_in_sample(self, c, inst, extra):
        small = Sample.labelled_by(c ^ extra, inst)
        big = small | Sample.labelled_by(c ^ extra, extra & ~inst)
        if big.consistent_with(c):
            assert small.consistent_with(c)

    def test_sample_text_round_trip(self):
        s = Sample.parse("(0,1),(3,0)")
        assert Sample.parse(str(s)) == s
        assert len(s) == 2 and not s.is_positive


class TestMeasures:
    def test_powerset2_neighbors_of_a(self):
        cc = powerset(2)
        a = cc.index_of_row("10")
        assert {cc.row(j) for j in neighbors(cc, a)} == {"00", "11"}

    def test_intro_has_no_neighbors(self):
        cc = intro_cycle_class()
        assert all(neighbors(cc, i) == [] for i in range(len(cc)))

    @pytest.mark.parametrize("m", [1, 2, 3, 4])
    def test_powerset_degree_is_m(self, m):
        cc = powerset(m)
        assert all(degree(cc, i) == m for i in range(len(cc)))

    def test_deg_avg_examples(self):
        assert deg_avg(powerset(3)) == 3
        assert deg_avg(intro_cycle_class()) == 0
        assert deg_avg(ConceptClass(2, (0,))) == 0
        assert isinstance(deg_avg(warmuth_class()), Fraction)

    def test_dominance_powerset3(self):
        cc = powerset(3)
        assert dominance(cc, cc.index_of_row("111")) == 3
        assert dominance(cc, cc.index_of_row("000")) == 0

    def test_dominance_warmuth_c1_prime(self):
        cc = warmuth_class()
        i = cc.index_of_row(WARMUTH_ROWS["C'1"])
        # 10101 minus one member: 00101, 10001, 10100; only C1 = 10001 is in the class
        assert dominance(cc, i) == 1

    def test_out_of_range_index(self):
        with pytest.raises(IndexError):
            neighbors(powerset(2), 7)

    def test_vcd_examples(self):
        assert vc_dimension(warmuth_class()) == 2
        # {0,1} is shattered: 1100, 0110, 0011, 1001 project to 11, 01, 00, 10
        assert vc_dimension(intro_cycle_class()) == 2
        for m in range(1, 7):
            assert vc_dimension(powerset(m)) == m

    @given(classes(max_m=5, max_size=12))
    def test_vcd_matches_brute_force(self, cc):
        assert vc_dimension(cc) == brute_vcd(cc)

    @given(classes(max_m=4, max_size=10), st.data())
    def test_vcd_monotone_under_inclusion(self, cc, data):
        keep = data.draw(st.sets(st.sampled_from(cc.concepts), min_size=1))
        sub = ConceptClass(cc.m, tuple(keep))
        assert vc_dimension(sub) <= vc_dimension(cc)


class TestConstructors:
    def test_powerset_factorises(self):
        assert canon(free_combination(powerset(2), powerset(2))) == canon(powerset(4))
        assert canon(k_power(powerset(2), 2)) == canon(powerset(4))

    def test_k_power_one_is_identity(self):
        cc = warmuth_class()
        assert canon(k_power(cc, 1)) == canon(cc)
        with pytest.raises(ValueError):
            k_power(cc, 0)

    def test_intro_squared(self):
        cc = free_combination(intro_cycle_class(), intro_cycle_class())
        assert len(cc) == 16 and cc.m == 8

    @given(classes(max_m=3, max_size=6), classes(max_m=3, max_size=6))
    def test_free_combination_laws(self, c1, c2):
        cc = free_combination(c1, c2)
        assert cc.m == c1.m + c2.m
        assert len(cc) == len(c1) * len(c2)
        assert deg_avg(cc) == deg_avg(c1) + deg_avg(c2)
        assert project(cc, 0, c1.m) == set(c1.concepts)
        assert project(cc, c1.m, c2.m) == set(c2.concepts)

    def test_named_classes(self):
        assert canon(powerset(2)) == {"00", "10", "01", "11"}
        assert canon(warmuth_class()) == set(WARMUTH_ROWS.values())
        assert len(singletons_plus_empty(3)) == 4
        assert canon(intro_cycle_class()) == {"1100", "0110", "0011", "1001"}

    def test_generator_ranges(self):
        with pytest.raises(ValueError):
            powerset(0)
        with pytest.raises(ValueError):
            powerset(21)
        with pytest.raises(ValueError):
            singletons_plus_empty(0)

    def test_remove_empty(self):
        cc = ConceptClass.from_rows(["00", "10", "01"])
        assert canon(remove_empty(cc)) == {"10", "01"}
        assert remove_empty(intro_cycle_class()) == intro_cycle_class()

    def test_disjoint_union(self):
        cc = disjoint_union(intro_cycle_class(), intro_cycle_class())
        assert len(cc) == 8 and cc.m == 8

    def test_class_invariants(self):
        with pytest.raises(InvalidClass):
            ConceptClass(2, (1, 1))
        with pytest.raises(InvalidClass):
            ConceptClass(2, ())
        with pytest.raises(DimensionMismatch):
            ConceptClass(2, (4,))
        with pytest.raises(InvalidClass):
            ConceptClass(2, (1,), labels=("a", "a"))

    def test_concepts_sorted_canonically(self):
        a = ConceptClass.from_rows(["011", "100", "000"])
        b = ConceptClass.from_rows(["000", "011", "100"])
        assert a == b and a.rows() == sorted(a.rows())


class TestTextFormat:
    def test_round_trip(self):
        for cc in (powerset(3), warmuth_class(), intro_cycle_class()):
            assert parse_class(format_class(cc)) == cc

    @given(classes(max_m=5, max_size=12))
    def test_round_trip_random(self, cc):
        assert parse_class(format_class(cc)) == cc

    def test_comments_and_labels(self):
        cc = parse_class("# demo\ndomain 2\n# labels a b\n10\n\n01\n")
        assert cc.labels == ("a", "b") and len(cc) == 2

    @pytest.mark.parametrize("text,line,col", [
        ("domain 3\n102\n", 2, 3),
        ("domain 3\n10\n", 2, 1),
        ("dom 3\n", 1, 1),
        ("domain 2\n10\n10\n", 3, 1),
        ("domain x\n", 1, 8),
    ])
    def test_errors_carry_position(self, text, line, col):
        with pytest.raises(ClassFormatError) as info:
            parse_class(text)
        assert (info.value.line, info.value.column) == (line, col)

    def test_load_named_and_missing(self, tmp_path):
        assert load_class("powerset:2") == powerset(2)
        path = tmp_path / "c.txt"
        path.write_text(format_class(warmuth_class()))
        assert load_class(str(path)) == warmuth_class()
        with pytest.raises(FileNotFoundError):
            load_class(str(tmp_path / "nope.txt"))

    def test_all_samples_counts(self):
        assert len(list(all_samples(4, 2))) == 4 * 6
        assert len(list(all_samples(4, 2, positive_only=True))) == 6
        first = next(iter(all_samples(3, 2)))
        assert str(first) == "(0,0),(1,0)"
