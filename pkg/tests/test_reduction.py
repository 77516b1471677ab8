import random

import pytest
from hypothesis import given, strategies as st

from teachkit.concepts import ConceptClass, intro_cycle_class, powerset, warmuth_class
from teachkit.errors import ClassFormatError, ForbiddenEdge, InvalidClass
from teachkit.matching import Matching, iter_nc_matchings, nc_matching, verify_nc_matching
from teachkit.nctd import nctd
from teachkit.reduction import (
    CnfFormula,
    FORBIDDEN_KINDS,
    brute_force_sat,
    decode_assignment,
    expected_vertex_count,
    format_dimacs,
    ladder_isolation_graph,
    ladder_matchings,
    ladder_properties,
    nctd1_instance,
    nctd_k_instance,
    nctdplus_k_instance,
    parse_dimacs,
    random_formula,
    sat_to_ncmatching,
    verify_reduction,
)

UNSAT = CnfFormula(1, ((1, 1, 1), (-1, -1, -1)))


@st.composite
def formulas(draw, max_n=3, max_m=3, distinct=False):
    n = draw(st.integers(3 if distinct else 1, max_n))
    m = draw(st.integers(1, max_m))
    clauses = []
    for _ in range(m):
        if distinct:
            vs = draw(st.permutations(range(1, n + 1)))[:3]
        else:
            vs = [draw(st.integers(1, n)) for _ in range(3)]
        clauses.append(tuple(v * draw(st.sampled_from((1, -1))) for v in vs))
    return CnfFormula(n, tuple(clauses))


class TestDimacs:
    def test_parse(self):
        f = parse_dimacs("c demo\np cnf 3 2\n1 -2 3 0\n-1 2 2 0\n")
        assert f.num_vars == 3 and f.clauses == ((1, -2, 3), (-1, 2, 2))

    def test_multiline_clause(self):
        f = parse_dimacs("p cnf 2 1\n1 -2\n2 0\n")
        assert f.clauses == ((1, -2, 2),)

    @given(formulas())
    def test_round_trip(self, f):
        assert parse_dimacs(format_dimacs(f)) == f

    @pytest.mark.parametrize("text,line", [
        ("p cnf 2 1\n1 2 0\n", 2),
        ("p cnf 2 1\n1 2 -1 2 0\n", 2),
        ("1 2 3 0\n", 1),
        ("p cnf 2 1\n1 2 5 0\n", 2),
        ("p cnf 2 1\n1 x 2 0\n", 2),
        ("p dnf 2 1\n", 1),
    ])
    def test_errors(self, text, line):
        with pytest.raises(ClassFormatError) as info:
            parse_dimacs(text)
        assert info.value.line == line

    def test_formula_validation(self):
        with pytest.raises(ValueError):
            CnfFormula(1, ((1, 1),))
        with pytest.raises(ValueError):
            CnfFormula(1, ((1, 2, 1),))

    def test_brute_force(self):
        assert brute_force_sat(UNSAT) is None
        assert brute_force_sat(CnfFormula(2, ((1, -2, -2),))) == (False, False)


class TestGadgets:
    def test_tiny_formula_sizes(self):
        f = CnfFormula(1, ((1, 1, -1),))
        art = sat_to_ncmatching(f, "degree5")
        g = art.graph
        # ring of 8 (a 4-ring would be a 4-cycle), 10 clause vertices, 6 bridged edges
        assert g.black_count + g.white_count == 8 + 10 + 12 == expected_vertex_count(f, "degree5")
        assert g.black_count == g.white_count

    @given(formulas(), st.sampled_from(["degree5", "degree3"]))
    def test_vertex_count_closed_form(self, f, variant):
        g = sat_to_ncmatching(f, variant).graph
        assert g.black_count + g.white_count == expected_vertex_count(f, variant)
        assert g.black_count == g.white_count

    @given(formulas(max_n=5, distinct=True))
    def test_degree5_bound(self, f):
        art = sat_to_ncmatching(f, "degree5")
        g = art.graph
        assert g.max_degree() == 5
        top = {g.black_tag(u) for u in range(g.black_count) if len(g.black_adj[u]) == 5}
        top |= {g.white_tag(w) for w in range(g.white_count) if len(g.white_adj[w]) == 5}
        assert top and all(t.endswith(("p2", "q2")) for t in top)

    @given(formulas(max_n=5, distinct=True))
    def test_degree3_bound(self, f):
        assert sat_to_ncmatching(f, "degree3").graph.max_degree() == 3

    def test_tags_present(self):
        g = sat_to_ncmatching(CnfFormula(2, ((1, -2, 2),)), "degree3").graph
        assert all(g.black_tags) and all(g.white_tags)
        assert g.black_tag(0).startswith("var:1:")

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            sat_to_ncmatching(UNSAT, "degree4")


class TestGadgetBehaviour:
    @pytest.mark.parametrize("variant", ["degree5", "degree3"])
    def test_matchings_avoid_forbidden_edges(self, variant):
        f = CnfFormula(1, ((1, 1, -1),))
        art = sat_to_ncmatching(f, variant)
        forbidden = art.edges_of_kind(*FORBIDDEN_KINDS)
        portals = set(art.portals.values())
        count = 0
        for m in iter_nc_matchings(art.graph):
            count += 1
            assert not m.pairs & forbidden
            assert len(m.pairs & portals) == 1
            if variant == "degree5":
                assert art.edges_of_kind("bridge-mid") <= m.pairs
        assert count > 0

    def test_single_clause_gadget_uses_one_portal(self):
        art = sat_to_ncmatching(CnfFormula(3, ((1, 2, 3),)), "degree5")
        m = nc_matching(art.graph)
        assert len(m.pairs & set(art.portals.values())) == 1

    def test_ladder_properties(self):
        assert ladder_properties() == dict.fromkeys(ladder_properties(), True)

    def test_ladder_graph(self):
        g, named, kinds = ladder_isolation_graph()
        assert g.black_count + g.white_count == 18
        assert g.max_degree() == 3
        assert sum(1 for k in kinds.values() if k == "ladder-diagonal") == 2
        assert len(list(ladder_matchings())) > 0

    def test_decode_reads_ring_orientation(self):
        f = CnfFormula(1, ((1, 1, 1),))
        art = sat_to_ncmatching(f, "degree5")
        m = nc_matching(art.graph)
        assert decode_assignment(art, m) == (True,)
        assert art.decode_map[1] <= m.pairs
        f = CnfFormula(1, ((-1, -1, -1),))
        art = sat_to_ncmatching(f, "degree5")
        assert decode_assignment(art, nc_matching(art.graph)) == (False,)

    def test_decode_rejects_forbidden_edge(self):
        art = sat_to_ncmatching(CnfFormula(1, ((1, 1, 1),)), "degree5")
        bad = next(iter(art.edges_of_kind("connector")))
        with pytest.raises(ForbiddenEdge):
            decode_assignment(art, Matching(frozenset({bad})))

    @pytest.mark.parametrize("variant", ["degree5", "degree3"])
    def test_unsat_pair(self, variant):
        assert nc_matching(sat_to_ncmatching(UNSAT, variant).graph) is None
        assert verify_reduction(UNSAT, variant)

    @pytest.mark.parametrize("variant", ["degree5", "degree3"])
    def test_satisfiable_singleton(self, variant):
        f = CnfFormula(2, ((1, -2, 2),))
        art = sat_to_ncmatching(f, variant)
        m = nc_matching(art.graph)
        assert m is not None and verify_nc_matching(art.graph, m)
        assert f.evaluate(decode_assignment(art, m))

    @given(formulas(max_n=3, max_m=3), st.sampled_from(["degree5", "degree3"]))
    def test_random_equivalence(self, f, variant):
        assert verify_reduction(f, variant)

    def test_brute_force_limits(self):
        with pytest.raises(ValueError):
            verify_reduction(random_formula(4, 1, random.Random(1)))


class TestClassReductions:
    def test_nctd1_instance(self):
        two = nctd1_instance(intro_cycle_class())
        assert len(two) == 8 and nctd(two) == 1
        assert len(nctd1_instance(warmuth_class())) == 20
        with pytest.raises(InvalidClass):
            nctd1_instance(powerset(2))

    def test_nctd1_warmuth(self):
        assert nctd(nctd1_instance(warmuth_class())) > 1

    def test_nctdplus_k(self):
        cc = nctdplus_k_instance(intro_cycle_class(), 2)
        assert len(cc) == 2 * 4 and nctd(cc, positive_only=True) == 2
        # {a},{b},{a,b} has positive NCTD 2
        base = ConceptClass.from_rows(["10", "01", "11"])
        assert nctd(base, positive_only=True) == 2
        assert nctd(nctdplus_k_instance(base, 2), positive_only=True) == 3
        assert len(nctdplus_k_instance(base, 3)) == 4 * 3
        with pytest.raises(ValueError):
            nctdplus_k_instance(base, 1)

    def test_nctd_k_micro(self):
        base = ConceptClass.from_rows(["10", "01"])
        cc = nctd_k_instance(base, 2)
        assert cc.m == 10 and len(cc) == 4 * (4 * 2)
        assert nctd(cc) == 2

    def test_nctd_k_errors(self):
        with pytest.raises(InvalidClass):
            nctd_k_instance(powerset(1), 2)
        with pytest.raises(ValueError):
            nctd_k_instance(intro_cycle_class(), 1)

    @given(st.integers(2, 4))
    def test_nctd_k_cardinality(self, k):
        base = ConceptClass.from_rows(["10", "01"])
        assert len(nctd_k_instance(base, k)) == 2 ** (2 * (k - 1)) * 4 * len(base)
