"""Hardness reductions: 3-SAT to non-clashing matching, and the class builders.

Gadget graph layout
-------------------
Variable ``i`` gets a ring ``v_1 w_1 v_2 w_2 ... v_L w_L`` (``v`` black,
``w`` white, ``L = 2 * max(m, 2)``) with edges ``v_t w_t`` and ``w_t v_{t+1}``.
Its two perfect matchings are ``{v_t w_t}`` (variable false) and
``{v_{t+1} w_t}`` (variable true). A ring of four vertices is itself a
4-cycle, so single-clause formulas still get a ring of eight.

Literal ``k`` of clause ``j`` ties the portal edge ``p_k q_k`` of the clause
gadget to the ring edge ``v_{2j} w_{2j}`` (positive literal) or
``v_{2j} w_{2j-1}`` (negated literal): the two edges are made to clash, so a
clause can only open the portal of a literal that the ring makes true.

``degree5`` uses plain connector edges guarded by a bridging path each;
``degree3`` uses a clause gadget whose portal vertices have degree two and a
14-vertex ladder per literal.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .concepts import ConceptClass, disjoint_union, free_combination, powerset
from .errors import ClassFormatError, ForbiddenEdge, InvalidClass
from .matching import BipartiteGraph, Matching, clashes, nc_matching

VARIANTS = ("degree5", "degree3")
BRUTE_FORCE_MAX_VARS = 3
BRUTE_FORCE_MAX_CLAUSES = 3


# -- formulas ----------------------------------------------------------------

@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        clauses = tuple(tuple(int(x) for x in c) for c in self.clauses)
        for j, c in enumerate(clauses, start=1):
            if len(c) != 3:
                raise ValueError(f"clause {j} has {len(c)} literals, expected 3")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"clause {j}: literal {lit} outside [1, {self.num_vars}]")
        object.__setattr__(self, "clauses", clauses)

    def evaluate(self, assignment: Sequence[bool]) -> bool:
        """``assignment[i - 1]`` is the value of variable ``i``."""
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def __str__(self) -> str:
        return format_dimacs(self)


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses = []
    pending: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ClassFormatError("expected 'p cnf <vars> <clauses>'", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ClassFormatError("non-integer header field", lineno) from None
            continue
        if header is None:
            raise ClassFormatError("clause before 'p cnf' header", lineno)
        for col, tok in _tokens(raw):
            try:
                lit = int(tok)
            except ValueError:
                raise ClassFormatError(f"bad literal {tok!r}", lineno, col) from None
            if lit == 0:
                if len(pending) != 3:
                    raise ClassFormatError(
                        f"clause has {len(pending)} literals, expected exactly 3", lineno, col)
                clauses.append(tuple(pending))
                pending = []
            else:
                if abs(lit) > header[0]:
                    raise ClassFormatError(f"literal {lit} exceeds variable count", lineno, col)
                pending.append(lit)
    if header is None:
        raise ClassFormatError("missing 'p cnf' header", 1)
    if pending:
        raise ClassFormatError("last clause is not terminated by 0", len(text.splitlines()))
    if len(clauses) != header[1]:
        raise ClassFormatError(f"header declares {header[1]} clauses, found {len(clauses)}", 1)
    return CnfFormula(header[0], tuple(clauses))


def _tokens(line: str) -> Iterable[tuple[int, str]]:
    col = 0
    for tok in line.split():
        col = line.index(tok, col)
        yield col + 1, tok
        col += len(tok)


def format_dimacs(f: CnfFormula) -> str:
    lines = [f"p cnf {f.num_vars} {len(f.clauses)}"]
    lines.extend(" ".join(str(l) for l in c) + " 0" for c in f.clauses)
    return "\n".join(lines) + "\n"


def brute_force_sat(f: CnfFormula) -> tuple[bool, ...] | None:
    """First satisfying assignment in lexicographic order (False before True)."""
    for values in itertools.product((False, True), repeat=f.num_vars):
        if f.evaluate(values):
            return values
    return None


def random_formula(n: int, m: int, rng: random.Random) -> CnfFormula:
    clauses = tuple(
        tuple(rng.choice((1, -1)) * rng.randint(1, n) for _ in range(3))
        for _ in range(m)
    )
    return CnfFormula(n, clauses)


def all_formulas(n: int, m: int) -> Iterable[CnfFormula]:
    """Every ordered 3-CNF with exactly ``m`` clauses over variables ``1..n``."""
    lits = [l for v in range(1, n + 1) for l in (v, -v)]
    clauses = list(itertools.product(lits, repeat=3))
    for combo in itertools.product(clauses, repeat=m):
        yield CnfFormula(n, combo)


# -- gadget graph construction -----------------------------------------------

class _Builder:
    def __init__(self):
        self.black: list[str] = []
        self.white: list[str] = []
        self.edges: dict[tuple[int, int], str] = {}

    def b(self, tag: str) -> int:
        self.black.append(tag)
        return len(self.black) - 1

    def w(self, tag: str) -> int:
        self.white.append(tag)
        return len(self.white) - 1

    def edge(self, b: int, w: int, kind: str) -> tuple[int, int]:
        if (b, w) in self.edges:
            raise ValueError(f"parallel edge {self.black[b]} - {self.white[w]}")
        self.edges[(b, w)] = kind
        return (b, w)

    def graph(self) -> BipartiteGraph:
        return BipartiteGraph(len(self.black), len(self.white), frozenset(self.edges),
                              tuple(self.black), tuple(self.white))


# edge kinds that no non-clashing saturating matching may use
FORBIDDEN_KINDS = frozenset({"connector", "bridge-end", "ladder-dashed", "ladder-diagonal"})


@dataclass(frozen=True)
class ReductionArtifact:
    formula: CnfFormula
    variant: str
    graph: BipartiteGraph
    decode_map: dict[int, frozenset[tuple[int, int]]]
    false_map: dict[int, frozenset[tuple[int, int]]]
    portals: dict[tuple[int, int], tuple[int, int]]
    edge_kinds: dict[tuple[int, int], str] = field(repr=False)

    def edges_of_kind(self, *kinds: str) -> set[tuple[int, int]]:
        return {e for e, k in self.edge_kinds.items() if k in kinds}


def ring_length(num_clauses: int) -> int:
    return 4 * max(num_clauses, 2)


def expected_vertex_count(f: CnfFormula, variant: str) -> int:
    """Closed-form vertex count of the gadget graph."""
    m = len(f.clauses)
    rings = ring_length(m) * f.num_vars
    if variant == "degree5":
        # 10 clause vertices + 2 connector edges x 2 bridge vertices x 3 literals
        return rings + 22 * m
    # 14 clause vertices + 14 ladder vertices x 3 literals
    return rings + 56 * m


def _bridged(g: _Builder, u: int, w: int, tag: str) -> None:
    g.edge(u, w, "connector")
    b1 = g.w(f"{tag}:b1")
    b2 = g.b(f"{tag}:b2")
    g.edge(u, b1, "bridge-end")
    g.edge(b2, b1, "bridge-mid")
    g.edge(b2, w, "bridge-end")


def _clause5(g: _Builder, j: int) -> tuple[list[int], list[int]]:
    p = [g.w(f"clause:{j}:p{k}") for k in (1, 2, 3)]
    q = [g.b(f"clause:{j}:q{k}") for k in (1, 2, 3)]
    r = [g.b(f"clause:{j}:r{k}") for k in (1, 2)]
    s = [g.w(f"clause:{j}:s{k}") for k in (1, 2)]
    for k in range(3):
        g.edge(q[k], p[k], "portal")
    for qi, si in ((0, 0), (1, 0), (1, 1), (2, 1)):
        g.edge(q[qi], s[si], "clause")
    for ri, pi in ((0, 0), (0, 1), (1, 1), (1, 2)):
        g.edge(r[ri], p[pi], "clause")
    return p, q


def _clause3(g: _Builder, j: int) -> tuple[list[int], list[int]]:
    p = [g.w(f"clause:{j}:p{k}") for k in (1, 2, 3)]
    q = [g.b(f"clause:{j}:q{k}") for k in (1, 2, 3)]
    x = [g.b(f"clause:{j}:x{k}") for k in (1, 2, 3)]
    y = [g.w(f"clause:{j}:y{k}") for k in (1, 2, 3)]
    z = g.b(f"clause:{j}:z")
    t = g.w(f"clause:{j}:t")
    for k in range(3):
        g.edge(q[k], p[k], "portal")
        g.edge(x[k], p[k], "clause")
        g.edge(q[k], y[k], "clause")
        g.edge(z, y[k], "clause")
        g.edge(x[k], t, "clause")
    return p, q


def _ladder(g: _Builder, v: int, w: int, p: int, q: int, tag: str) -> None:
    """Two rails r1..r7 and s1..s7 with rungs at 1, 4, 7 and crossed diagonals."""
    r: dict[int, int] = {}
    s: dict[int, int] = {}
    for i in range(1, 8):
        r[i] = g.b(f"{tag}:r{i}") if i % 2 else g.w(f"{tag}:r{i}")
        s[i] = g.w(f"{tag}:s{i}") if i % 2 else g.b(f"{tag}:s{i}")

    def join(a: int, a_black: bool, c: int, kind: str) -> None:
        if a_black:
            g.edge(a, c, kind)
        else:
            g.edge(c, a, kind)

    for i in range(1, 7):
        join(r[i], i % 2 == 1, r[i + 1], "ladder")
        join(s[i], i % 2 == 0, s[i + 1], "ladder")
    for i in (1, 4, 7):
        join(r[i], i % 2 == 1, s[i], "ladder")
    g.edge(r[3], s[5], "ladder-diagonal")
    g.edge(r[5], s[3], "ladder-diagonal")
    g.edge(r[1], w, "ladder-dashed")
    g.edge(v, s[1], "ladder-dashed")
    g.edge(r[7], p, "ladder-dashed")
    g.edge(q, s[7], "ladder-dashed")


def sat_to_ncmatching(f: CnfFormula, variant: str = "degree5") -> ReductionArtifact:
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")
    g = _Builder()
    half = ring_length(len(f.clauses)) // 2
    ring_v: dict[int, list[int]] = {}
    ring_w: dict[int, list[int]] = {}
    decode_map = {}
    false_map = {}
    for i in range(1, f.num_vars + 1):
        vs = [g.b(f"var:{i}:v{t}") for t in range(1, half + 1)]
        ws = [g.w(f"var:{i}:w{t}") for t in range(1, half + 1)]
        false_edges = [g.edge(vs[t], ws[t], "ring") for t in range(half)]
        true_edges = [g.edge(vs[(t + 1) % half], ws[t], "ring") for t in range(half)]
        ring_v[i], ring_w[i] = vs, ws
        decode_map[i] = frozenset(true_edges)
        false_map[i] = frozenset(false_edges)

    portals = {}
    clause = _clause5 if variant == "degree5" else _clause3
    for j, lits in enumerate(f.clauses, start=1):
        p, q = clause(g, j)
        for k, lit in enumerate(lits, start=1):
            portals[(j, k)] = (q[k - 1], p[k - 1])
            i = abs(lit)
            v = ring_v[i][2 * j - 1]
            w = ring_w[i][2 * j - 1] if lit > 0 else ring_w[i][2 * j - 2]
            tag = f"link:{j}:{k}"
            if variant == "degree5":
                _bridged(g, v, p[k - 1], f"{tag}:vp")
                _bridged(g, q[k - 1], w, f"{tag}:qw")
            else:
                _ladder(g, v, w, p[k - 1], q[k - 1], tag)

    graph = g.graph()
    if graph.black_count != graph.white_count:
        raise AssertionError("gadget graph must have equally many black and white vertices")
    return ReductionArtifact(f, variant, graph, decode_map, false_map, portals, dict(g.edges))


def decode_assignment(artifact: ReductionArtifact, matching: Matching) -> tuple[bool, ...]:
    """Truth values read off the ring matchings; ``[i - 1]`` is variable ``i``."""
    for e in matching.pairs:
        if artifact.edge_kinds.get(e) in FORBIDDEN_KINDS:
            b, w = e
            raise ForbiddenEdge(
                f"matching uses {artifact.edge_kinds[e]} edge "
                f"{artifact.graph.black_tag(b)} - {artifact.graph.white_tag(w)}")
    out = []
    for i in range(1, artifact.formula.num_vars + 1):
        if artifact.decode_map[i] <= matching.pairs:
            out.append(True)
        elif artifact.false_map[i] <= matching.pairs:
            out.append(False)
        else:
            raise ForbiddenEdge(f"ring of variable {i} is matched in neither pattern")
    return tuple(out)


def verify_reduction(f: CnfFormula, variant: str = "degree5") -> bool:
    """Brute-force satisfiability agrees with existence of a non-clashing matching.

    When a matching exists it must also decode to a satisfying assignment.
    """
    if f.num_vars > BRUTE_FORCE_MAX_VARS or len(f.clauses) > BRUTE_FORCE_MAX_CLAUSES:
        raise ValueError(f"brute-force check limited to n <= {BRUTE_FORCE_MAX_VARS}, "
                         f"m <= {BRUTE_FORCE_MAX_CLAUSES}")
    art = sat_to_ncmatching(f, variant)
    sat = brute_force_sat(f) is not None
    found = nc_matching(art.graph)
    if sat != (found is not None):
        return False
    if found is not None:
        try:
            return f.evaluate(decode_assignment(art, found))
        except ForbiddenEdge:
            return False
    return True


def ladder_isolation_graph() -> tuple[BipartiteGraph, dict[str, tuple[int, int]], dict[tuple[int, int], str]]:
    """One degree-3 connector with its four attachment vertices and the edges ``vw`` and ``pq``.

    Returns the graph, the named edges (``vw``, ``pq``, ``r1s1``, ``r7s7``)
    and the kind of every edge.
    """
    g = _Builder()
    v = g.b("v")
    w = g.w("w")
    q = g.b("q")
    p = g.w("p")
    vw = g.edge(v, w, "ring")
    pq = g.edge(q, p, "portal")
    _ladder(g, v, w, p, q, "link")
    graph = g.graph()
    bi = {t: i for i, t in enumerate(g.black)}
    wi = {t: i for i, t in enumerate(g.white)}
    named = {"vw": vw, "pq": pq,
             "r1s1": (bi["link:r1"], wi["link:s1"]),
             "r7s7": (bi["link:r7"], wi["link:s7"])}
    return graph, named, dict(g.edges)


def ladder_matchings() -> Iterator[Matching]:
    """Non-clashing matchings of the isolated connector covering all 14 ladder vertices.

    The attachment vertices ``v``, ``w``, ``p``, ``q`` may stay exposed, since
    in the full graph they can be matched elsewhere.
    """
    graph, _, _ = ladder_isolation_graph()
    optional_black = {u for u in range(graph.black_count) if graph.black_tag(u) in ("v", "q")}
    required_white = {w for w in range(graph.white_count) if graph.white_tag(w).startswith("link:")}
    chosen: list[tuple[int, int]] = []
    used: set[int] = set()

    def rec(u: int) -> Iterator[Matching]:
        if u == graph.black_count:
            if required_white <= used:
                yield Matching(frozenset(chosen))
            return
        if u in optional_black:
            yield from rec(u + 1)
        for w in graph.black_adj[u]:
            if w in used or any(clashes(graph, (u, w), e) for e in chosen):
                continue
            chosen.append((u, w))
            used.add(w)
            yield from rec(u + 1)
            chosen.pop()
            used.discard(w)

    yield from rec(0)


def ladder_properties() -> dict[str, bool]:
    """Behavioural checks of the degree-3 connector, by exhaustive enumeration."""
    _, named, kinds = ladder_isolation_graph()
    forbidden = {e for e, k in kinds.items() if k in ("ladder-dashed", "ladder-diagonal")}
    found = list(ladder_matchings())
    vw, pq = named["vw"], named["pq"]
    return {
        "dashed edges unused": all(not (m.pairs & forbidden) for m in found),
        "pq forces r1s1": all(named["r1s1"] in m for m in found if pq in m),
        "vw forces r7s7": all(named["r7s7"] in m for m in found if vw in m),
        "pq excludes vw": not any(pq in m and vw in m for m in found),
        "pq without vw": any(pq in m and vw not in m for m in found),
        "vw without pq": any(vw in m and pq not in m for m in found),
        "neither": any(vw not in m and pq not in m for m in found),
    }


# -- class-level reductions --------------------------------------------------

def _require_no_empty(cc: ConceptClass) -> None:
    if 0 in cc.index:
        raise InvalidClass("class contains the empty concept; apply remove_empty first")


def nctd1_instance(cc: ConceptClass) -> ConceptClass:
    """Two copies of ``cc`` on disjoint domains, side by side."""
    _require_no_empty(cc)
    return disjoint_union(cc, cc)


def nctdplus_k_instance(cc: ConceptClass, k: int) -> ConceptClass:
    """Powerset on ``k - 1`` fresh instances freely combined with ``cc``."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    return free_combination(powerset(k - 1), cc)


def nctd_k_instance(cc: ConceptClass, k: int) -> ConceptClass:
    """Powerset on ``2(k - 1)`` fresh instances freely combined with four copies of ``cc``."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    _require_no_empty(cc)
    four = nctd1_instance(nctd1_instance(cc))
    return free_combination(powerset(2 * (k - 1)), four)
