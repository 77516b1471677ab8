"""Non-clashing bipartite matching.

A matching of a bipartite graph is *non-clashing* when it saturates every
black vertex and no two of its edges lie on a common 4-cycle. For the graph
of a concept class (concepts black, instances white, membership edges) such
matchings are exactly the positive non-clashing teacher maps of order one.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator

from .concepts import ConceptClass, Sample, bits
from .errors import ClassFormatError, InvalidClass, SearchBudgetExceeded
from .nctd import TeacherMap

EDGE_BUDGET = 100_000
DEFAULT_NODE_BUDGET = 2_000_000


@dataclass(frozen=True)
class BipartiteGraph:
    black_count: int
    white_count: int
    edges: frozenset[tuple[int, int]]
    black_tags: tuple[str, ...] | None = None
    white_tags: tuple[str, ...] | None = None

    def __post_init__(self):
        edges = frozenset((int(b), int(w)) for b, w in self.edges)
        for b, w in edges:
            if not (0 <= b < self.black_count and 0 <= w < self.white_count):
                raise ValueError(f"edge ({b},{w}) references a missing vertex")
        object.__setattr__(self, "edges", edges)
        for tags, n in ((self.black_tags, self.black_count), (self.white_tags, self.white_count)):
            if tags is not None and len(tags) != n:
                raise ValueError("one tag per vertex required")

    @cached_property
    def edge_list(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def black_adj(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.black_count)]
        for b, w in self.edge_list:
            adj[b].append(w)
        return tuple(tuple(a) for a in adj)

    @cached_property
    def white_adj(self) -> tuple[tuple[int, ...], ...]:
        adj: list[list[int]] = [[] for _ in range(self.white_count)]
        for b, w in self.edge_list:
            adj[w].append(b)
        return tuple(tuple(sorted(a)) for a in adj)

    def has_edge(self, b: int, w: int) -> bool:
        return (b, w) in self.edges

    def black_degree(self, b: int) -> int:
        return len(self.black_adj[b])

    def white_degree(self, w: int) -> int:
        return len(self.white_adj[w])

    def max_degree(self) -> int:
        degs = [len(a) for a in self.black_adj] + [len(a) for a in self.white_adj]
        return max(degs, default=0)

    def black_tag(self, b: int) -> str:
        return self.black_tags[b] if self.black_tags else f"b{b}"

    def white_tag(self, w: int) -> str:
        return self.white_tags[w] if self.white_tags else f"w{w}"


@dataclass(frozen=True)
class Matching:
    pairs: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        pairs = frozenset(self.pairs)
        blacks = [b for b, _ in pairs]
        whites = [w for _, w in pairs]
        if len(set(blacks)) != len(blacks) or len(set(whites)) != len(whites):
            raise ValueError("matching edges must be vertex-disjoint")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __contains__(self, edge) -> bool:
        return tuple(edge) in self.pairs

    def mate_of_black(self) -> dict[int, int]:
        return {b: w for b, w in self.pairs}


def clashes(b: BipartiteGraph, e: tuple[int, int], f: tuple[int, int]) -> bool:
    """Whether two disjoint edges lie on a common 4-cycle."""
    (u, v), (u2, v2) = e, f
    return u != u2 and v != v2 and b.has_edge(u, v2) and b.has_edge(u2, v)


def verify_nc_matching(b: BipartiteGraph, matching: Matching) -> bool:
    pairs = sorted(matching.pairs)
    if any(not b.has_edge(u, v) for u, v in pairs):
        return False
    if {u for u, _ in pairs} != set(range(b.black_count)):
        return False
    for i, e in enumerate(pairs):
        for f in pairs[i + 1:]:
            if clashes(b, e, f):
                return False
    return True


def max_bipartite_matching(adj: dict[int, list[int]]) -> dict[int, int]:
    """Maximum matching by augmenting paths; returns black -> white."""
    match_w: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for w in adj[u]:
            if w in seen:
                continue
            seen.add(w)
            if w not in match_w or augment(match_w[w], seen):
                match_w[w] = u
                return True
        return False

    for u in adj:
        augment(u, set())
    return {u: w for w, u in match_w.items()}


def iter_nc_matchings(b: BipartiteGraph) -> Iterator[Matching]:
    """Enumerate every black-saturating non-clashing matching (small graphs only).

    Plain backtracking that checks clashes straight from adjacency; kept
    independent of :func:`nc_matching` so each can check the other.
    """
    chosen: list[tuple[int, int]] = []
    used: set[int] = set()

    def rec(u: int):
        if u == b.black_count:
            yield Matching(frozenset(chosen))
            return
        for w in b.black_adj[u]:
            if w in used:
                continue
            if any(clashes(b, (u, w), f) for f in chosen):
                continue
            chosen.append((u, w))
            used.add(w)
            yield from rec(u + 1)
            chosen.pop()
            used.discard(w)

    yield from rec(0)


class _NCSearch:
    """Backtracking over black vertices with bit-set edge domains.

    Each edge owns one bit; choosing an edge kills every edge sharing an
    endpoint with it or lying on a common 4-cycle with it. Pruning combines
    unit propagation on both sides, a slack count on dead white vertices,
    probing (an edge whose choice propagates to a contradiction is dropped)
    and a Hall check via maximum matching on the surviving edges.
    """

    def __init__(self, b: BipartiteGraph, node_budget: int):
        self.g = b
        self.edges = b.edge_list
        self.eid = {e: i for i, e in enumerate(self.edges)}
        self.bmask = [0] * b.black_count
        self.wmask = [0] * b.white_count
        for i, (u, v) in enumerate(self.edges):
            self.bmask[u] |= 1 << i
            self.wmask[v] |= 1 << i
        self.conflict = [0] * len(self.edges)
        for i, (u, v) in enumerate(self.edges):
            mask = 0
            for v2 in b.black_adj[u]:
                if v2 == v:
                    continue
                for u2 in b.white_adj[v]:
                    if u2 != u and (u2, v2) in self.eid:
                        mask |= 1 << self.eid[(u2, v2)]
            self.conflict[i] = mask
        order = sorted(range(b.black_count), key=lambda u: (len(b.black_adj[u]), u))
        self.rank = {u: r for r, u in enumerate(order)}
        self.slack = b.white_count - b.black_count
        self.budget = node_budget
        self.nodes = 0

    def _choose(self, state, i):
        alive, free_b, free_w, chosen = state
        u, v = self.edges[i]
        alive &= ~(self.bmask[u] | self.wmask[v] | self.conflict[i])
        return alive, free_b & ~(1 << u), free_w & ~(1 << v), chosen + (i,)

    def _propagate(self, state):
        # Force every black vertex with one edge left in a single sweep, then
        # look at the white side; repeat until nothing changes.
        while True:
            changed = False
            for u in bits(state[1]):
                alive, free_b, free_w, chosen = state
                if not free_b >> u & 1:
                    continue
                d = alive & self.bmask[u]
                if not d:
                    return None
                if d & (d - 1) == 0:
                    state = self._choose(state, d.bit_length() - 1)
                    changed = True
            if changed:
                continue
            alive, free_b, free_w, chosen = state
            dead = 0
            single = None
            for v in bits(free_w):
                d = alive & self.wmask[v]
                if not d:
                    dead += 1
                elif single is None and d & (d - 1) == 0:
                    single = d.bit_length() - 1
            if dead > self.slack:
                return None
            if dead == self.slack and single is not None:
                state = self._choose(state, single)
                continue
            return state

    def _probe(self, state):
        while True:
            state = self._propagate(state)
            if state is None:
                return None
            alive, free_b, free_w, chosen = state
            live = 0
            for u in bits(free_b):
                live |= self.bmask[u]
            failed = 0
            for i in bits(alive & live):
                if self._propagate(self._choose(state, i)) is None:
                    failed |= 1 << i
            if not failed:
                return state
            state = (alive & ~failed, free_b, free_w, chosen)

    def _hall_ok(self, state) -> bool:
        alive, free_b, _, _ = state
        adj = {u: [self.edges[i][1] for i in bits(alive & self.bmask[u])] for u in bits(free_b)}
        return len(max_bipartite_matching(adj)) == len(adj)

    def run(self):
        start = ((1 << len(self.edges)) - 1,
                 (1 << self.g.black_count) - 1, (1 << self.g.white_count) - 1, ())
        return self._search(start)

    def _search(self, state):
        self.nodes += 1
        if self.nodes > self.budget:
            raise SearchBudgetExceeded(0, None, f"non-clashing matching search exceeded "
                                                f"{self.budget} nodes")
        state = self._probe(state)
        if state is None:
            return None
        alive, free_b, _, chosen = state
        if not free_b:
            return chosen
        if not self._hall_ok(state):
            return None
        pivot = min(bits(free_b), key=lambda u: ((alive & self.bmask[u]).bit_count(),
                                                 self.rank[u]))
        for i in bits(alive & self.bmask[pivot]):
            found = self._search(self._choose(state, i))
            if found is not None:
                return found
        return None


def nc_matching(b: BipartiteGraph, node_budget: int | None = None) -> Matching | None:
    """A black-saturating non-clashing matching of ``b``, or ``None`` if none exists."""
    if len(b.edges) > EDGE_BUDGET:
        raise SearchBudgetExceeded(0, None, f"graph has {len(b.edges)} edges, "
                                            f"budget is {EDGE_BUDGET}")
    if b.black_count == 0:
        return Matching()
    if node_budget is None:
        node_budget = int(os.environ.get("TEACHKIT_BUDGET_NODES", DEFAULT_NODE_BUDGET))
    search = _NCSearch(b, node_budget)
    found = search.run()
    if found is None:
        return None
    return Matching(frozenset(search.edges[i] for i in found))


def nc_matching_degree2(b: BipartiteGraph, part: str | None = None) -> Matching | None:
    """Polynomial algorithm when one side has maximum degree two.

    After discarding degree-one vertices of the bounded side (they lie on no
    4-cycle), a 4-cycle needs two bounded-side vertices with the same two
    neighbours. Black twins rule out a solution; white twins are merged. The
    remaining graph has no 4-cycles, so any black-saturating matching works.
    """
    black_ok = all(len(a) <= 2 for a in b.black_adj)
    white_ok = all(len(a) <= 2 for a in b.white_adj)
    if part is None:
        part = "black" if black_ok else "white"
    if part not in ("black", "white"):
        raise ValueError("part must be 'black' or 'white'")
    if (part == "black" and not black_ok) or (part == "white" and not white_ok):
        raise ValueError(f"{part} vertices do not all have degree at most two")

    keep_white = [True] * b.white_count
    if part == "black":
        seen: dict[tuple[int, ...], int] = {}
        for u, nbrs in enumerate(b.black_adj):
            if len(nbrs) == 2:
                if nbrs in seen:
                    return None
                seen[nbrs] = u
    else:
        seen = {}
        for v, nbrs in enumerate(b.white_adj):
            if len(nbrs) == 2:
                if nbrs in seen:
                    keep_white[v] = False
                else:
                    seen[nbrs] = v

    adj = {u: [w for w in b.black_adj[u] if keep_white[w]] for u in range(b.black_count)}
    mate = max_bipartite_matching(adj)
    if len(mate) < b.black_count:
        return None
    return Matching(frozenset(mate.items()))


def from_concept_class(cc: ConceptClass) -> BipartiteGraph:
    """Concepts as black vertices, instances as white, edges for membership."""
    if 0 in cc.index:
        raise InvalidClass("class contains the empty concept; apply remove_empty first")
    edges = frozenset((i, x) for i, c in enumerate(cc.concepts) for x in bits(c))
    return BipartiteGraph(
        len(cc), cc.m, edges,
        tuple(f"concept:{r}" for r in cc.rows()),
        tuple(cc.labels) if cc.labels else tuple(f"instance:{x}" for x in range(cc.m)),
    )


def nctdplus_eq_1(cc: ConceptClass, node_budget: int | None = None) -> TeacherMap | None:
    """A positive non-clashing teacher map of order at most one, if any exists.

    The empty concept, when present, is taught by the empty sample: it is
    inconsistent with every non-empty positive sample, so it never clashes.
    """
    nonempty = [i for i, c in enumerate(cc.concepts) if c]
    samples = [Sample()] * len(cc)
    if nonempty:
        sub = ConceptClass(cc.m, tuple(cc.concepts[i] for i in nonempty))
        found = nc_matching(from_concept_class(sub), node_budget)
        if found is None:
            return None
        for j, x in found.pairs:
            samples[cc.index[sub.concepts[j]]] = Sample(1 << x, 0)
    return TeacherMap(tuple(samples), positive_only=True)


# -- text format -------------------------------------------------------------

def format_graph(b: BipartiteGraph, comments: list[str] | None = None) -> str:
    lines = [f"c {c}" for c in comments or []]
    lines.append(f"p bip {b.black_count} {b.white_count}")
    if b.black_tags:
        lines.extend(f"c tag b {u} {t}" for u, t in enumerate(b.black_tags))
    if b.white_tags:
        lines.extend(f"c tag w {v} {t}" for v, t in enumerate(b.white_tags))
    lines.extend(f"e {u} {v}" for u, v in b.edge_list)
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> BipartiteGraph:
    header = None
    edges = []
    btags: dict[int, str] = {}
    wtags: dict[int, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts:
            continue
        kind = parts[0]
        if kind == "c":
            if len(parts) >= 5 and parts[1] == "tag":
                (btags if parts[2] == "b" else wtags)[int(parts[3])] = " ".join(parts[4:])
            continue
        if kind == "p":
            if len(parts) != 4 or parts[1] != "bip":
                raise ClassFormatError("expected 'p bip <black> <white>'", lineno)
            header = (int(parts[2]), int(parts[3]))
        elif kind == "e":
            if header is None:
                raise ClassFormatError("edge before 'p bip' header", lineno)
            if len(parts) != 3:
                raise ClassFormatError("expected 'e <black> <white>'", lineno)
            edges.append((int(parts[1]), int(parts[2])))
        else:
            raise ClassFormatError(f"unknown line type {kind!r}", lineno)
    if header is None:
        raise ClassFormatError("missing 'p bip' header", 1)
    nb, nw = header
    bt = tuple(btags.get(u, f"b{u}") for u in range(nb)) if btags else None
    wt = tuple(wtags.get(v, f"w{v}") for v in range(nw)) if wtags else None
    return BipartiteGraph(nb, nw, frozenset(edges), bt, wt)


def format_matching(m: Matching) -> str:
    return "".join(f"m {u} {v}\n" for u, v in m)


def parse_matching(text: str) -> Matching:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split()
        if not parts or parts[0] == "c":
            continue
        if parts[0] != "m" or len(parts) != 3:
            raise ClassFormatError("expected 'm <black> <white>'", lineno)
        pairs.append((int(parts[1]), int(parts[2])))
    return Matching(frozenset(pairs))
