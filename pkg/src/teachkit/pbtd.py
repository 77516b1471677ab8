"""Preference-based (recursive) teaching dimension.

``PBTD <= k`` holds exactly when the concept/sample consistency graph has a
uniquely restricted matching saturating the concepts. Such a matching is
found by repeatedly matching a sample vertex of degree one to its only
remaining concept; the peeling order is the preference order, least
preferred concept first.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

from .classic import has_teaching_set_within
from .concepts import ConceptClass, Sample, all_samples
from .matching import BipartiteGraph, Matching

GK_EDGE_CAP = 10_000_000


@dataclass(frozen=True)
class PreferenceWitness:
    """Preference order (least preferred first) and one sample per concept index."""

    ordering: tuple[int, ...]
    samples: tuple[Sample, ...]

    def verify(self, cc: ConceptClass) -> bool:
        if sorted(self.ordering) != list(range(len(cc))) or len(self.samples) != len(cc):
            return False
        if len(set(self.samples)) != len(self.samples):
            return False
        position = {c: p for p, c in enumerate(self.ordering)}
        for i, s in enumerate(self.samples):
            if not s.consistent_with(cc.concepts[i]):
                return False
            for j, c in enumerate(cc.concepts):
                if s.consistent_with(c) and position[j] > position[i]:
                    return False
        return True

    @property
    def order(self) -> int:
        return max((len(s) for s in self.samples), default=0)


def gk_samples(m: int, k: int, positive_only: bool = False) -> list[Sample]:
    """Second vertex class of G_k.

    Labelled samples over exactly ``k`` instances, or positive samples over
    at most ``k`` instances (the empty sample included).
    """
    if positive_only:
        out: list[Sample] = []
        for size in range(k + 1):
            out.extend(all_samples(m, size, positive_only=True))
        return out
    return list(all_samples(m, k))


def build_gk(cc: ConceptClass, k: int, positive_only: bool = False) -> tuple[BipartiteGraph, list[Sample]]:
    """Consistency graph between concepts (black) and samples of order ``k`` (white)."""
    if not 1 <= k <= cc.m:
        raise ValueError(f"k must be in [1, {cc.m}], got {k}")
    if positive_only:
        size = sum(math.comb(cc.m, i) for i in range(k + 1))
    else:
        size = 2 ** k * math.comb(cc.m, k)
    if size * len(cc) > GK_EDGE_CAP:
        raise ValueError(f"G_{k} would have up to {size * len(cc)} edges (cap {GK_EDGE_CAP})")
    samples = gk_samples(cc.m, k, positive_only)
    edges = frozenset(
        (i, j) for j, s in enumerate(samples)
        for i, c in enumerate(cc.concepts) if s.consistent_with(c)
    )
    graph = BipartiteGraph(len(cc), len(samples), edges,
                           tuple(cc.rows()), tuple(str(s) or "{}" for s in samples))
    return graph, samples


def uniquely_restricted_saturating_matching(b: BipartiteGraph) -> tuple[Matching, list[int]] | None:
    """Peel degree-one white vertices until every black vertex is matched.

    Returns the matching and the order in which black vertices were matched,
    or ``None`` as soon as no white vertex of degree one remains. The
    lowest-index candidate is always peeled first.
    """
    if b.black_count > b.white_count:
        raise ValueError("black side must not be larger than white side")
    deg = [len(a) for a in b.white_adj]
    alive_black = [True] * b.black_count
    alive_white = [True] * b.white_count
    heap = [v for v, d in enumerate(deg) if d == 1]
    heapq.heapify(heap)
    pairs = []
    order = []
    remaining = b.black_count
    while remaining:
        v = None
        while heap:
            cand = heapq.heappop(heap)
            if alive_white[cand] and deg[cand] == 1:
                v = cand
                break
        if v is None:
            return None
        u = next(x for x in b.white_adj[v] if alive_black[x])
        pairs.append((u, v))
        order.append(u)
        alive_black[u] = False
        alive_white[v] = False
        remaining -= 1
        for w in b.black_adj[u]:
            if alive_white[w]:
                deg[w] -= 1
                if deg[w] == 1:
                    heapq.heappush(heap, w)
    return Matching(frozenset(pairs)), order


def has_alternating_cycle(b: BipartiteGraph, matching: Matching) -> bool:
    """Search for a cycle alternating between matched and unmatched edges.

    Orient unmatched edges black -> white and matched edges white -> black;
    alternating cycles are exactly the directed cycles.
    """
    mate_w = {w: u for u, w in matching.pairs}
    n_b = b.black_count
    # vertices: blacks 0..n_b-1, whites n_b..
    def succ(x: int):
        if x < n_b:
            return [n_b + w for w in b.black_adj[x] if mate_w.get(w) != x]
        u = mate_w.get(x - n_b)
        return [] if u is None else [u]

    color = [0] * (n_b + b.white_count)
    for root in range(len(color)):
        if color[root]:
            continue
        stack = [(root, iter(succ(root)))]
        color[root] = 1
        while stack:
            x, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[x] = 2
                stack.pop()
            elif color[nxt] == 1:
                return True
            elif color[nxt] == 0:
                color[nxt] = 1
                stack.append((nxt, iter(succ(nxt))))
    return False


def pbtd_le_k(cc: ConceptClass, k: int, positive_only: bool = False) -> PreferenceWitness | None:
    graph, samples = build_gk(cc, k, positive_only)
    if graph.black_count > graph.white_count:
        return None
    found = uniquely_restricted_saturating_matching(graph)
    if found is None:
        return None
    matching, order = found
    per_concept = [Sample()] * len(cc)
    for u, v in matching.pairs:
        per_concept[u] = samples[v]
    return PreferenceWitness(tuple(order), tuple(per_concept))


def rtd_peel(cc: ConceptClass, k: int, positive_only: bool = False) -> bool:
    """Recursive teaching: strip every concept with TD <= k in the surviving class."""
    survivors = list(cc.concepts)
    while survivors:
        sub = ConceptClass(cc.m, tuple(survivors))
        keep = [c for i, c in enumerate(sub.concepts)
                if not has_teaching_set_within(sub, i, k, positive_only)]
        if len(keep) == len(survivors):
            return False
        survivors = keep
    return True


def pbtd(cc: ConceptClass, positive_only: bool = False, cross_check: bool = True) -> int:
    """Least ``k`` with ``PBTD <= k``; optionally confirmed by recursive peeling."""
    if len(cc) == 1:
        return 0
    for k in range(1, cc.m + 1):
        if pbtd_le_k(cc, k, positive_only) is not None:
            if cross_check and not (rtd_peel(cc, k, positive_only)
                                    and not rtd_peel(cc, k - 1, positive_only)):
                raise RuntimeError(f"matching and peeling disagree on PBTD at k={k}")
            return k
    raise RuntimeError("no preference order found up to the domain size")  # pragma: no cover


def format_preference_witness(w: PreferenceWitness, cc: ConceptClass) -> str:
    return "".join(f"{cc.row(i)}\t{w.samples[i]}\n" for i in w.ordering)
