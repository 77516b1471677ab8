"""Classical teaching sets: TD and TD+ by exact minimum hitting set."""

from __future__ import annotations

from dataclasses import dataclass

from .concepts import ConceptClass, Sample, bits, popcount
from .errors import NoPositiveTeachingSet


@dataclass(frozen=True)
class TeachingSetResult:
    concept: int
    size: int
    witness: Sample


def _greedy_cover(sets: list[int]) -> int:
    chosen = 0
    remaining = [s for s in sets]
    while remaining:
        counts: dict[int, int] = {}
        for s in remaining:
            for x in bits(s):
                counts[x] = counts.get(x, 0) + 1
        best = min(counts, key=lambda x: (-counts[x], x))
        chosen |= 1 << best
        remaining = [s for s in remaining if not s >> best & 1]
    return chosen


def _disjoint_lower_bound(sets: list[int]) -> int:
    """Size of a greedy packing of pairwise disjoint sets; each needs its own element."""
    used = 0
    count = 0
    for s in sorted(sets, key=popcount):
        if s & used == 0:
            used |= s
            count += 1
    return count


def min_hitting_set(sets: list[int]) -> int:
    """Smallest instance mask meeting every mask in ``sets`` (all non-empty).

    Branches on the unhit set with the fewest elements (lowest index on ties)
    and prunes with a disjoint-packing lower bound against the greedy cover.
    """
    sets = sorted(set(sets), key=lambda s: (popcount(s), s))
    # a set containing another is implied by it
    minimal = [s for i, s in enumerate(sets)
               if not any(t & s == t for t in sets[:i])]
    best = _greedy_cover(minimal)
    best_size = popcount(best)

    def search(chosen: int, size: int, unhit: list[int]) -> None:
        nonlocal best, best_size
        if not unhit:
            if size < best_size:
                best, best_size = chosen, size
            return
        if size + _disjoint_lower_bound(unhit) >= best_size:
            return
        pivot = unhit[0]
        excluded = 0
        for x in bits(pivot):
            bit = 1 << x
            rest = [s & ~excluded for s in unhit if not s & bit]
            if any(s == 0 for s in rest):
                excluded |= bit
                continue
            rest.sort(key=lambda s: popcount(s))
            search(chosen | bit, size + 1, rest)
            # later branches never pick x again: those covers were already explored
            excluded |= bit

    search(0, 0, minimal)
    return best


def _distinguishing_sets(cc: ConceptClass, i: int, positive_only: bool) -> list[int]:
    c = cc.concepts[i]
    out = []
    for j, other in enumerate(cc.concepts):
        if j == i:
            continue
        diff = c ^ other
        if positive_only:
            diff &= c
            if not diff:
                raise NoPositiveTeachingSet(i, j)
        out.append(diff)
    return out


def td_concept(cc: ConceptClass, i: int, positive_only: bool = False) -> TeachingSetResult:
    """Minimum teaching set of concept ``i`` within ``cc``."""
    cc._check(i)
    sets = _distinguishing_sets(cc, i, positive_only)
    chosen = min_hitting_set(sets) if sets else 0
    return TeachingSetResult(i, popcount(chosen), Sample.labelled_by(cc.concepts[i], chosen))


def td(cc: ConceptClass, positive_only: bool = False) -> int:
    return max(td_concept(cc, i, positive_only).size for i in range(len(cc)))


def has_teaching_set_within(cc: ConceptClass, i: int, k: int, positive_only: bool = False) -> bool:
    """Whether TD(C_i) <= k, returning False when no positive teaching set exists."""
    try:
        return td_concept(cc, i, positive_only).size <= k
    except NoPositiveTeachingSet:
        return False


def verify_teaching_set(cc: ConceptClass, i: int, sample: Sample) -> bool:
    """True iff concept ``i`` is the only concept of ``cc`` consistent with ``sample``."""
    cc._check(i)
    return [j for j, c in enumerate(cc.concepts) if sample.consistent_with(c)] == [i]
