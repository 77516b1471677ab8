"""No-clash teaching: teacher maps, exact NCTD / NCTD+ / ANCTD, and bounds.

A teacher map assigns each concept a consistent sample. It *clashes* on two
distinct concepts when each one's sample is consistent with the other
concept. The no-clash teaching dimension is the least order (largest sample
size) of a map without clashes; ANCTD minimises the average size instead.
"""

from __future__ import annotations

import itertools
import json
import logging
import math
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .concepts import (
    ConceptClass,
    Sample,
    bits,
    deg_avg,
    dominance,
    popcount,
    row_string,
)
from .errors import ClassFormatError, InconsistentTeacherMap, SearchBudgetExceeded

log = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 2_000_000
AUDIT_MAX_DOMAIN = 12


def default_node_budget() -> int:
    return int(os.environ.get("TEACHKIT_BUDGET_NODES", DEFAULT_NODE_BUDGET))


@dataclass(frozen=True)
class TeacherMap:
    """One sample per concept, indexed like the concepts of the class."""

    samples: tuple[Sample, ...]
    positive_only: bool = False

    def __post_init__(self):
        object.__setattr__(self, "samples", tuple(self.samples))
        if self.positive_only and any(s.neg for s in self.samples):
            raise ValueError("positive teacher map contains a negative example")

    def __len__(self) -> int:
        return len(self.samples)

    def __getitem__(self, i: int) -> Sample:
        return self.samples[i]

    @property
    def order(self) -> int:
        return max((len(s) for s in self.samples), default=0)

    @property
    def total_size(self) -> int:
        return sum(len(s) for s in self.samples)

    @property
    def instances_used(self) -> int:
        used = 0
        for s in self.samples:
            used |= s.instances
        return popcount(used)

    def check(self, cc: ConceptClass) -> None:
        if len(self.samples) != len(cc):
            raise ValueError(f"map has {len(self.samples)} samples for {len(cc)} concepts")
        for i, (s, c) in enumerate(zip(self.samples, cc.concepts)):
            if s.instances >> cc.m:
                raise InconsistentTeacherMap(i)
            if not s.consistent_with(c):
                raise InconsistentTeacherMap(i)


def _clash(s: Sample, c: int, t: Sample, d: int) -> bool:
    return s.consistent_with(d) and t.consistent_with(c)


def is_non_clashing(tmap: TeacherMap, cc: ConceptClass) -> tuple[int, int] | None:
    """``None`` when the map has no clash, else the lexicographically first clashing pair."""
    tmap.check(cc)
    cs = cc.concepts
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            if _clash(tmap.samples[i], cs[i], tmap.samples[j], cs[j]):
                return (i, j)
    return None


def learner_reconstruct(tmap: TeacherMap, cc: ConceptClass, sample: Sample) -> int:
    """The learner built from a non-clashing map.

    Returns the index of the concept ``C`` with ``T(C)`` contained in
    ``sample`` and ``C`` consistent with ``sample``; falls back to concept 0
    when there is none.
    """
    for i, c in enumerate(cc.concepts):
        if tmap.samples[i].issubset(sample) and sample.consistent_with(c):
            return i
    return 0


def collusion_audit(tmap: TeacherMap, cc: ConceptClass, max_domain: int = AUDIT_MAX_DOMAIN) -> bool:
    """Check every consistent superset of every teaching set against the learner."""
    if cc.m > max_domain:
        raise SearchBudgetExceeded(0, None, f"collusion audit limited to domains of size "
                                            f"<= {max_domain}, got {cc.m}")
    tmap.check(cc)
    full = cc.full
    for i, c in enumerate(cc.concepts):
        base = tmap.samples[i]
        free = full & ~base.instances
        sub = free
        while True:
            s = base | Sample.labelled_by(c, sub)
            if learner_reconstruct(tmap, cc, s) != i:
                return False
            if sub == 0:
                break
            sub = (sub - 1) & free
    return True


# -- bounds --------------------------------------------------------------------

def counting_bound(size: int, m: int, positive_only: bool = False) -> int:
    """Least ``d`` such that ``size`` concepts fit into the available order-``d`` samples."""
    for d in range(m + 1):
        if positive_only:
            room = sum(math.comb(m, i) for i in range(d + 1))
        else:
            room = 2 ** d * math.comb(m, d)
        if size <= room:
            return d
    return m


@dataclass(frozen=True)
class BoundsReport:
    counting_lb: int
    degree_lb: int
    dominance_lb: int
    powerset_ub: int
    anctd_lb: Fraction
    positive_only: bool = False
    note: str = ("counting bound uses the full domain size in place of the least "
                 "number of instances an optimal map must use")

    @property
    def lower(self) -> int:
        lb = max(self.counting_lb, self.degree_lb)
        if self.positive_only:
            lb = max(lb, self.dominance_lb)
        return lb

    def as_dict(self) -> dict:
        return {
            "counting_lb": self.counting_lb,
            "degree_lb": self.degree_lb,
            "dominance_lb": self.dominance_lb,
            "powerset_ub": self.powerset_ub,
            "anctd_lb": str(self.anctd_lb),
            "lower": self.lower,
            "positive_only": self.positive_only,
        }


def bounds(cc: ConceptClass, positive_only: bool = False) -> BoundsReport:
    avg = deg_avg(cc)
    return BoundsReport(
        counting_lb=counting_bound(len(cc), cc.m, positive_only),
        degree_lb=math.ceil(avg / 2),
        dominance_lb=max(dominance(cc, i) for i in range(len(cc))),
        powerset_ub=(cc.m + 1) // 2,
        anctd_lb=avg / 2,
        positive_only=positive_only,
    )


# -- exact NCTD ------------------------------------------------------------------

@dataclass(frozen=True)
class NctdResult:
    value: int
    witness: TeacherMap
    lower_bound: int
    certificates: tuple[str, ...] = field(default_factory=tuple)
    nodes: int = 0

    @property
    def instances_used(self) -> int:
        return self.witness.instances_used


def powerset_pairing_map(cc: ConceptClass) -> TeacherMap:
    """Order ceil(m/2) map obtained by restricting a pairing map for the powerset.

    Instances are paired (0,1), (2,3), ...; on each pair the four patterns
    00, 10, 01, 11 are taught by (a,0), (b,0), (b,1), (a,1) respectively, and
    a leftover instance is taught by its own label.
    """
    samples = []
    for c in cc.concepts:
        pos = neg = 0
        for a in range(0, cc.m - 1, 2):
            b = a + 1
            pattern = (c >> a & 1, c >> b & 1)
            x, label = {(0, 0): (a, 0), (1, 0): (b, 0), (0, 1): (b, 1), (1, 1): (a, 1)}[pattern]
            if label:
                pos |= 1 << x
            else:
                neg |= 1 << x
        if cc.m % 2:
            x = cc.m - 1
            if c >> x & 1:
                pos |= 1 << x
            else:
                neg |= 1 << x
        samples.append(Sample(pos, neg))
    return TeacherMap(tuple(samples))


def _candidates(c: int, m: int, d: int, positive_only: bool) -> list[Sample]:
    pool = bits(c) if positive_only else range(m)
    size = min(d, len(pool)) if positive_only else d
    out = []
    for combo in itertools.combinations(pool, size):
        inst = sum(1 << x for x in combo)
        out.append(Sample.labelled_by(c, inst))
    return out


class _Budget:
    def __init__(self, nodes: int, seconds: float | None):
        self.nodes_left = nodes
        self.deadline = None if seconds is None else time.monotonic() + seconds
        self.used = 0

    def tick(self) -> bool:
        self.used += 1
        self.nodes_left -= 1
        if self.nodes_left < 0:
            return False
        if self.deadline is not None and self.used % 1024 == 0 and time.monotonic() > self.deadline:
            return False
        return True


class _OutOfBudget(Exception):
    pass


def _order_search(cc: ConceptClass, cands: list[list[Sample]], budget: _Budget) -> list[int] | None:
    """Find a clash-free choice of one candidate per concept, or prove none exists.

    Domains are candidate bit sets. Assigning sample ``s`` to concept ``a``
    removes, for every concept ``b`` consistent with ``s``, all of ``b``'s
    candidates that are consistent with ``a``. The next concept is the one
    with the fewest live candidates, ties broken by descending degree and
    then index; candidates are tried in lexicographic order.
    """
    cs = cc.concepts
    n = len(cs)
    # consistent[a][k]: concepts consistent with candidate k of a
    consistent = [[sum(1 << b for b in range(n) if b != a and s.consistent_with(cs[b]))
                   for s in cands[a]] for a in range(n)]
    # hits[b][a]: candidates of b that are consistent with concept a
    hits = [[sum(1 << k for k, t in enumerate(cands[b]) if t.consistent_with(cs[a]))
             for a in range(n)] for b in range(n)]
    rank = {c: r for r, c in enumerate(sorted(range(n), key=lambda i: (-len(cc.neighbor_lists[i]), i)))}
    domains = [(1 << len(cands[a])) - 1 for a in range(n)]
    assignment = [-1] * n

    def rec(unassigned: int) -> bool:
        if not budget.tick():
            raise _OutOfBudget
        if not unassigned:
            return True
        a = min(bits(unassigned), key=lambda i: (popcount(domains[i]), rank[i]))
        dom = domains[a]
        rest = unassigned & ~(1 << a)
        while dom:
            low = dom & -dom
            dom ^= low
            k = low.bit_length() - 1
            saved = []
            ok = True
            for b in bits(consistent[a][k] & rest):
                new = domains[b] & ~hits[b][a]
                if new != domains[b]:
                    saved.append((b, domains[b]))
                    domains[b] = new
                    if not new:
                        ok = False
                        break
            if ok:
                assignment[a] = k
                if rec(rest):
                    return True
                assignment[a] = -1
            for b, old in saved:
                domains[b] = old
        return False

    if any(not d for d in domains):
        return None
    return list(assignment) if rec((1 << n) - 1) else None


def nctd_exact(
    cc: ConceptClass,
    positive_only: bool = False,
    node_budget: int | None = None,
    time_budget: float | None = None,
    construct_at_upper: bool = True,
) -> NctdResult:
    """Exact NCTD (or NCTD+) with a witness map in normal form.

    Orders are tried upward from the best lower bound. Each order ``d`` is a
    clash-free assignment search over samples of size exactly ``d`` (positive
    case: ``min(|C|, d)`` members of ``C``). When ``d`` reaches the universal
    upper bound the witness is built directly instead of searched for.
    """
    if node_budget is None:
        node_budget = default_node_budget()
    n = len(cc)
    if n == 1:
        return NctdResult(0, TeacherMap((Sample(),), positive_only), 0, ("single concept",))
    rep = bounds(cc, positive_only)
    lb = rep.lower
    if positive_only:
        ub = max(popcount(c) for c in cc.concepts)
    else:
        ub = rep.powerset_ub
    certs = [f"order {d}: below lower bound {lb}" for d in range(lb)]
    budget = _Budget(node_budget, time_budget)
    for d in range(lb, ub + 1):
        if d == ub and construct_at_upper:
            if positive_only:
                tmap = TeacherMap(tuple(Sample(c, 0) for c in cc.concepts), True)
            else:
                tmap = powerset_pairing_map(cc)
            certs.append(f"order {d}: universal upper bound, witness constructed")
            return NctdResult(d, tmap, lb, tuple(certs), budget.used)
        cands = [_candidates(c, cc.m, d, positive_only) for c in cc.concepts]
        before = budget.used
        try:
            found = _order_search(cc, cands, budget)
        except _OutOfBudget:
            raise SearchBudgetExceeded(d, ub, "NCTD search exceeded its budget") from None
        if found is None:
            msg = f"order {d}: exhausted after {budget.used - before} nodes"
            log.info(msg)
            certs.append(msg)
            continue
        tmap = TeacherMap(tuple(cands[a][k] for a, k in enumerate(found)), positive_only)
        return NctdResult(d, tmap, lb, tuple(certs), budget.used)
    raise AssertionError("upper bound order must be feasible")  # pragma: no cover


def nctd(cc: ConceptClass, positive_only: bool = False, **kw) -> int:
    return nctd_exact(cc, positive_only, **kw).value


# -- exact ANCTD -------------------------------------------------------------------

@dataclass(frozen=True)
class AnctdResult:
    value: Fraction
    witness: TeacherMap
    nodes: int = 0


def anctd_exact(cc: ConceptClass, node_budget: int | None = None) -> AnctdResult:
    """Minimum average sample size over non-clashing maps, by branch and bound.

    Samples are identified with their instance sets (labels come from the
    concept). Concepts ``a`` and ``b`` do not clash exactly when ``S_a`` or
    ``S_b`` meets ``D = c_a ^ c_b``. Each concept keeps a bit set of the
    instance sets still allowed; the sum of the cheapest allowed sets is the
    lower bound, tightened by one for every vertex-disjoint pair that no
    cheapest choice can repair. When the cheapest choices already satisfy
    every pair the node is solved; otherwise the search branches on a
    violated pair: either ``S_a`` meets ``D``, or it misses ``D`` and ``S_b``
    meets it.
    """
    if node_budget is None:
        node_budget = default_node_budget()
    cs = cc.concepts
    n = len(cs)
    if n == 1:
        return AnctdResult(Fraction(0), TeacherMap((Sample(),)))
    subs = sorted(range(cc.full + 1), key=lambda x: (popcount(x), x))
    size = [popcount(x) for x in subs]
    by_size = [0] * (cc.m + 1)
    for k, x in enumerate(subs):
        by_size[size[k]] |= 1 << k
    hit_cache: dict[int, int] = {}

    def hit(d: int) -> int:
        if d not in hit_cache:
            hit_cache[d] = sum(1 << k for k, x in enumerate(subs) if x & d)
        return hit_cache[d]

    pairs = sorted(((a, b, cs[a] ^ cs[b]) for a in range(n) for b in range(a + 1, n)),
                   key=lambda t: (popcount(t[2]), t[0], t[1]))

    upper_map = powerset_pairing_map(cc)
    best_cost = upper_map.total_size
    best = [s.instances for s in upper_map.samples]
    nodes = 0

    def cheapest(dom: int) -> int:
        return size[(dom & -dom).bit_length() - 1]

    # every neighbouring pair needs its one differing instance in some sample
    proven = sum(len(nb) for nb in cc.neighbor_lists) // 2

    def rec(doms: list[int]) -> None:
        nonlocal best_cost, best, nodes
        if best_cost <= proven:
            return
        nodes += 1
        if nodes > node_budget:
            raise _OutOfBudget
        least = [cheapest(d) for d in doms]
        floor = sum(least)
        if floor >= best_cost:
            return
        cheap = [doms[a] & by_size[least[a]] for a in range(n)]
        pick = [(d & -d).bit_length() - 1 for d in doms]
        clash = None
        extra = 0
        used = 0
        for a, b, d in pairs:
            h = hit(d)
            if clash is None and not (subs[pick[a]] & d or subs[pick[b]] & d):
                clash = (a, b, d)
            # neither endpoint can meet d without paying more than its minimum
            if not (cheap[a] & h or cheap[b] & h) and not (used >> a & 1 or used >> b & 1):
                used |= 1 << a | 1 << b
                extra += 1
        if floor + extra >= best_cost:
            return
        if clash is None:
            best_cost = floor
            best = [subs[k] for k in pick]
            return
        a, b, d = clash
        h = hit(d)
        first = list(doms)
        first[a] &= h
        if first[a]:
            rec(first)
        second = list(doms)
        second[a] &= ~h
        second[b] &= h
        if second[a] and second[b]:
            rec(second)

    try:
        rec([(1 << len(subs)) - 1] * n)
    except _OutOfBudget:
        raise SearchBudgetExceeded(Fraction(proven, n), Fraction(best_cost, n),
                                   "ANCTD search exceeded its budget") from None
    samples = tuple(Sample.labelled_by(c, x) for c, x in zip(cs, best))
    return AnctdResult(Fraction(best_cost, n), TeacherMap(samples), nodes)


# -- witness I/O ---------------------------------------------------------------------

def format_witness(tmap: TeacherMap, cc: ConceptClass) -> str:
    lines = [f"{row_string(c, cc.m)}\t{tmap.samples[i]}" for i, c in enumerate(cc.concepts)]
    return "\n".join(lines) + "\n"


def parse_witness(text: str, cc: ConceptClass, positive_only: bool | None = None) -> TeacherMap:
    samples: dict[int, Sample] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        row, _, rest = line.partition("\t")
        if not _:
            row, _, rest = line.partition(" ")
        row = row.strip()
        try:
            i = cc.index_of_row(row)
        except (KeyError, ValueError) as exc:
            raise ClassFormatError(str(exc), lineno) from None
        if i in samples:
            raise ClassFormatError(f"concept {row} listed twice", lineno)
        try:
            samples[i] = Sample.parse(rest)
        except ValueError as exc:
            raise ClassFormatError(f"bad sample: {exc}", lineno, len(row) + 2) from None
    missing = [cc.row(i) for i in range(len(cc)) if i not in samples]
    if missing:
        raise ClassFormatError(f"no sample for concept(s) {', '.join(missing)}", 1)
    ordered = tuple(samples[i] for i in range(len(cc)))
    if positive_only is None:
        positive_only = all(s.is_positive for s in ordered)
    return TeacherMap(ordered, positive_only)


def witness_to_json(tmap: TeacherMap, cc: ConceptClass) -> str:
    return json.dumps({
        "domain": cc.m,
        "positive_only": tmap.positive_only,
        "order": tmap.order,
        "samples": [{"concept": cc.row(i), "sample": [list(e) for e in s.examples]}
                    for i, s in enumerate(tmap.samples)],
    }, indent=2)
