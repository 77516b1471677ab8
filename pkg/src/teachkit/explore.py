"""Search small concept classes for NCTD exceeding the VC dimension.

Classes are compared up to renaming of instances: the canonical form of a
class is the lexicographically smallest sorted list of row strings over all
instance permutations. Enumeration walks the subsets of the powerset in
increasing bit-mask order and only solves canonical representatives, so a
checkpoint is just the last subset processed.
"""

from __future__ import annotations

import itertools
import json
import os
import random
import time
from dataclasses import asdict, dataclass, field
from functools import lru_cache

from .concepts import ConceptClass, bits, row_string, vc_dimension
from .errors import SearchBudgetExceeded
from .nctd import nctd_exact

MAX_EXHAUSTIVE_DOMAIN = 3


@lru_cache(maxsize=None)
def _permutations(m: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.permutations(range(m)))


def _permute(mask: int, perm: tuple[int, ...]) -> int:
    out = 0
    for j in bits(mask):
        out |= 1 << perm[j]
    return out


def canonical_form(m: int, masks) -> tuple[str, ...]:
    masks = list(masks)
    return min(
        tuple(sorted(row_string(_permute(c, p), m) for c in masks))
        for p in _permutations(m)
    )


@dataclass
class ExploreReport:
    domain: int
    max_size: int
    mode: str = "exhaustive"
    cursor: int = 0
    complete: bool = False
    classes_seen: int = 0
    canonical_classes: int = 0
    violations: list[list[str]] = field(default_factory=list)
    histogram: dict[str, int] = field(default_factory=dict)
    max_gap: int | None = None

    def record(self, rows: tuple[str, ...], nctd: int, vcd: int) -> None:
        key = f"vcd={vcd} nctd={nctd}"
        self.histogram[key] = self.histogram.get(key, 0) + 1
        gap = nctd - vcd
        self.max_gap = gap if self.max_gap is None else max(self.max_gap, gap)
        if gap > 0:
            self.violations.append(list(rows))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ExploreReport":
        return cls(**json.loads(text))

    def to_text(self) -> str:
        lines = [
            f"domain {self.domain}, classes of size <= {self.max_size} ({self.mode})",
            f"classes examined: {self.classes_seen}",
            f"canonical classes solved: {self.canonical_classes}",
            f"NCTD > VCD instances: {len(self.violations)}",
            f"largest NCTD - VCD: {self.max_gap}",
            f"complete: {'yes' if self.complete else 'no'}",
        ]
        lines.extend(f"  {k}: {v}" for k, v in sorted(self.histogram.items()))
        for rows in self.violations:
            lines.append("  violation: " + " ".join(rows))
        return "\n".join(lines) + "\n"


def solve_class(m: int, rows: tuple[str, ...], node_budget: int | None = None) -> tuple[int, int]:
    cc = ConceptClass.from_rows(rows)
    return nctd_exact(cc, node_budget=node_budget).value, vc_dimension(cc)


def _save(report: ExploreReport, state_path: str | None) -> None:
    if state_path is None:
        return
    tmp = state_path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(report.to_json())
    os.replace(tmp, state_path)


def explore_exhaustive(
    domain: int,
    max_size: int | None = None,
    state_path: str | None = None,
    time_budget: float | None = None,
    node_budget: int | None = None,
    checkpoint_every: int = 50,
) -> ExploreReport:
    """All classes on ``domain`` instances with at most ``max_size`` concepts.

    Resumes from ``state_path`` when it holds a report for the same
    parameters. Raises :class:`SearchBudgetExceeded` after saving a
    checkpoint when ``time_budget`` runs out.
    """
    if not 1 <= domain <= MAX_EXHAUSTIVE_DOMAIN:
        raise ValueError(f"exhaustive exploration supports domain 1..{MAX_EXHAUSTIVE_DOMAIN}")
    n = 1 << domain
    max_size = n if max_size is None else max_size
    report = _load(state_path, domain, max_size, "exhaustive")
    if report.complete:
        return report
    deadline = None if time_budget is None else time.monotonic() + time_budget
    last = (1 << n) - 1
    subset = report.cursor + 1
    since = 0
    while subset <= last:
        members = bits(subset)
        if len(members) <= max_size:
            report.classes_seen += 1
            rows = canonical_form(domain, members)
            if rows == tuple(sorted(row_string(c, domain) for c in members)):
                nctd, vcd = solve_class(domain, rows, node_budget)
                report.canonical_classes += 1
                report.record(rows, nctd, vcd)
        report.cursor = subset
        subset += 1
        since += 1
        if since >= checkpoint_every:
            since = 0
            _save(report, state_path)
            if deadline is not None and time.monotonic() > deadline:
                raise SearchBudgetExceeded(
                    report.cursor, last, f"explore stopped at subset {report.cursor}; "
                                         f"resume from {state_path}")
    report.complete = True
    _save(report, state_path)
    return report


def explore_sample(
    domain: int,
    count: int,
    max_size: int | None = None,
    seed: int = 0,
    node_budget: int | None = None,
) -> ExploreReport:
    """``count`` random classes (drawn with replacement), solved once per canonical form."""
    n = 1 << domain
    max_size = n if max_size is None else min(max_size, n)
    rng = random.Random(seed)
    report = ExploreReport(domain, max_size, mode=f"sample of {count}, seed {seed}")
    solved: dict[tuple[str, ...], tuple[int, int]] = {}
    for _ in range(count):
        size = rng.randint(1, max_size)
        members = rng.sample(range(n), size)
        rows = canonical_form(domain, members)
        report.classes_seen += 1
        if rows not in solved:
            solved[rows] = solve_class(domain, rows, node_budget)
            report.canonical_classes += 1
            report.record(rows, *solved[rows])
    report.cursor = count
    report.complete = True
    return report


def _load(state_path: str | None, domain: int, max_size: int, mode: str) -> ExploreReport:
    if state_path and os.path.exists(state_path):
        with open(state_path) as fh:
            report = ExploreReport.from_json(fh.read())
        if (report.domain, report.max_size, report.mode) == (domain, max_size, mode):
            return report
    return ExploreReport(domain, max_size, mode)
