"""Concept classes over finite domains, samples, and structural measures.

Concepts are stored as integer bit masks: bit ``j`` is set iff instance ``j``
belongs to the concept. Domains are capped at 63 instances.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from .errors import (
    ClassFormatError,
    ContradictorySample,
    DimensionMismatch,
    InvalidClass,
)

MAX_DOMAIN = 63
MAX_POWERSET = 20


def popcount(x: int) -> int:
    return x.bit_count()


def bits(x: int) -> list[int]:
    """Indices of the set bits of ``x`` in increasing order."""
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def row_string(mask: int, m: int) -> str:
    return "".join("1" if mask >> j & 1 else "0" for j in range(m))


def parse_row(row: str) -> int:
    mask = 0
    for j, ch in enumerate(row):
        if ch == "1":
            mask |= 1 << j
        elif ch != "0":
            raise ValueError(f"invalid character {ch!r} in row {row!r}")
    return mask


@dataclass(frozen=True)
class Concept:
    """A single concept as a membership vector over ``m`` instances."""

    m: int
    mask: int

    def __post_init__(self):
        if self.mask >> self.m:
            raise DimensionMismatch(f"mask {self.mask:#x} exceeds domain size {self.m}")

    @classmethod
    def from_row(cls, row: str) -> "Concept":
        return cls(len(row), parse_row(row))

    @property
    def row(self) -> str:
        return row_string(self.mask, self.m)

    @property
    def members(self) -> list[int]:
        return bits(self.mask)

    def __contains__(self, x: int) -> bool:
        return bool(self.mask >> x & 1)

    def __len__(self) -> int:
        return popcount(self.mask)


@dataclass(frozen=True, order=True)
class Sample:
    """A set of labelled examples, held as two disjoint instance masks."""

    pos: int = 0
    neg: int = 0

    def __post_init__(self):
        if self.pos & self.neg:
            raise ContradictorySample(
                f"instances {bits(self.pos & self.neg)} carry both labels"
            )
        if self.pos < 0 or self.neg < 0:
            raise ValueError("negative instance mask")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int | bool]]) -> "Sample":
        pos = neg = 0
        for x, label in pairs:
            if x < 0:
                raise ValueError(f"negative instance index {x}")
            if label:
                pos |= 1 << x
            else:
                neg |= 1 << x
        return cls(pos, neg)

    @classmethod
    def labelled_by(cls, concept_mask: int, instances: int) -> "Sample":
        """The sample over ``instances`` carrying the labels of ``concept_mask``."""
        return cls(instances & concept_mask, instances & ~concept_mask)

    @classmethod
    def parse(cls, text: str) -> "Sample":
        """Parse ``(i,l),(j,l)`` notation; an empty string is the empty sample."""
        text = text.strip()
        if not text or text == "{}":
            return cls()
        pairs = []
        for chunk in text.replace(" ", "").strip("{}").split("),"):
            chunk = chunk.strip("()")
            if not chunk:
                continue
            x, label = chunk.split(",")
            if label not in ("0", "1"):
                raise ValueError(f"label must be 0 or 1, got {label!r}")
            pairs.append((int(x), int(label)))
        return cls.from_pairs(pairs)

    @property
    def instances(self) -> int:
        return self.pos | self.neg

    @property
    def examples(self) -> tuple[tuple[int, int], ...]:
        return tuple((x, 1 if self.pos >> x & 1 else 0) for x in bits(self.instances))

    @property
    def is_positive(self) -> bool:
        return self.neg == 0

    def __len__(self) -> int:
        return popcount(self.pos | self.neg)

    def __or__(self, other: "Sample") -> "Sample":
        return Sample(self.pos | other.pos, self.neg | other.neg)

    def issubset(self, other: "Sample") -> bool:
        return self.pos & ~other.pos == 0 and self.neg & ~other.neg == 0

    def consistent_with(self, concept_mask: int) -> bool:
        return self.pos & ~concept_mask == 0 and self.neg & concept_mask == 0

    def __str__(self) -> str:
        return ",".join(f"({x},{label})" for x, label in self.examples)


def is_consistent(concept: Concept, sample: Sample) -> bool:
    """True iff every labelled example in ``sample`` agrees with ``concept``."""
    if sample.instances >> concept.m:
        raise DimensionMismatch(
            f"sample mentions instance {sample.instances.bit_length() - 1} "
            f"outside a domain of size {concept.m}"
        )
    return sample.consistent_with(concept.mask)


@dataclass(frozen=True)
class ConceptClass:
    """A duplicate-free, canonically ordered family of concepts.

    Concepts are kept sorted by their 0/1 row string so that indices, and
    every tie-break that depends on them, are reproducible.
    """

    m: int
    concepts: tuple[int, ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not 1 <= self.m <= MAX_DOMAIN:
            raise InvalidClass(f"domain size must be in [1, {MAX_DOMAIN}], got {self.m}")
        if not self.concepts:
            raise InvalidClass("a concept class needs at least one concept")
        if len(set(self.concepts)) != len(self.concepts):
            raise InvalidClass("duplicate concepts")
        for c in self.concepts:
            if c < 0 or c >> self.m:
                raise DimensionMismatch(f"concept {c:#x} outside domain of size {self.m}")
        ordered = tuple(sorted(self.concepts, key=lambda c: row_string(c, self.m)))
        object.__setattr__(self, "concepts", ordered)
        if self.labels is not None:
            if len(self.labels) != self.m or len(set(self.labels)) != self.m:
                raise InvalidClass("labels must be m distinct names")
            object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_masks(cls, m: int, masks: Iterable[int], labels=None) -> "ConceptClass":
        return cls(m, tuple(masks), labels)

    @classmethod
    def from_rows(cls, rows: Sequence[str], labels=None) -> "ConceptClass":
        if not rows:
            raise InvalidClass("a concept class needs at least one concept")
        m = len(rows[0])
        if any(len(r) != m for r in rows):
            raise DimensionMismatch("rows have different lengths")
        return cls(m, tuple(parse_row(r) for r in rows), labels)

    def __len__(self) -> int:
        return len(self.concepts)

    def __iter__(self):
        return iter(self.concepts)

    def __contains__(self, mask: int) -> bool:
        return mask in self.index

    @cached_property
    def index(self) -> dict[int, int]:
        return {c: i for i, c in enumerate(self.concepts)}

    @property
    def full(self) -> int:
        return (1 << self.m) - 1

    def concept(self, i: int) -> Concept:
        self._check(i)
        return Concept(self.m, self.concepts[i])

    def row(self, i: int) -> str:
        return row_string(self.concepts[i], self.m)

    def rows(self) -> list[str]:
        return [row_string(c, self.m) for c in self.concepts]

    def index_of_row(self, row: str) -> int:
        if len(row) != self.m:
            raise DimensionMismatch(f"row {row!r} has length {len(row)}, domain is {self.m}")
        try:
            return self.index[parse_row(row)]
        except KeyError:
            raise KeyError(f"row {row!r} is not a concept of this class") from None

    def _check(self, i: int) -> None:
        if not 0 <= i < len(self.concepts):
            raise IndexError(f"concept index {i} out of range [0, {len(self.concepts)})")

    @cached_property
    def neighbor_lists(self) -> tuple[tuple[int, ...], ...]:
        idx = self.index
        out = []
        for c in self.concepts:
            out.append(tuple(sorted(
                idx[c ^ (1 << x)] for x in range(self.m) if c ^ (1 << x) in idx
            )))
        return tuple(out)

    def __str__(self) -> str:
        return format_class(self)


def neighbors(cc: ConceptClass, i: int) -> list[int]:
    """Indices of concepts at Hamming distance exactly one from concept ``i``."""
    cc._check(i)
    return list(cc.neighbor_lists[i])


def degree(cc: ConceptClass, i: int) -> int:
    cc._check(i)
    return len(cc.neighbor_lists[i])


def deg_avg(cc: ConceptClass) -> Fraction:
    return Fraction(sum(len(n) for n in cc.neighbor_lists), len(cc))


def dominance(cc: ConceptClass, i: int) -> int:
    """Number of neighbours of concept ``i`` that have one fewer member."""
    cc._check(i)
    c = cc.concepts[i]
    return sum(1 for j in cc.neighbor_lists[i] if cc.concepts[j] & ~c == 0)


def is_shattered(cc: ConceptClass, instances: int) -> bool:
    k = popcount(instances)
    if (1 << k) > len(cc):
        return False
    return len({c & instances for c in cc.concepts}) == 1 << k


def vc_dimension(cc: ConceptClass) -> int:
    """Size of the largest instance set shattered by ``cc``.

    Shattered sets are closed under taking subsets, so the search grows the
    candidate size one level at a time and only extends sets shattered at the
    previous level.
    """
    level = [0]
    d = 0
    while level:
        nxt = set()
        for s in level:
            top = s.bit_length()
            for x in range(top, cc.m):
                t = s | (1 << x)
                if t not in nxt and is_shattered(cc, t):
                    nxt.add(t)
        if not nxt:
            break
        d += 1
        level = sorted(nxt)
    return d


def free_combination(c1: ConceptClass, c2: ConceptClass) -> ConceptClass:
    """Union of every concept of ``c1`` with every concept of ``c2``.

    The domain of ``c2`` is shifted past that of ``c1`` to make them disjoint.
    """
    shift = c1.m
    masks = [a | (b << shift) for a in c1.concepts for b in c2.concepts]
    labels = None
    if c1.labels is not None and c2.labels is not None and not set(c1.labels) & set(c2.labels):
        labels = c1.labels + c2.labels
    return ConceptClass(c1.m + c2.m, tuple(masks), labels)


def k_power(cc: ConceptClass, k: int) -> ConceptClass:
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    out = cc
    for _ in range(k - 1):
        out = free_combination(out, cc)
    return out


def project(cc: ConceptClass, start: int, size: int) -> set[int]:
    """Restrictions of all concepts to the instance window ``[start, start+size)``."""
    window = (1 << size) - 1
    return {(c >> start) & window for c in cc.concepts}


def remove_empty(cc: ConceptClass) -> ConceptClass:
    if 0 not in cc.index or len(cc) == 1:
        return cc
    return ConceptClass(cc.m, tuple(c for c in cc.concepts if c), cc.labels)


def disjoint_union(c1: ConceptClass, c2: ConceptClass) -> ConceptClass:
    """Concepts of ``c1`` and of ``c2`` side by side over disjoint domains."""
    shift = c1.m
    masks = list(c1.concepts) + [b << shift for b in c2.concepts]
    return ConceptClass(c1.m + c2.m, tuple(masks))


# -- named classes -----------------------------------------------------------

def powerset(m: int) -> ConceptClass:
    if not 1 <= m <= MAX_POWERSET:
        raise ValueError(f"powerset size must be in [1, {MAX_POWERSET}], got {m}")
    return ConceptClass(m, tuple(range(1 << m)))


WARMUTH_ROWS = {
    "C1": "10001", "C2": "11000", "C3": "01100", "C4": "00110", "C5": "00011",
    "C'1": "10101", "C'2": "11010", "C'3": "01101", "C'4": "10110", "C'5": "01011",
}

# a positive non-clashing map of order 2 for the Warmuth class (1-based instances)
WARMUTH_BOLD = {
    "C1": (1, 5), "C2": (1, 2), "C3": (2, 3), "C4": (3, 4), "C5": (4, 5),
    "C'1": (1, 3), "C'2": (2, 4), "C'3": (3, 5), "C'4": (1, 4), "C'5": (2, 5),
}


def warmuth_class() -> ConceptClass:
    return ConceptClass.from_rows(list(WARMUTH_ROWS.values()))


def intro_cycle_class() -> ConceptClass:
    """The four concepts {i, i+1 mod 4} over four instances."""
    return ConceptClass(4, tuple((1 << i) | (1 << ((i + 1) % 4)) for i in range(4)))


def singletons_plus_empty(m: int) -> ConceptClass:
    if not 1 <= m <= MAX_DOMAIN:
        raise ValueError(f"domain size must be in [1, {MAX_DOMAIN}], got {m}")
    return ConceptClass(m, (0,) + tuple(1 << x for x in range(m)))


def named_class(text: str) -> ConceptClass:
    """Resolve generator names like ``warmuth``, ``powerset:3``, ``singletons:4``."""
    name, _, arg = text.partition(":")
    name = name.strip().lower()
    if name == "warmuth":
        return warmuth_class()
    if name in ("intro", "cycle", "intro_cycle"):
        return intro_cycle_class()
    if not arg:
        raise ValueError(f"generator {name!r} needs a size, e.g. {name}:3")
    n = int(arg)
    if name == "powerset":
        return powerset(n)
    if name in ("singletons", "singletons_plus_empty"):
        return singletons_plus_empty(n)
    raise ValueError(f"unknown class generator {name!r}")


GENERATORS = ("powerset", "warmuth", "intro", "singletons")


# -- text format -------------------------------------------------------------

def format_class(cc: ConceptClass) -> str:
    lines = [f"domain {cc.m}"]
    if cc.labels is not None:
        lines.append("# labels " + " ".join(cc.labels))
    lines.extend(cc.rows())
    return "\n".join(lines) + "\n"


def parse_class(text: str) -> ConceptClass:
    m = None
    labels = None
    rows: list[str] = []
    seen: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].split()
            if body[:1] == ["labels"]:
                labels = tuple(body[1:])
            continue
        if m is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "domain":
                raise ClassFormatError("expected header 'domain <m>'", lineno)
            try:
                m = int(parts[1])
            except ValueError:
                raise ClassFormatError(f"bad domain size {parts[1]!r}", lineno,
                                       raw.index(parts[1]) + 1) from None
            if not 1 <= m <= MAX_DOMAIN:
                raise ClassFormatError(f"domain size must be in [1, {MAX_DOMAIN}]", lineno)
            continue
        col = raw.index(line[0]) + 1
        for off, ch in enumerate(line):
            if ch not in "01":
                raise ClassFormatError(f"unexpected character {ch!r}", lineno, col + off)
        if len(line) != m:
            raise ClassFormatError(f"row has length {len(line)}, expected {m}", lineno, col)
        mask = parse_row(line)
        if mask in seen:
            raise ClassFormatError(f"duplicate concept (first seen on line {seen[mask]})",
                                   lineno, col)
        seen[mask] = lineno
        rows.append(line)
    if m is None:
        raise ClassFormatError("missing 'domain <m>' header", 1)
    if not rows:
        raise ClassFormatError("class has no concepts", lineno if text else 1)
    return ConceptClass(m, tuple(parse_row(r) for r in rows), labels)


def load_class(source: str) -> ConceptClass:
    """Read a class file, or build a named class when ``source`` names a generator."""
    if os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            return parse_class(fh.read())
    try:
        return named_class(source)
    except ValueError as exc:
        raise FileNotFoundError(f"{source!r} is neither a file nor a known class ({exc})") from None


def all_samples(m: int, size: int, positive_only: bool = False) -> Iterable[Sample]:
    """Every sample over exactly ``size`` distinct instances, in lexicographic order."""
    for combo in itertools.combinations(range(m), size):
        inst = sum(1 << x for x in combo)
        if positive_only:
            yield Sample(inst, 0)
            continue
        for labels in itertools.product((0, 1), repeat=size):
            pos = sum(1 << x for x, l in zip(combo, labels) if l)
            yield Sample(pos, inst & ~pos)
