import itertools
import json

import pytest
from hypothesis import given, strategies as st

from teachkit.concepts import ConceptClass, vc_dimension
from teachkit.errors import SearchBudgetExceeded
from teachkit.explore import ExploreReport, canonical_form, explore_exhaustive, explore_sample

from oracles import brute_nctd


def test_canonical_form_identifies_relabelings():
    a = canonical_form(3, [0b001, 0b011])
    b = canonical_form(3, [0b100, 0b110])
    assert a == b
    assert canonical_form(3, [0b001, 0b110]) != a


@given(st.sets(st.integers(0, 7), min_size=1), st.permutations(range(3)))
def test_canonical_form_is_invariant(masks, perm):
    moved = [sum(1 << perm[j] for j in range(3) if c >> j & 1) for c in masks]
    assert canonical_form(3, masks) == canonical_form(3, moved)


def _orbit_count(m):
    # Burnside-free reference: distinct frozensets after closing under permutations
    seen = set()
    universe = range(1 << m)
    for r in range(1, (1 << m) + 1):
        for members in itertools.combinations(universe, r):
            seen.add(min(
                tuple(sorted(sum(1 << p[j] for j in range(m) if c >> j & 1) for c in members))
                for p in itertools.permutations(range(m))))
    return len(seen)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_exhaustive_counts(m):
    report = explore_exhaustive(m)
    assert report.complete
    assert report.classes_seen == 2 ** (2 ** m) - 1
    assert report.canonical_classes == _orbit_count(m)
    assert report.violations == [] and report.max_gap <= 0


def test_exhaustive_small_domain_matches_oracle():
    report = explore_exhaustive(2)
    total = sum(report.histogram.values())
    assert total == report.canonical_classes
    for r in range(1, 5):
        for members in itertools.combinations(range(4), r):
            cc = ConceptClass(2, tuple(members))
            assert brute_nctd(cc) <= vc_dimension(cc)


def test_resume_from_checkpoint(tmp_path):
    state = str(tmp_path / "state.json")
    with pytest.raises(SearchBudgetExceeded):
        explore_exhaustive(3, state_path=state, time_budget=1e-9, checkpoint_every=20)
    saved = json.loads(open(state).read())
    assert saved["cursor"] == 20 and not saved["complete"]
    resumed = explore_exhaustive(3, state_path=state)
    fresh = explore_exhaustive(3)
    assert resumed.complete
    assert (resumed.classes_seen, resumed.canonical_classes, resumed.histogram) == \
        (fresh.classes_seen, fresh.canonical_classes, fresh.histogram)
    # a finished state file is returned as is
    assert explore_exhaustive(3, state_path=state).cursor == resumed.cursor


def test_state_for_other_parameters_is_ignored(tmp_path):
    state = str(tmp_path / "state.json")
    explore_exhaustive(2, state_path=state)
    report = explore_exhaustive(2, max_size=2, state_path=state)
    assert report.classes_seen == 4 + 6


def test_domain_limit():
    with pytest.raises(ValueError):
        explore_exhaustive(4)


def test_sample_reproducible():
    a = explore_sample(3, 300, seed=5)
    b = explore_sample(3, 300, seed=5)
    assert a.to_json() == b.to_json()
    assert a.classes_seen == 300 and a.canonical_classes <= 79
    assert a.violations == []


def test_report_round_trip():
    report = explore_exhaustive(2)
    again = ExploreReport.from_json(report.to_json())
    assert again == report
    text = report.to_text()
    assert "NCTD > VCD instances: 0" in text and "complete: yes" in text
