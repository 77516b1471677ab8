"""Exact teaching-dimension computations for finite concept classes.

Covers classical teaching sets, preference-based teaching, no-clash
teaching (NCTD, NCTD+, ANCTD), non-clashing bipartite matchings and the
3-SAT gadget reduction behind their hardness.
"""

from .classic import td, td_concept, verify_teaching_set
from .concepts import (
    Concept,
    ConceptClass,
    Sample,
    free_combination,
    intro_cycle_class,
    load_class,
    powerset,
    remove_empty,
    vc_dimension,
    warmuth_class,
)
from .errors import SearchBudgetExceeded, TeachkitError
from .matching import BipartiteGraph, Matching, nc_matching, nctdplus_eq_1
from .nctd import TeacherMap, anctd_exact, bounds, is_non_clashing, nctd_exact
from .pbtd import pbtd, pbtd_le_k, rtd_peel

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph", "Concept", "ConceptClass", "Matching", "Sample",
    "SearchBudgetExceeded", "TeacherMap", "TeachkitError",
    "anctd_exact", "bounds", "free_combination", "intro_cycle_class",
    "is_non_clashing", "load_class", "nc_matching", "nctd_exact",
    "nctdplus_eq_1", "pbtd", "pbtd_le_k", "powerset", "remove_empty",
    "rtd_peel", "td", "td_concept", "vc_dimension", "verify_teaching_set",
    "warmuth_class",
]
