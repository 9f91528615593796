"""Pattern-aware graph mining.

Patterns are small graphs with optional labels, anti-edges and anti-vertices.
Each pattern is compiled into an exploration plan (symmetry-breaking partial
order, core, matching orders) and the matcher walks the data graph guided by
that plan, so no match is ever produced twice and no isomorphism test is run
while matching.
"""

from __future__ import annotations

from .aggregation import Aggregator, DomainMap, domain_insert, frequency_check, mni_support
from .apps import (
    ConfigurationError,
    cc_bound,
    clique_count,
    exists,
    exists_clique,
    fsm,
    motif_count,
    motif_name,
    pattern_match,
)
from .datagraph import DataGraph, GraphFormatError, load_graph, load_snapshot, save_snapshot
from .matcher import Control, Match, MatcherStats, count, match_all
from .pattern import (
    Pattern,
    PatternConstraintError,
    PatternError,
    PatternValidationError,
    UnsupportedSizeError,
    canonical_code,
    extend,
    generate_all_edge_induced,
    generate_all_vertex_induced,
    generate_chain,
    generate_clique,
    generate_special,
    generate_star,
    load_patterns,
    parse_patterns,
)
from .plan import ExplorationPlan, explain_plan, generate_plan

__version__ = "0.1.0"

__all__ = [
    "Aggregator",
    "DomainMap",
    "domain_insert",
    "frequency_check",
    "mni_support",
    "ConfigurationError",
    "cc_bound",
    "clique_count",
    "exists",
    "exists_clique",
    "fsm",
    "motif_count",
    "motif_name",
    "pattern_match",
    "DataGraph",
    "GraphFormatError",
    "load_graph",
    "load_snapshot",
    "save_snapshot",
    "Control",
    "Match",
    "MatcherStats",
    "count",
    "match_all",
    "Pattern",
    "PatternConstraintError",
    "PatternError",
    "PatternValidationError",
    "UnsupportedSizeError",
    "canonical_code",
    "extend",
    "generate_all_edge_induced",
    "generate_all_vertex_induced",
    "generate_chain",
    "generate_clique",
    "generate_special",
    "generate_star",
    "load_patterns",
    "parse_patterns",
    "ExplorationPlan",
    "explain_plan",
    "generate_plan",
]
