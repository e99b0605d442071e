"""Schema matching workbench.

Computes, filters, and explains correspondences between large schemata,
supports the summarize -> match -> analyze workflow, and emits
decision-maker products: partition statistics, comprehensive vocabulary,
and outer-join spreadsheets.
"""

from .analysis import (
    ClusterResult,
    DistanceMatrix,
    PartitionReport,
    SearchResult,
    Vocabulary,
    VocabularyTerm,
    cluster,
    comprehensive_vocabulary,
    distance_matrix,
    overlap_distance,
    partition,
    search,
)
from .engine import (
    MatchConfig,
    MatchLink,
    MatchMatrix,
    VoterScore,
    VOTER_IDS,
    confidence,
    match,
    merge_votes,
    parse_config,
    vote,
)
from .errors import SchemaMatchError
from .filters import FilterSpec, apply, confidence_filter, node_filter
from .ingest import (
    ParseReport,
    parse_ddl,
    parse_xsd,
    read_canonical,
    write_canonical,
)
from .linguistics import TermBag, stem, term_bag, tokenize
from .model import Node, Schema, SchemaElement, element_count, elements_at_depth, subtree_elements
from .session import (
    ConceptLabel,
    ConceptMatch,
    MatchDecision,
    Session,
    Summary,
    assign_concept,
    derive_concept_matches,
    incremental_match,
    load_session,
    record_decision,
    save_session,
    suggest_concepts,
)

__version__ = "0.1.0"
