"""Knowledge graph toolkit for social engineering attack scenarios."""

from .analytics import (
    AttackPath,
    End,
    EvalMetrics,
    RankedCount,
    ThreatPair,
    alternate_methods_for_target,
    attack_paths_between,
    enumerate_oracle_paths,
    evaluate_pattern,
    oracle_quads,
    oracle_triples,
    oracle_victim_pairs,
    potential_targets_for_attacker,
    potential_threats_for_victim,
    ranked_usage,
    same_origin_report,
    scenario_report,
    summarize_oracle,
)
from .catalog import DEFAULT_CATALOG, Catalog, default_catalog
from .datasets import canonical_graph, canonical_text, load_canonical
from .errors import (
    DatasetError,
    GraphError,
    QueryParseError,
    RuleError,
    SchemaError,
    SekgError,
)
from .graph import RED_RELATIONS, Direction, Edge, KnowledgeGraph, Node
from .inference import (
    Atom,
    AtomKind,
    InferenceResult,
    Rule,
    axiom_closure,
    builtin_ruleset,
    run_inference,
    run_rules,
)
from .loader import (
    Finding,
    LoadResult,
    load_dataset,
    serialize_dataset,
    validate_scenario_completeness,
)
from .query import (
    BindingRow,
    PatternQuery,
    evaluate_query,
    format_query,
    parse_query,
    run_query,
)
from .schema import DEFAULT_SCHEMA, OntologySchema

__version__ = "0.1.0"

__all__ = [
    "Atom",
    "AtomKind",
    "AttackPath",
    "BindingRow",
    "Catalog",
    "DEFAULT_CATALOG",
    "DEFAULT_SCHEMA",
    "DatasetError",
    "Direction",
    "Edge",
    "End",
    "EvalMetrics",
    "Finding",
    "GraphError",
    "InferenceResult",
    "KnowledgeGraph",
    "LoadResult",
    "Node",
    "OntologySchema",
    "PatternQuery",
    "QueryParseError",
    "RED_RELATIONS",
    "RankedCount",
    "Rule",
    "RuleError",
    "SchemaError",
    "SekgError",
    "ThreatPair",
    "alternate_methods_for_target",
    "attack_paths_between",
    "axiom_closure",
    "builtin_ruleset",
    "canonical_graph",
    "canonical_text",
    "default_catalog",
    "enumerate_oracle_paths",
    "evaluate_pattern",
    "evaluate_query",
    "format_query",
    "load_canonical",
    "load_dataset",
    "oracle_quads",
    "oracle_triples",
    "oracle_victim_pairs",
    "parse_query",
    "potential_targets_for_attacker",
    "potential_threats_for_victim",
    "ranked_usage",
    "run_inference",
    "run_query",
    "run_rules",
    "same_origin_report",
    "scenario_report",
    "serialize_dataset",
    "summarize_oracle",
    "validate_scenario_completeness",
    "__version__",
]
