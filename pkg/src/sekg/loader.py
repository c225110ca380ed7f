"""Line-oriented dataset format: parse, validate, serialize.

A dataset is a sequence of records, one per line:

    # comment (ignored; blank lines too)
    SCENARIO <int> type="<attack-type-tag>"
    NODE <id> <Concept> [key=value]...
    EDGE <src> <relation> <dst> [inferred=<rule>]

Values containing whitespace are double-quoted; ``\\"`` and ``\\\\`` escape a
quote and a backslash inside quoted values. Reserved node keys: ``scenario``
(membership, integer), ``labels`` (comma-separated taxonomy labels) and
``comment``; every other key lands in the node's property map. Every NODE
must precede the first EDGE that references it.

Known vocabulary nodes are enriched on load: category labels and synonyms
come from the catalog, and a ``kind`` property ties specialized nodes (for
example per-scenario methods, or concrete real-world mediums) back to a
catalog term. Unresolved vocabulary references are warnings by default and
errors in strict mode.
"""

import re
from dataclasses import dataclass, field

from .catalog import DEFAULT_CATALOG, Catalog
from .errors import DatasetError, GraphError, SchemaError
from .graph import KnowledgeGraph, Node
from .schema import DEFAULT_SCHEMA, OntologySchema

_KEY_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_BARE_VALUE_RE = re.compile(r"[A-Za-z0-9_.@:/+-]+$")

#: Concepts whose instances belong to exactly one scenario.
SCENARIO_CONCEPTS = frozenset(
    {
        "Attacker",
        "AttackMethod",
        "AttackTarget",
        "AttackGoal",
        "SubGoal",
        "AttackConsequence",
        "AttackStrategy",
        "SocialEngineeringInformation",
    }
)

#: Shared vocabulary concepts; instances never carry a scenario.
VOCABULARY_CONCEPTS = frozenset(
    {
        "HumanVulnerability",
        "EffectMechanism",
        "AttackMotivation",
        "AttackMedium",
        "CommonSkill",
        "AuxiliaryTrick",
    }
)

MANDATORY_ROLES = (
    "Attacker",
    "AttackMotivation",
    "AttackMethod",
    "AttackTarget",
    "AttackGoal",
    "AttackMedium",
    "HumanVulnerability",
    "EffectMechanism",
    "AttackConsequence",
)

ADVISORY_ROLES = ("AttackStrategy", "SocialEngineeringInformation")


@dataclass(frozen=True)
class ScenarioRecord:
    line: int
    scenario_id: int
    attack_type: str


@dataclass(frozen=True)
class NodeRecord:
    line: int
    node_id: str
    concept: str
    scenario: int | None
    labels: tuple[str, ...]
    properties: dict[str, str]
    comment: str


@dataclass(frozen=True)
class EdgeRecord:
    line: int
    src: str
    relation: str
    dst: str
    rule: str | None


Record = ScenarioRecord | NodeRecord | EdgeRecord


@dataclass(frozen=True)
class DatasetDocument:
    source: str
    records: tuple[Record, ...]


@dataclass(frozen=True)
class Finding:
    scenario_id: int
    severity: str  # "mandatory" | "advisory"
    role: str
    message: str


@dataclass
class LoadResult:
    graph: KnowledgeGraph
    warnings: list[str] = field(default_factory=list)
    document: DatasetDocument | None = None


def _split_fields(line: str, lineno: int) -> list[str]:
    """Split a record line into whitespace-separated fields, honoring quotes."""
    fields: list[str] = []
    buf: list[str] = []
    i = 0
    in_quotes = False
    while i < len(line):
        ch = line[i]
        if in_quotes:
            if ch == "\\":
                if i + 1 >= len(line) or line[i + 1] not in '"\\':
                    raise DatasetError("bad escape in quoted value", lineno)
                buf.append(line[i + 1])
                i += 2
                continue
            if ch == '"':
                in_quotes = False
                i += 1
                continue
            buf.append(ch)
        elif ch == '"':
            in_quotes = True
            buf.append("\x00")  # marks "was quoted" so empty values survive
            i += 1
            continue
        elif ch.isspace():
            if buf:
                fields.append("".join(buf))
                buf = []
        else:
            buf.append(ch)
        i += 1
    if in_quotes:
        raise DatasetError("unterminated quoted value", lineno)
    if buf:
        fields.append("".join(buf))
    return fields


def _parse_kv(fields: list[str], lineno: int) -> dict[str, str]:
    out: dict[str, str] = {}
    for f in fields:
        key, sep, value = f.partition("=")
        key = key.replace("\x00", "")
        if not sep or not _KEY_RE.match(key):
            raise DatasetError(f"expected key=value, got {f.replace(chr(0), '')!r}", lineno)
        if key in out:
            raise DatasetError(f"duplicate key {key!r}", lineno)
        out[key] = value.replace("\x00", "")
    return out


def parse_document(text: str, source: str = "<string>") -> DatasetDocument:
    """Parse dataset text into records without building a graph."""
    records: list[Record] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = _split_fields(line, lineno)
        tag, rest = fields[0], fields[1:]
        if tag == "SCENARIO":
            if len(rest) < 1:
                raise DatasetError("SCENARIO needs an integer id", lineno)
            try:
                sid = int(rest[0])
            except ValueError:
                raise DatasetError(f"bad scenario id {rest[0]!r}", lineno) from None
            kv = _parse_kv(rest[1:], lineno)
            attack_type = kv.pop("type", "")
            if not attack_type:
                raise DatasetError("SCENARIO needs a type=\"...\" tag", lineno)
            if kv:
                raise DatasetError(f"unknown SCENARIO keys: {sorted(kv)}", lineno)
            records.append(ScenarioRecord(lineno, sid, attack_type))
        elif tag == "NODE":
            if len(rest) < 2:
                raise DatasetError("NODE needs an id and a concept", lineno)
            node_id, concept = rest[0], rest[1]
            kv = _parse_kv(rest[2:], lineno)
            scenario: int | None = None
            if "scenario" in kv:
                try:
                    scenario = int(kv.pop("scenario"))
                except ValueError:
                    raise DatasetError("scenario= must be an integer", lineno) from None
            labels = tuple(
                s for s in (x.strip() for x in kv.pop("labels", "").split(",")) if s
            )
            comment = kv.pop("comment", "")
            records.append(
                NodeRecord(lineno, node_id, concept, scenario, labels, kv, comment)
            )
        elif tag == "EDGE":
            if len(rest) < 3:
                raise DatasetError("EDGE needs src, relation and dst", lineno)
            src, relation, dst = rest[0], rest[1], rest[2]
            kv = _parse_kv(rest[3:], lineno)
            rule = kv.pop("inferred", None)
            if kv:
                raise DatasetError(f"unknown EDGE keys: {sorted(kv)}", lineno)
            records.append(EdgeRecord(lineno, src, relation, dst, rule))
        else:
            raise DatasetError(f"unknown record tag {tag!r}", lineno)
    return DatasetDocument(source, tuple(records))


def _enrich_node(
    rec: NodeRecord,
    concept: str,
    catalog: Catalog,
    strict: bool,
    warnings: list[str],
) -> tuple[tuple[str, ...], dict[str, str]]:
    """Resolve a node against the catalog; return merged labels/properties."""
    labels = set(rec.labels)
    props = dict(rec.properties)

    def unresolved(what: str) -> None:
        msg = f"line {rec.line}: {what}"
        if strict:
            raise DatasetError(what, rec.line)
        warnings.append(msg)

    entry = None
    vocab = catalog.vocabulary_for_concept(concept)
    if vocab is not None:
        entry = catalog.lookup(vocab, rec.node_id)
        if entry is None:
            kind = props.get("kind")
            if kind is not None and catalog.lookup(vocab, kind) is not None:
                entry = catalog.lookup(vocab, kind)
            else:
                unresolved(
                    f"{concept} node {rec.node_id!r} is not a catalog term"
                )
    kind_vocab = catalog.kind_vocabulary_for_concept(concept)
    kind = props.get("kind")
    if kind_vocab is not None and kind is not None:
        kind_entry = catalog.lookup(kind_vocab, kind)
        if kind_entry is None:
            unresolved(f"kind {kind!r} on {rec.node_id!r} is not a catalog term")
        elif concept == "AttackMethod":
            labels.update(kind_entry.labels)
    if entry is not None:
        if entry.category is not None:
            labels.add(entry.category)
        labels.update(entry.labels)
        if entry.synonyms and entry.ident == rec.node_id and "synonyms" not in props:
            props["synonyms"] = ",".join(entry.synonyms)
    return tuple(sorted(labels)), props


def load_dataset(
    text: str,
    source: str = "<string>",
    strict_vocab: bool = False,
    schema: OntologySchema | None = None,
    catalog: Catalog | None = None,
) -> LoadResult:
    """Parse dataset text and build a validated knowledge graph."""
    schema = schema or DEFAULT_SCHEMA
    catalog = catalog or DEFAULT_CATALOG
    document = parse_document(text, source)
    graph = KnowledgeGraph(schema)
    warnings: list[str] = []

    seen_scenarios: set[int] = set()
    for rec in document.records:
        if isinstance(rec, ScenarioRecord):
            if rec.scenario_id in seen_scenarios:
                raise DatasetError(
                    f"duplicate scenario id {rec.scenario_id}", rec.line
                )
            seen_scenarios.add(rec.scenario_id)
            graph.register_scenario(rec.scenario_id, rec.attack_type)
        elif isinstance(rec, NodeRecord):
            try:
                concept = schema.concept(rec.concept).name
            except SchemaError as exc:
                raise DatasetError(str(exc), rec.line) from None
            if concept in VOCABULARY_CONCEPTS and rec.scenario is not None:
                raise DatasetError(
                    f"vocabulary node {rec.node_id!r} must not carry scenario=",
                    rec.line,
                )
            if concept in SCENARIO_CONCEPTS and rec.scenario is None:
                raise DatasetError(
                    f"{concept} node {rec.node_id!r} needs scenario=", rec.line
                )
            labels, props = _enrich_node(rec, concept, catalog, strict_vocab, warnings)
            try:
                graph.add_node(
                    Node(rec.node_id, concept, rec.scenario, labels, props, rec.comment)
                )
            except GraphError as exc:
                raise DatasetError(str(exc), rec.line) from None
        else:
            try:
                graph.add_edge(rec.src, rec.relation, rec.dst, rule=rec.rule)
            except (GraphError, SchemaError) as exc:
                raise DatasetError(str(exc), rec.line) from None
    return LoadResult(graph, warnings, document)


def parse_dataset(
    text: str,
    source: str = "<string>",
    strict_vocab: bool = False,
    schema: OntologySchema | None = None,
    catalog: Catalog | None = None,
) -> KnowledgeGraph:
    """Convenience wrapper around :func:`load_dataset` returning the graph."""
    return load_dataset(text, source, strict_vocab, schema, catalog).graph


def _format_value(value: str) -> str:
    if value and _BARE_VALUE_RE.match(value):
        return value
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


def serialize_dataset(graph: KnowledgeGraph, include_inferred: bool = False) -> str:
    """Render a graph back to dataset text.

    Scenario records come first (by id), then nodes (by id), then edges by
    (src, relation, dst); output is deterministic and reparses to an equal
    graph. Inferred edges are skipped unless ``include_inferred`` is set, in
    which case they carry an ``inferred=<rule>`` marker.
    """
    lines: list[str] = []
    for sid in graph.scenario_ids():
        lines.append(f"SCENARIO {sid} type={_format_value(graph.scenarios[sid])}")
    for node in graph.nodes():
        parts = [f"NODE {node.id} {node.concept}"]
        if node.scenario_id is not None:
            parts.append(f"scenario={node.scenario_id}")
        if node.taxonomy_labels:
            parts.append(f"labels={_format_value(','.join(sorted(node.taxonomy_labels)))}")
        for key in sorted(node.properties):
            parts.append(f"{key}={_format_value(node.properties[key])}")
        if node.comment:
            parts.append(f"comment={_format_value(node.comment)}")
        lines.append(" ".join(parts))
    for edge in graph.edges():
        if edge.is_inferred and not include_inferred:
            continue
        line = f"EDGE {edge.src} {edge.relation} {edge.dst}"
        if edge.is_inferred:
            line += f" inferred={_format_value(edge.rule)}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def validate_scenario_completeness(graph: KnowledgeGraph) -> list[Finding]:
    """Check each declared scenario for required participant roles.

    Mandatory roles missing from a scenario's subgraph produce mandatory
    findings; missing strategy or gathered-information nodes are advisory.
    """
    findings: list[Finding] = []
    for sid in graph.scenario_ids():
        present = {n.concept for n in graph.scenario_subgraph(sid).nodes()}
        for role in MANDATORY_ROLES:
            if role not in present:
                findings.append(
                    Finding(sid, "mandatory", role, f"scenario {sid} has no {role}")
                )
        for role in ADVISORY_ROLES:
            if role not in present:
                findings.append(
                    Finding(sid, "advisory", role, f"scenario {sid} has no {role}")
                )
    return findings
