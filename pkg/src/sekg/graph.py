"""Typed in-memory property graph with provenance tracking.

Nodes carry a concept, optional scenario membership, taxonomy labels and
string properties. Edges are unique per (src, relation, dst) and record
whether they were asserted by a dataset or produced by an inference rule.
All iteration orders are sorted so downstream output is reproducible.
"""

import bisect
from dataclasses import dataclass, field
from enum import Enum

from .errors import GraphError, SchemaError
from .schema import DEFAULT_SCHEMA, OntologySchema

#: Relations rendered red in exports and traversed by the attack-path oracle.
RED_RELATIONS = frozenset(
    {"craft_and_perform", "apply_to", "to_exploit", "have_vul", "bring_out"}
)

ASSERTED = None


class Direction(Enum):
    OUT = "out"
    IN = "in"
    UNDIRECTED = "undirected"


@dataclass(frozen=True)
class Node:
    id: str
    concept: str
    scenario_id: int | None = None
    taxonomy_labels: tuple[str, ...] = ()
    properties: dict[str, str] = field(default_factory=dict)
    comment: str = ""

    def property(self, key: str) -> str | None:
        """Property lookup with pseudo-fields id, concept and scenario_id."""
        if key == "id":
            return self.id
        if key == "concept":
            return self.concept
        if key == "scenario_id":
            return None if self.scenario_id is None else str(self.scenario_id)
        return self.properties.get(key)


@dataclass(frozen=True)
class Edge:
    src: str
    relation: str
    dst: str
    rule: str | None = ASSERTED

    @property
    def is_inferred(self) -> bool:
        return self.rule is not None

    @property
    def provenance(self) -> str:
        return "asserted" if self.rule is None else f"inferred:{self.rule}"

    def key(self) -> tuple[str, str, str]:
        return (self.src, self.relation, self.dst)


class KnowledgeGraph:
    """Mutable-until-frozen store of nodes, edges and scenario declarations."""

    def __init__(self, schema: OntologySchema | None = None):
        self.schema = schema or DEFAULT_SCHEMA
        self._nodes: dict[str, Node] = {}
        self._edges: dict[tuple[str, str, str], Edge] = {}
        self._out: dict[str, dict[str, list[str]]] = {}
        self._in: dict[str, dict[str, list[str]]] = {}
        self._scenarios: dict[int, str] = {}
        self._frozen = False

    # -- scenario registry ------------------------------------------------

    def register_scenario(self, scenario_id: int, attack_type: str) -> None:
        self._check_mutable()
        existing = self._scenarios.get(scenario_id)
        if existing is not None and existing != attack_type:
            raise GraphError(
                f"scenario {scenario_id} already registered with type {existing!r}"
            )
        self._scenarios[scenario_id] = attack_type

    @property
    def scenarios(self) -> dict[int, str]:
        return dict(self._scenarios)

    def scenario_ids(self) -> tuple[int, ...]:
        return tuple(sorted(self._scenarios))

    def attack_types(self) -> frozenset[str]:
        return frozenset(self._scenarios.values())

    # -- nodes -------------------------------------------------------------

    def add_node(self, node: Node) -> Node:
        """Insert a node. Re-adding an identical node is a no-op."""
        self._check_mutable()
        concept = self.schema.concept(node.concept)
        if concept.name != node.concept:
            node = Node(
                node.id, concept.name, node.scenario_id,
                node.taxonomy_labels, node.properties, node.comment,
            )
        for label in node.taxonomy_labels:
            if label not in concept.taxonomy_labels:
                raise GraphError(
                    f"node {node.id!r}: label {label!r} not allowed on {concept.name}"
                )
        if node.scenario_id is not None and node.scenario_id not in self._scenarios:
            raise GraphError(
                f"node {node.id!r}: scenario {node.scenario_id} not declared"
            )
        existing = self._nodes.get(node.id)
        if existing is not None:
            if existing == node:
                return existing
            raise GraphError(f"node {node.id!r} already exists with different content")
        self._nodes[node.id] = node
        return node

    def node(self, node_id: str) -> Node:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise GraphError(f"unknown node: {node_id!r}") from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self._nodes

    def nodes(self) -> tuple[Node, ...]:
        return tuple(self._nodes[i] for i in sorted(self._nodes))

    def node_ids(self) -> tuple[str, ...]:
        return tuple(sorted(self._nodes))

    def nodes_by_concept(self, concept: str) -> tuple[Node, ...]:
        name = self.schema.concept(concept).name
        return tuple(n for n in self.nodes() if n.concept == name)

    @property
    def node_count(self) -> int:
        return len(self._nodes)

    # -- edges -------------------------------------------------------------

    def add_edge(
        self, src: str, relation: str, dst: str, rule: str | None = ASSERTED
    ) -> Edge:
        """Insert an edge after normalizing aliases and checking conformance.

        Duplicate insertion is a no-op returning the existing edge (first
        insertion wins, including its provenance).
        """
        self._check_mutable()
        relation, swapped = self.schema.normalize_relation(relation)
        if swapped:
            src, dst = dst, src
        src_node = self.node(src)
        dst_node = self.node(dst)
        rel = self.schema.relation(relation)
        if rel.irreflexive and src == dst:
            raise GraphError(f"{relation} is irreflexive; got self-loop on {src!r}")
        verdict = self.schema.check_edge_conformance(
            src_node.concept, relation, dst_node.concept
        )
        if not verdict:
            raise GraphError(f"edge ({src}, {relation}, {dst}): {verdict.reason}")
        key = (src, relation, dst)
        if key in self._edges:
            return self._edges[key]
        edge = Edge(src, relation, dst, rule)
        self._edges[key] = edge
        bisect.insort(self._out.setdefault(relation, {}).setdefault(src, []), dst)
        bisect.insort(self._in.setdefault(relation, {}).setdefault(dst, []), src)
        return edge

    def has_edge(self, src: str, relation: str, dst: str) -> bool:
        return (src, relation, dst) in self._edges

    def edge(self, src: str, relation: str, dst: str) -> Edge:
        try:
            return self._edges[(src, relation, dst)]
        except KeyError:
            raise GraphError(f"unknown edge: ({src}, {relation}, {dst})") from None

    def edges(self, relation: str | None = None) -> tuple[Edge, ...]:
        items = self._edges.values()
        if relation is not None:
            items = (e for e in items if e.relation == relation)
        return tuple(sorted(items, key=Edge.key))

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def relations_in_use(self) -> tuple[str, ...]:
        return tuple(sorted({e.relation for e in self._edges.values()}))

    # -- traversal ---------------------------------------------------------

    def neighbors(
        self,
        node_id: str,
        relation: str,
        direction: Direction = Direction.OUT,
        lifted: bool = False,
    ) -> tuple[str, ...]:
        """Adjacent node ids over one relation.

        With ``lifted`` the declared subproperties of ``relation`` are
        traversed as well (e.g. motivate edges plus incent and drive edges).
        """
        self.node(node_id)
        names = [self.schema.relation(relation).name]
        if lifted:
            names.extend(self.schema.sub_relations(relation))
        found: set[str] = set()
        for name in names:
            if direction in (Direction.OUT, Direction.UNDIRECTED):
                found.update(self._out.get(name, {}).get(node_id, ()))
            if direction in (Direction.IN, Direction.UNDIRECTED):
                found.update(self._in.get(name, {}).get(node_id, ()))
        return tuple(sorted(found))

    def red_neighbors(self, node_id: str) -> tuple[tuple[str, str, bool], ...]:
        """Undirected red-relation adjacency: (other, relation, forward)."""
        out: list[tuple[str, str, bool]] = []
        for rel in sorted(RED_RELATIONS):
            for other in self._out.get(rel, {}).get(node_id, ()):
                out.append((other, rel, True))
            for other in self._in.get(rel, {}).get(node_id, ()):
                out.append((other, rel, False))
        return tuple(out)

    @property
    def red_relations(self) -> frozenset[str]:
        return RED_RELATIONS

    # -- scenario views ------------------------------------------------------

    def scenario_nodes(self, scenario_id: int) -> tuple[Node, ...]:
        return tuple(
            n for n in self.nodes() if n.scenario_id == scenario_id
        )

    def scenario_subgraph(self, scenario_id: int) -> "KnowledgeGraph":
        """Frozen induced subgraph for one scenario.

        Includes the scenario-tagged nodes, vocabulary nodes one hop away,
        and the mechanisms reachable from those vulnerabilities through
        take_effected_by (mechanisms sit two hops from any tagged node).
        """
        if scenario_id not in self._scenarios:
            raise GraphError(f"scenario {scenario_id} not declared")
        keep: set[str] = {n.id for n in self.scenario_nodes(scenario_id)}
        hop: set[str] = set()
        for edge in self._edges.values():
            if edge.src in keep and self._nodes[edge.dst].scenario_id is None:
                hop.add(edge.dst)
            if edge.dst in keep and self._nodes[edge.src].scenario_id is None:
                hop.add(edge.src)
        keep |= hop
        for vul in sorted(hop):
            if self._nodes[vul].concept == "HumanVulnerability":
                keep.update(self.neighbors(vul, "take_effected_by"))
        sub = KnowledgeGraph(self.schema)
        sub._scenarios = {scenario_id: self._scenarios[scenario_id]}
        for node_id in sorted(keep):
            sub._nodes[node_id] = self._nodes[node_id]
        for key, edge in sorted(self._edges.items()):
            if edge.src in keep and edge.dst in keep:
                sub._edges[key] = edge
                bisect.insort(
                    sub._out.setdefault(edge.relation, {}).setdefault(edge.src, []),
                    edge.dst,
                )
                bisect.insort(
                    sub._in.setdefault(edge.relation, {}).setdefault(edge.dst, []),
                    edge.src,
                )
        sub._frozen = True
        return sub

    # -- lifecycle -----------------------------------------------------------

    def freeze(self) -> "KnowledgeGraph":
        self._frozen = True
        return self

    @property
    def frozen(self) -> bool:
        return self._frozen

    def _check_mutable(self) -> None:
        if self._frozen:
            raise GraphError("graph is frozen")

    def copy(self) -> "KnowledgeGraph":
        """Unfrozen deep-enough copy (nodes and edges are immutable values)."""
        dup = KnowledgeGraph(self.schema)
        dup._scenarios = dict(self._scenarios)
        dup._nodes = dict(self._nodes)
        dup._edges = dict(self._edges)
        dup._out = {r: {s: list(v) for s, v in m.items()} for r, m in self._out.items()}
        dup._in = {r: {s: list(v) for s, v in m.items()} for r, m in self._in.items()}
        return dup

    def rebuilt_indexes(self) -> tuple[dict, dict]:
        """Adjacency maps recomputed from scratch (for consistency checks)."""
        out: dict[str, dict[str, list[str]]] = {}
        inc: dict[str, dict[str, list[str]]] = {}
        for edge in sorted(self._edges.values(), key=Edge.key):
            out.setdefault(edge.relation, {}).setdefault(edge.src, []).append(edge.dst)
            inc.setdefault(edge.relation, {}).setdefault(edge.dst, []).append(edge.src)
        for m in (*out.values(), *inc.values()):
            for v in m.values():
                v.sort()
        return out, inc

    def index_state(self) -> tuple[dict, dict]:
        return self._out, self._in
