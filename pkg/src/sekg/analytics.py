"""Analysis patterns, the path oracle, and the evaluation harness.

All operations are read-only and deterministic: identical graphs produce
identical (and identically ordered) results.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .graph import Direction, KnowledgeGraph

ORACLE_MAX_EDGES = 8


class End(Enum):
    """Which endpoint of an edge a ranking groups by."""

    SRC = "src"
    DST = "dst"


@dataclass(frozen=True)
class RankedCount:
    id: str
    count: int
    rank: int


@dataclass(frozen=True)
class ThreatPair:
    """One (attacker, method, victim) threat with its evidence."""

    attacker: str
    method: str
    victim: str
    shared_vulnerabilities: frozenset[str]
    origin_scenarios: tuple[int, int]


@dataclass(frozen=True)
class AttackPath:
    """Simple path over red relations from an attacker to a victim.

    ``steps[i]`` holds ``(relation, forward)`` for the hop between
    ``nodes[i]`` and ``nodes[i + 1]``; ``forward`` is False when the stored
    edge points against the direction of travel.
    """

    nodes: tuple[str, ...]
    steps: tuple[tuple[str, bool], ...]

    def describe(self) -> str:
        out = [self.nodes[0]]
        for (relation, forward), node in zip(self.steps, self.nodes[1:]):
            arrow = f"-{relation}->" if forward else f"<-{relation}-"
            out.append(arrow)
            out.append(node)
        return " ".join(out)

    @property
    def length(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class EvalMetrics:
    true_positives: int
    false_positives: int
    omitted: int
    precision: float
    recall: float
    f1: float


def ranked_usage(
    graph: KnowledgeGraph, relation: str, count_end: End, k: int
) -> list[RankedCount]:
    """Rank the nodes of one edge endpoint by how many edges they carry.

    Competition ranking: tied counts share a rank and are ordered by id. The
    result keeps every item whose rank is <= ``k``, so a tie straddling the
    boundary is returned whole rather than cut arbitrarily.
    """
    canonical, swapped = graph.schema.normalize_relation(relation)
    if swapped:
        count_end = End.DST if count_end is End.SRC else End.SRC
    counts: dict[str, int] = {}
    for edge in graph.edges(canonical):
        key = edge.src if count_end is End.SRC else edge.dst
        counts[key] = counts.get(key, 0) + 1
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    out: list[RankedCount] = []
    for node_id, count in ordered:
        rank = 1 + sum(1 for _, c in ordered if c > count)
        if rank > k:
            break
        out.append(RankedCount(node_id, count, rank))
    return out


def _exploits(graph: KnowledgeGraph, method: str) -> frozenset[str]:
    return frozenset(graph.neighbors(method, "to_exploit"))


def _vulnerabilities(graph: KnowledgeGraph, victim: str) -> frozenset[str]:
    return frozenset(graph.neighbors(victim, "have_vul"))


def potential_threats_for_victim(
    graph: KnowledgeGraph, victim_id: str
) -> list[ThreatPair]:
    """Out-of-scenario (attacker, method) pairs exploiting the victim's flaws.

    One ThreatPair per distinct pair, carrying every vulnerability of the
    victim that the method exploits. The victim's own scenario is excluded.
    """
    victim = graph.node(victim_id)
    vuls = _vulnerabilities(graph, victim_id)
    pairs: dict[tuple[str, str], frozenset[str]] = {}
    scenarios: dict[tuple[str, str], int | None] = {}
    for edge in graph.edges("craft_and_perform"):
        method_node = graph.node(edge.dst)
        if method_node.scenario_id == victim.scenario_id:
            continue
        shared = _exploits(graph, edge.dst) & vuls
        if not shared:
            continue
        pairs[(edge.src, edge.dst)] = shared
        scenarios[(edge.src, edge.dst)] = graph.node(edge.src).scenario_id
    out = []
    for attacker, method in sorted(pairs):
        out.append(
            ThreatPair(
                attacker,
                method,
                victim_id,
                pairs[(attacker, method)],
                (scenarios[(attacker, method)] or 0, victim.scenario_id or 0),
            )
        )
    return out


def potential_targets_for_attacker(
    graph: KnowledgeGraph, attacker_id: str
) -> list[ThreatPair]:
    """Out-of-scenario victims vulnerable to any of the attacker's methods.

    Deduplicated by victim: each pair reports the attacker's own method
    sharing the most vulnerabilities with that victim (ties resolved by
    method id). Alternate same-scenario methods of the victim are provided
    separately by :func:`alternate_methods_for_target`.
    """
    attacker = graph.node(attacker_id)
    methods = graph.neighbors(attacker_id, "craft_and_perform")
    exploit_sets = {m: _exploits(graph, m) for m in methods}
    out = []
    for victim in graph.nodes_by_concept("AttackTarget"):
        if victim.scenario_id == attacker.scenario_id:
            continue
        vuls = _vulnerabilities(graph, victim.id)
        best: tuple[int, str] | None = None
        for method in methods:
            shared = exploit_sets[method] & vuls
            if shared and (best is None or (-len(shared), method) < best):
                best = (-len(shared), method)
        if best is None:
            continue
        method = best[1]
        out.append(
            ThreatPair(
                attacker_id,
                method,
                victim.id,
                exploit_sets[method] & vuls,
                (attacker.scenario_id or 0, victim.scenario_id or 0),
            )
        )
    out.sort(key=lambda pair: pair.victim)
    return out


def alternate_methods_for_target(
    graph: KnowledgeGraph, attacker_id: str, victim_id: str
) -> tuple[str, ...]:
    """Victim-scenario methods exploiting flaws the attacker can also reach."""
    victim = graph.node(victim_id)
    reachable = frozenset(
        hv
        for method in graph.neighbors(attacker_id, "craft_and_perform")
        for hv in _exploits(graph, method)
    )
    shared = _vulnerabilities(graph, victim_id) & reachable
    out = []
    for method in graph.nodes_by_concept("AttackMethod"):
        if method.scenario_id != victim.scenario_id:
            continue
        if _exploits(graph, method.id) & shared:
            out.append(method.id)
    return tuple(sorted(out))


def attack_paths_between(
    graph: KnowledgeGraph, attacker_id: str, victim_id: str
) -> tuple[list[AttackPath], list[str]]:
    """Vulnerability-hop paths between one attacker and one victim.

    Returns the paths (attacker -craft_and_perform-> method -to_exploit->
    vulnerability <-have_vul- victim) plus the auxiliary methods: methods
    from other scenarios than the victim's that exploit the victim's
    vulnerabilities but sit on none of the returned paths.
    """
    graph.node(attacker_id)
    victim = graph.node(victim_id)
    vuls = _vulnerabilities(graph, victim_id)
    paths = []
    for method in graph.neighbors(attacker_id, "craft_and_perform"):
        for hv in sorted(_exploits(graph, method) & vuls):
            paths.append(
                AttackPath(
                    (attacker_id, method, hv, victim_id),
                    (
                        ("craft_and_perform", True),
                        ("to_exploit", True),
                        ("have_vul", False),
                    ),
                )
            )
    paths.sort(key=lambda p: p.nodes)
    on_path = {p.nodes[1] for p in paths}
    auxiliary = []
    for method in graph.nodes_by_concept("AttackMethod"):
        if method.scenario_id == victim.scenario_id or method.id in on_path:
            continue
        if _exploits(graph, method.id) & vuls:
            auxiliary.append(method.id)
    return paths, sorted(auxiliary)


def enumerate_oracle_paths(graph: KnowledgeGraph) -> list[AttackPath]:
    """Ground-truth enumeration of red-relation paths attacker -> victim.

    Simple undirected paths over the red relation set, visiting at most one
    node per concept and at most ORACLE_MAX_EDGES edges. The concept
    restriction keeps every path a single attack account (one attacker, one
    method, at most one vulnerability, one victim) instead of letting walks
    weave through unrelated scenarios.
    """
    paths: list[AttackPath] = []

    def walk(
        node_id: str,
        seen_nodes: frozenset[str],
        seen_concepts: frozenset[str],
        nodes: tuple[str, ...],
        steps: tuple[tuple[str, bool], ...],
    ) -> None:
        if graph.node(node_id).concept == "AttackTarget":
            paths.append(AttackPath(nodes, steps))
            return
        if len(steps) >= ORACLE_MAX_EDGES:
            return
        for other, relation, forward in graph.red_neighbors(node_id):
            if other in seen_nodes:
                continue
            concept = graph.node(other).concept
            if concept in seen_concepts:
                continue
            walk(
                other,
                seen_nodes | {other},
                seen_concepts | {concept},
                nodes + (other,),
                steps + ((relation, forward),),
            )

    for attacker in graph.nodes_by_concept("Attacker"):
        walk(
            attacker.id,
            frozenset({attacker.id}),
            frozenset({"Attacker"}),
            (attacker.id,),
            (),
        )
    paths.sort(key=lambda p: p.nodes)
    return paths


def oracle_triples(paths: list[AttackPath]) -> set[tuple[str, str, str]]:
    """(attacker, method, victim) labels projected from oracle paths."""
    return {(p.nodes[0], p.nodes[1], p.nodes[-1]) for p in paths}


def oracle_victim_pairs(paths: list[AttackPath]) -> set[tuple[str, str]]:
    """(attacker, victim) labels projected from oracle paths."""
    return {(p.nodes[0], p.nodes[-1]) for p in paths}


def oracle_quads(paths: list[AttackPath]) -> set[tuple[str, str, str, str]]:
    """(attacker, method, vulnerability, victim) labels from 3-hop paths."""
    return {tuple(p.nodes) for p in paths if p.length == 3}


def summarize_oracle(paths: list[AttackPath]) -> dict[str, int]:
    """Path totals, split by whether the path takes the vulnerability hop."""
    with_hop = sum(1 for p in paths if p.length == 3)
    return {
        "total": len(paths),
        "with_vulnerability_hop": with_hop,
        "direct_apply_to": len(paths) - with_hop,
    }


def evaluate_pattern(
    outputs: set[tuple], labels: set[tuple]
) -> EvalMetrics:
    """Score pattern outputs against oracle labels.

    TP is the intersection, FP the outputs outside the labels, omitted the
    labels never produced. Precision defaults to 1.0 when nothing was
    claimed; recall to 1.0 when nothing was labeled.
    """
    arities = {len(t) for t in outputs} | {len(t) for t in labels}
    if len(arities) > 1:
        raise ValueError(f"tuple schema mismatch: arities {sorted(arities)}")
    tp = len(outputs & labels)
    fp = len(outputs - labels)
    omitted = len(labels - outputs)
    precision = 1.0 if tp + fp == 0 else tp / (tp + fp)
    recall = 1.0 if tp + omitted == 0 else tp / (tp + omitted)
    f1 = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return EvalMetrics(tp, fp, omitted, precision, recall, f1)


def scenario_report(graph: KnowledgeGraph, scenario_id: int) -> dict:
    """Whole-to-part view of one scenario.

    Groups the scenario subgraph's nodes by concept, lists its edges, and
    nests sub-goals under their goals. Group sizes sum to the subgraph's
    node count.
    """
    sub = graph.scenario_subgraph(scenario_id)
    groups: dict[str, list[str]] = {}
    for node in sub.nodes():
        groups.setdefault(node.concept, []).append(node.id)
    for ids in groups.values():
        ids.sort()
    edges = [
        {
            "src": e.src,
            "relation": e.relation,
            "dst": e.dst,
            "provenance": e.provenance,
        }
        for e in sorted(sub.edges(), key=lambda e: e.key())
    ]

    def subtree(goal_id: str) -> dict:
        children = sorted(
            e.src for e in sub.edges("subgoal_of") if e.dst == goal_id
        )
        return {"goal": goal_id, "subgoals": [subtree(c) for c in children]}

    goal_tree = [subtree(n.id) for n in sub.nodes_by_concept("AttackGoal")]
    return {
        "scenario": scenario_id,
        "attack_type": graph.scenarios[scenario_id],
        "node_count": sub.node_count,
        "groups": {concept: groups[concept] for concept in sorted(groups)},
        "edges": edges,
        "goal_tree": goal_tree,
    }


def same_origin_report(graph: KnowledgeGraph) -> dict:
    """Evidence view of the same-origin relations R5, R6 and R7 derive.

    The three relations are symmetric, so each unordered pair is listed
    once, endpoints in id order.
    """

    def pairs(relation: str) -> list[tuple[str, str, str]]:
        seen = set()
        out = []
        for e in graph.edges(relation):
            key = tuple(sorted((e.src, e.dst)))
            if key in seen:
                continue
            seen.add(key)
            out.append((key[0], key[1], e.provenance))
        out.sort()
        return out

    report: dict = {
        "same_affiliation": [],
        "same_origin_attack": [],
        "in_the_same_organization": [],
    }
    for a, b, provenance in pairs("same_affiliation"):
        report["same_affiliation"].append(
            {
                "nodes": [a, b],
                "provenance": provenance,
                "affiliation": graph.node(a).property("affiliation") or "",
            }
        )
    for a, b, provenance in pairs("same_origin_attack"):
        attackers_a = graph.neighbors(a, "craft_and_perform", Direction.IN)
        attackers_b = graph.neighbors(b, "craft_and_perform", Direction.IN)
        shared_motivation = sorted(
            set(
                m
                for attacker in attackers_a
                for m in graph.neighbors(attacker, "motivated_by")
            )
            & set(
                m
                for attacker in attackers_b
                for m in graph.neighbors(attacker, "motivated_by")
            )
        )
        report["same_origin_attack"].append(
            {
                "nodes": [a, b],
                "provenance": provenance,
                "encoded_domain": graph.node(a).property("encoded_domain") or "",
                "shared_motivation": shared_motivation,
            }
        )
    for a, b, provenance in pairs("in_the_same_organization"):
        via = sorted(
            (m1, m2)
            for m1 in graph.neighbors(a, "craft_and_perform")
            for m2 in graph.neighbors(b, "craft_and_perform")
            if graph.has_edge(m1, "same_origin_attack", m2)
        )
        report["in_the_same_organization"].append(
            {
                "nodes": [a, b],
                "provenance": provenance,
                "via_methods": [list(pair) for pair in via],
            }
        )
    return report
