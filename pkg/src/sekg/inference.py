"""Forward-chaining inference: axiom closure plus derivation rules.

Axiom closure completes inverse and subproperty edges declared by the
schema (a symmetric relation is its own inverse, so asserting one direction
yields the other). Derivation rules are small conjunctive bodies over
relation atoms, inequality constraints and property-equality constraints;
they run semi-naive until fixpoint with set semantics, so inference is
idempotent and terminates on any finite graph.

Every inferred edge records the name of the rule that produced it; closure
edges use ``R2`` (inverse completion) and ``R3`` (subproperty completion).
Rule emissions that would violate the schema (wrong endpoint concepts, or a
self-loop on an irreflexive relation) are dropped rather than raised: the
body of a rule constrains structure, the schema constrains the head.
"""

from dataclasses import dataclass, field
from enum import Enum

from .errors import GraphError, RuleError
from .graph import Direction, Edge, KnowledgeGraph

INVERSE_RULE = "R2"
SUBPROPERTY_RULE = "R3"


class AtomKind(Enum):
    RELATION = "relation"
    DIFFERENT_FROM = "different_from"
    PROPERTY_EQUALS = "property_equals"


def _is_var(term: str) -> bool:
    return term.startswith("?")


@dataclass(frozen=True)
class Atom:
    """One body or head condition. Terms starting with ``?`` are variables."""

    kind: AtomKind
    terms: tuple[str, str]
    relation: str | None = None
    property_key: str | None = None

    @staticmethod
    def rel(relation: str, a: str, b: str) -> "Atom":
        return Atom(AtomKind.RELATION, (a, b), relation=relation)

    @staticmethod
    def different(a: str, b: str) -> "Atom":
        return Atom(AtomKind.DIFFERENT_FROM, (a, b))

    @staticmethod
    def prop_equals(key: str, a: str, b: str) -> "Atom":
        return Atom(AtomKind.PROPERTY_EQUALS, (a, b), property_key=key)

    def variables(self) -> frozenset[str]:
        return frozenset(t for t in self.terms if _is_var(t))


@dataclass(frozen=True)
class Rule:
    name: str
    body: tuple[Atom, ...]
    head: Atom

    def validate(self) -> None:
        if self.head.kind is not AtomKind.RELATION:
            raise RuleError(f"rule {self.name}: head must be a relation atom")
        bound: frozenset[str] = frozenset()
        for atom in self.body:
            bound |= atom.variables()
        unbound = self.head.variables() - bound
        if unbound:
            raise RuleError(
                f"rule {self.name}: head variables not bound in body: {sorted(unbound)}"
            )


@dataclass
class InferenceResult:
    added: list[Edge] = field(default_factory=list)
    iterations: int = 0
    fired: dict[str, int] = field(default_factory=dict)

    def _record(self, edge: Edge) -> None:
        self.added.append(edge)
        self.fired[edge.rule] = self.fired.get(edge.rule, 0) + 1

    def sorted_added(self) -> list[Edge]:
        return sorted(self.added, key=lambda e: (e.relation, e.src, e.dst))


def builtin_ruleset() -> tuple[Rule, ...]:
    """Derivation rules over the default schema.

    R1 derives attack edges from performed methods; R4 relates attackers
    sharing a motivation and a victim; R5 relates targets with equal
    affiliations; R6 relates methods that share an encoded source domain,
    a common motivation behind their attackers, and victims already known
    to share an affiliation; R7 lifts R6 to the attackers themselves.
    R2/R3 are the axiom-closure passes, not explicit rules.
    """
    return (
        Rule(
            "R1",
            body=(
                Atom.rel("craft_and_perform", "?a", "?am"),
                Atom.rel("apply_to", "?am", "?v"),
            ),
            head=Atom.rel("attack", "?a", "?v"),
        ),
        Rule(
            "R4",
            body=(
                Atom.rel("motivate", "?m", "?a"),
                Atom.rel("attack", "?a", "?v"),
                Atom.rel("motivate", "?m", "?b"),
                Atom.rel("attack", "?b", "?v"),
                Atom.different("?a", "?b"),
            ),
            head=Atom.rel("same_attack_organization", "?a", "?b"),
        ),
        Rule(
            "R5",
            body=(
                Atom.prop_equals("affiliation", "?v1", "?v2"),
                Atom.different("?v1", "?v2"),
            ),
            head=Atom.rel("same_affiliation", "?v1", "?v2"),
        ),
        Rule(
            "R6",
            body=(
                Atom.prop_equals("encoded_domain", "?am1", "?am2"),
                Atom.different("?am1", "?am2"),
                Atom.rel("craft_and_perform", "?a1", "?am1"),
                Atom.rel("craft_and_perform", "?a2", "?am2"),
                Atom.rel("motivated_by", "?a1", "?m"),
                Atom.rel("motivated_by", "?a2", "?m"),
                Atom.rel("attack", "?a1", "?v1"),
                Atom.rel("attack", "?a2", "?v2"),
                Atom.rel("same_affiliation", "?v1", "?v2"),
            ),
            head=Atom.rel("same_origin_attack", "?am1", "?am2"),
        ),
        Rule(
            "R7",
            body=(
                Atom.rel("same_origin_attack", "?am1", "?am2"),
                Atom.rel("craft_and_perform", "?a1", "?am1"),
                Atom.rel("craft_and_perform", "?a2", "?am2"),
                Atom.different("?a1", "?a2"),
            ),
            head=Atom.rel("in_the_same_organization", "?a1", "?a2"),
        ),
    )


def _closure_of_edge(graph: KnowledgeGraph, edge: Edge) -> list[tuple[str, str, str, str]]:
    """Inverse and subproperty consequences of one edge: (src, rel, dst, rule)."""
    out = []
    rel = graph.schema.relation(edge.relation)
    if rel.inverse_of is not None:
        out.append((edge.dst, rel.inverse_of, edge.src, INVERSE_RULE))
    if rel.subproperty_of is not None:
        out.append((edge.src, rel.subproperty_of, edge.dst, SUBPROPERTY_RULE))
    return out


def axiom_closure(
    graph: KnowledgeGraph, result: InferenceResult | None = None
) -> InferenceResult:
    """Complete inverse and subproperty edges until nothing new appears."""
    result = result if result is not None else InferenceResult()
    pending = list(graph.edges())
    while pending:
        edge = pending.pop()
        for src, relation, dst, rule in _closure_of_edge(graph, edge):
            if graph.has_edge(src, relation, dst):
                continue
            added = graph.add_edge(src, relation, dst, rule=rule)
            result._record(added)
            pending.append(added)
    return result


def _pick_atom(atoms: list[Atom], env: dict[str, str]) -> int:
    """Next atom to solve: bound filters first, then best-bound relation,
    property-equality generation last."""
    best_i, best_rank = -1, (-1, -1)
    for i, atom in enumerate(atoms):
        n = sum(1 for t in atom.terms if not _is_var(t) or t in env)
        if atom.kind is AtomKind.DIFFERENT_FROM:
            if n < 2:
                continue
            rank = (3, n)
        elif atom.kind is AtomKind.PROPERTY_EQUALS:
            rank = (2, n) if n == 2 else (0, n)
        else:
            rank = (1, n)
        if rank > best_rank:
            best_i, best_rank = i, rank
    if best_i < 0:
        raise RuleError("body cannot be solved: only unbound inequality atoms remain")
    return best_i


def _match(
    graph: KnowledgeGraph,
    atoms: list[Atom],
    env: dict[str, str],
    seeded: bool,
    delta: set[tuple[str, str, str]] | None,
) -> list[dict[str, str]]:
    """Backtracking join of body atoms against the graph.

    ``delta`` holds recently added edge keys; unless ``seeded`` is already
    true, a produced match must use at least one delta edge (semi-naive).
    """
    if not atoms:
        return [env] if seeded else []

    idx = _pick_atom(atoms, env)
    atom = atoms[idx]
    rest = atoms[:idx] + atoms[idx + 1 :]

    def value(term: str) -> str | None:
        return env.get(term) if _is_var(term) else term

    a, b = atom.terms
    va, vb = value(a), value(b)
    out: list[dict[str, str]] = []

    if atom.kind is AtomKind.DIFFERENT_FROM:
        if va != vb:
            out.extend(_match(graph, rest, env, seeded, delta))
        return out

    if atom.kind is AtomKind.PROPERTY_EQUALS:
        key = atom.property_key or ""

        def prop(node_id: str | None) -> str | None:
            if node_id is None or not graph.has_node(node_id):
                return None
            return graph.node(node_id).property(key)

        if va is not None and vb is not None:
            pa = prop(va)
            if pa is not None and pa == prop(vb):
                out.extend(_match(graph, rest, env, seeded, delta))
            return out
        if va is not None or vb is not None:
            anchor = va if va is not None else vb
            v = prop(anchor)
            if v is None:
                return out
            members = [n.id for n in graph.nodes() if n.property(key) == v]
            buckets = [members]
        else:
            groups: dict[str, list[str]] = {}
            for node in graph.nodes():
                v = node.property(key)
                if v is not None:
                    groups.setdefault(v, []).append(node.id)
            buckets = [groups[v] for v in sorted(groups)]
        for members in buckets:
            for na in [va] if va is not None else members:
                for nb in [vb] if vb is not None else members:
                    env2 = dict(env)
                    if _is_var(a):
                        env2[a] = na
                    if _is_var(b):
                        env2[b] = nb
                    out.extend(_match(graph, rest, env2, seeded, delta))
        return out

    rel = atom.relation or ""
    if va is not None and vb is not None:
        candidates = [(va, vb)] if graph.has_edge(va, rel, vb) else []
    elif va is not None:
        candidates = (
            [(va, d) for d in graph.neighbors(va, rel)] if graph.has_node(va) else []
        )
    elif vb is not None:
        candidates = (
            [(s, vb) for s in graph.neighbors(vb, rel, Direction.IN)]
            if graph.has_node(vb)
            else []
        )
    else:
        candidates = [(e.src, e.dst) for e in graph.edges(rel)]
    for s, d in candidates:
        env2 = dict(env)
        if _is_var(a):
            env2[a] = s
        if _is_var(b):
            env2[b] = d
        hit = seeded or (delta is not None and (s, rel, d) in delta)
        out.extend(_match(graph, rest, env2, hit, delta))
    return out


def _emit(
    graph: KnowledgeGraph, rule: Rule, env: dict[str, str], result: InferenceResult
) -> Edge | None:
    head = rule.head
    src = env.get(head.terms[0], head.terms[0])
    dst = env.get(head.terms[1], head.terms[1])
    relation = head.relation or ""
    if not graph.has_node(src) or not graph.has_node(dst):
        return None
    rel = graph.schema.relation(relation)
    if rel.irreflexive and src == dst:
        return None
    verdict = graph.schema.check_edge_conformance(
        graph.node(src).concept, relation, graph.node(dst).concept
    )
    if not verdict:
        return None
    if graph.has_edge(src, relation, dst):
        return None
    edge = graph.add_edge(src, relation, dst, rule=rule.name)
    result._record(edge)
    return edge


def run_rules(
    graph: KnowledgeGraph,
    rules: tuple[Rule, ...] | list[Rule],
    max_rounds: int = 1000,
    result: InferenceResult | None = None,
) -> InferenceResult:
    """Apply rules semi-naive to fixpoint, interleaving axiom closure.

    Each round joins rule bodies against the graph, requiring at least one
    edge added in the previous round (the first round is unrestricted);
    closure then completes whatever the round produced. Stops when a full
    round adds nothing.
    """
    rules = tuple(rules)
    for rule in rules:
        rule.validate()
        graph.schema.relation(rule.head.relation or "")
    result = result if result is not None else InferenceResult()
    delta: set[tuple[str, str, str]] | None = None
    while True:
        result.iterations += 1
        if result.iterations > max_rounds:
            raise GraphError(f"no fixpoint after {max_rounds} rounds")
        before = len(result.added)
        round_added: list[Edge] = []
        for rule in rules:
            relational = any(a.kind is AtomKind.RELATION for a in rule.body)
            if delta is not None and not relational:
                continue  # node-only bodies cannot match anything new later
            for env in _match(graph, list(rule.body), {}, delta is None, delta):
                edge = _emit(graph, rule, env, result)
                if edge is not None:
                    round_added.append(edge)
        closure_start = len(result.added)
        axiom_closure(graph, result)
        round_added.extend(result.added[closure_start:])
        if len(result.added) == before:
            return result
        delta = {e.key() for e in round_added}


def run_inference(
    graph: KnowledgeGraph,
    rules: tuple[Rule, ...] | list[Rule] | None = None,
    max_rounds: int = 1000,
) -> InferenceResult:
    """Axiom closure followed by the (given or builtin) rule set."""
    result = axiom_closure(graph)
    return run_rules(
        graph, builtin_ruleset() if rules is None else rules, max_rounds, result
    )
