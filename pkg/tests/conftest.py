import itertools
import random

import pytest

from sekg.datasets import canonical_graph, load_canonical
from sekg.graph import KnowledgeGraph, Node


@pytest.fixture(scope="session")
def graph():
    """Canonical dataset with inference applied, frozen."""
    return canonical_graph()


@pytest.fixture(scope="session")
def asserted_graph():
    """Canonical dataset without inference."""
    return canonical_graph(infer=False)


@pytest.fixture(scope="session")
def load_result():
    return load_canonical()


AFFILIATIONS = ("Acme", "Initech", "Globex")
DOMAINS = ("evil.test", "bad.example")


def random_conformant_graph(seed: int) -> KnowledgeGraph:
    """Seeded random graph (at most 200 nodes) for inference property tests."""
    rng = random.Random(seed)
    g = KnowledgeGraph()
    n_scen = rng.randint(1, 4)
    for sid in range(1, n_scen + 1):
        g.register_scenario(sid, f"type{rng.randint(1, 3)}")

    pools: dict[str, list[str]] = {}

    def make(concept: str, count: int, scenario: bool) -> None:
        ids = []
        for i in range(count):
            props = {}
            if concept == "AttackTarget" and rng.random() < 0.5:
                props["affiliation"] = rng.choice(AFFILIATIONS)
            if concept == "AttackMethod" and rng.random() < 0.4:
                props["encoded_domain"] = rng.choice(DOMAINS)
            node_id = f"{concept.lower()}{i}"
            g.add_node(
                Node(
                    node_id,
                    concept,
                    rng.randint(1, n_scen) if scenario else None,
                    properties=props,
                )
            )
            ids.append(node_id)
        pools[concept] = ids

    make("Attacker", rng.randint(1, 12), True)
    make("AttackMethod", rng.randint(1, 20), True)
    make("AttackTarget", rng.randint(1, 15), True)
    make("AttackMotivation", rng.randint(1, 6), False)
    make("HumanVulnerability", rng.randint(1, 30), False)
    make("AttackGoal", rng.randint(1, 8), True)
    make("AttackConsequence", rng.randint(1, 8), True)
    assert g.node_count <= 200

    def sprinkle(relation: str, dom: str, rng_c: str, count: int) -> None:
        for _ in range(count):
            src = rng.choice(pools[dom])
            dst = rng.choice(pools[rng_c])
            if src != dst:
                g.add_edge(src, relation, dst)

    sprinkle("craft_and_perform", "Attacker", "AttackMethod", rng.randint(0, 25))
    sprinkle("apply_to", "AttackMethod", "AttackTarget", rng.randint(0, 25))
    sprinkle("to_exploit", "AttackMethod", "HumanVulnerability", rng.randint(0, 30))
    sprinkle("have_vul", "AttackTarget", "HumanVulnerability", rng.randint(0, 30))
    sprinkle("motivate", "AttackMotivation", "Attacker", rng.randint(0, 10))
    sprinkle("motivated_by", "Attacker", "AttackMotivation", rng.randint(0, 10))
    sprinkle("incent", "AttackMotivation", "Attacker", rng.randint(0, 5))
    sprinkle("driven_by", "Attacker", "AttackMotivation", rng.randint(0, 5))
    sprinkle("to_achieve", "AttackMethod", "AttackGoal", rng.randint(0, 10))
    sprinkle("bring_out", "AttackTarget", "AttackConsequence", rng.randint(0, 10))
    return g


def reference_eval(query, graph) -> list[tuple[str, ...]]:
    """Exhaustive query evaluation: every variable assignment is tried.

    Exponential, so only usable on small fixtures; the production evaluator
    must agree with it exactly.
    """
    specs: dict[str, list] = {}
    edges = []
    anon = 0
    for path in query.patterns:
        names = []
        for node in path.nodes:
            name = node.variable
            if name is None:
                name = f"__anon{anon}"
                anon += 1
            names.append(name)
            specs.setdefault(name, []).append(node)
        for i, edge in enumerate(path.edges):
            src, dst = names[i], names[i + 1]
            if edge.reversed:
                src, dst = dst, src
            edges.append((src, edge.relation, dst))

    def node_ok(node_id, pattern):
        node = graph.node(node_id)
        if pattern.concept is not None and node.concept != pattern.concept:
            return False
        return all(node.property(k) == v for k, v in pattern.constraints)

    def operand(env, op):
        if op.is_literal:
            return op.literal
        if op.key is None:
            return env[op.variable]
        return graph.node(env[op.variable]).property(op.key)

    variables = sorted(specs)
    rows = []
    for combo in itertools.product(graph.node_ids(), repeat=len(variables)):
        env = dict(zip(variables, combo))
        if not all(node_ok(env[v], p) for v in variables for p in specs[v]):
            continue
        if not all(graph.has_edge(env[s], r, env[d]) for s, r, d in edges):
            continue
        ok = True
        for cond in query.where:
            left, right = operand(env, cond.left), operand(env, cond.right)
            if (left == right) != (cond.op == "="):
                ok = False
                break
        if not ok:
            continue
        row = []
        for item in query.returns:
            if item.key is None:
                row.append(env[item.variable])
            else:
                value = graph.node(env[item.variable]).property(item.key)
                row.append("" if value is None else value)
        rows.append(tuple(row))
    rows.sort()
    if query.distinct:
        rows = [r for i, r in enumerate(rows) if i == 0 or r != rows[i - 1]]
    return rows
