"""Command line front end.

Subcommands: load, validate, infer, stats, threats, targets, paths,
same-origin, query, export, eval. Results go to stdout (or ``--output``),
diagnostics to stderr. Exit codes: 0 success, 1 validation or analysis
error, 2 usage error. All output is deterministic.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import analytics
from .datasets import canonical_text
from .errors import SekgError
from .graph import RED_RELATIONS, KnowledgeGraph
from .inference import run_inference
from .loader import load_dataset, serialize_dataset, validate_scenario_completeness
from .query import parse_query, evaluate_query

CONCEPT_FILL = {
    "Attacker": "#e63946",
    "AttackMotivation": "#f4a261",
    "AttackGoal": "#e9c46a",
    "SocialEngineeringInformation": "#94d2bd",
    "AttackStrategy": "#74c0fc",
    "AttackMethod": "#f77f00",
    "AttackTarget": "#457b9d",
    "AttackMedium": "#b5838d",
    "HumanVulnerability": "#9b5de5",
    "EffectMechanism": "#00b4d8",
    "AttackConsequence": "#2a9d8f",
}
AUXILIARY_FILL = "#ced4da"
RED_EDGE_COLOR = "#d00000"
PLAIN_EDGE_COLOR = "#555555"
GOAL_CLUSTER_FILL = "#ffec99"


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: KnowledgeGraph) -> str:
    """Render the graph as a DOT document.

    Node fill follows the concept palette below; edges over the red
    relation set (plus derived attack edges) are red; inferred edges are
    dashed. Goal/sub-goal nodes of each scenario sit in their own cluster.
    """
    lines = ["// node fill palette by concept:"]
    for concept, fill in CONCEPT_FILL.items():
        lines.append(f"//   {concept}: {fill}")
    lines.append(f"//   auxiliary concepts (SubGoal, CommonSkill, AuxiliaryTrick): {AUXILIARY_FILL}")
    lines.append(f"// red relations ({', '.join(sorted(RED_RELATIONS | {'attack'}))}): {RED_EDGE_COLOR}")
    lines.append("// inferred edges are dashed")
    lines.append("digraph sekg {")
    lines.append('  node [shape=box, style=filled, fontname="Helvetica"];')

    clustered: set[str] = set()
    goal_scenarios = sorted(
        {
            n.scenario_id
            for concept in ("AttackGoal", "SubGoal")
            for n in graph.nodes_by_concept(concept)
            if n.scenario_id is not None
        }
    )
    for sid in goal_scenarios:
        members = sorted(
            n.id
            for concept in ("AttackGoal", "SubGoal")
            for n in graph.nodes_by_concept(concept)
            if n.scenario_id == sid
        )
        lines.append(f"  subgraph cluster_goal_tree_{sid} {{")
        lines.append(f'    label="goal tree S{sid}";')
        lines.append(f'    style=filled; fillcolor="{GOAL_CLUSTER_FILL}";')
        for node_id in members:
            fill = _node_fill(graph, node_id)
            lines.append(f"    {_dot_quote(node_id)} [fillcolor=\"{fill}\"];")
            clustered.add(node_id)
        lines.append("  }")

    for node in sorted(graph.nodes(), key=lambda n: n.id):
        if node.id in clustered:
            continue
        lines.append(
            f"  {_dot_quote(node.id)} [fillcolor=\"{_node_fill(graph, node.id)}\"];"
        )

    red = RED_RELATIONS | {"attack"}
    for edge in sorted(graph.edges(), key=lambda e: e.key()):
        color = RED_EDGE_COLOR if edge.relation in red else PLAIN_EDGE_COLOR
        attrs = [f'label="{edge.relation}"', f'color="{color}"']
        if edge.is_inferred:
            attrs.append("style=dashed")
        lines.append(
            f"  {_dot_quote(edge.src)} -> {_dot_quote(edge.dst)} [{', '.join(attrs)}];"
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def _node_fill(graph: KnowledgeGraph, node_id: str) -> str:
    return CONCEPT_FILL.get(graph.node(node_id).concept, AUXILIARY_FILL)


def metrics_dict(metrics: analytics.EvalMetrics) -> dict:
    """JSON form of EvalMetrics; ratios rounded to 4 decimal places."""
    return {
        "true_positives": metrics.true_positives,
        "false_positives": metrics.false_positives,
        "omitted": metrics.omitted,
        "precision": round(metrics.precision, 4),
        "recall": round(metrics.recall, 4),
        "f1": round(metrics.f1, 4),
    }


def threat_pair_dict(pair: analytics.ThreatPair) -> dict:
    return {
        "attacker": pair.attacker,
        "method": pair.method,
        "victim": pair.victim,
        "shared_vulnerabilities": sorted(pair.shared_vulnerabilities),
        "origin_scenarios": list(pair.origin_scenarios),
    }


def attack_path_dict(path: analytics.AttackPath) -> dict:
    return {
        "nodes": list(path.nodes),
        "steps": [{"relation": r, "forward": f} for r, f in path.steps],
        "text": path.describe(),
    }


def export_report(result: object, fmt: str) -> str:
    """Serialize an analysis result as JSON or CSV.

    JSON output has sorted keys. CSV is supported for ranked-count lists
    only, with the header ``id,count,rank``.
    """
    if fmt == "json":
        return json.dumps(_jsonable(result), indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        if not isinstance(result, list) or not all(
            isinstance(r, analytics.RankedCount) for r in result
        ):
            raise ValueError("csv format is only defined for ranked counts")
        lines = ["id,count,rank"]
        lines.extend(f"{r.id},{r.count},{r.rank}" for r in result)
        return "\n".join(lines) + "\n"
    raise ValueError(f"unsupported format: {fmt!r}")


def _jsonable(value: object) -> object:
    if isinstance(value, analytics.EvalMetrics):
        return metrics_dict(value)
    if isinstance(value, analytics.ThreatPair):
        return threat_pair_dict(value)
    if isinstance(value, analytics.AttackPath):
        return attack_path_dict(value)
    if isinstance(value, analytics.RankedCount):
        return {"id": value.id, "count": value.count, "rank": value.rank}
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _read_dataset(path: str | None) -> str:
    if path is None:
        return canonical_text()
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _load_graph(args: argparse.Namespace) -> tuple[KnowledgeGraph, list[str]]:
    result = load_dataset(
        _read_dataset(args.dataset),
        source=args.dataset or "<bundled>",
        strict_vocab=args.strict_vocab,
    )
    graph = result.graph
    if not getattr(args, "no_infer", False):
        run_inference(graph)
    graph.freeze()
    return graph, result.warnings


def _add_common(parser: argparse.ArgumentParser, infer_flag: bool = True) -> None:
    parser.add_argument(
        "dataset",
        nargs="?",
        default=None,
        help="dataset file (.sekg); bundled canonical dataset when omitted",
    )
    parser.add_argument(
        "--strict-vocab",
        action="store_true",
        help="treat unknown vocabulary terms as errors instead of warnings",
    )
    parser.add_argument(
        "--output",
        default=None,
        help="write results to this file instead of stdout",
    )
    if infer_flag:
        parser.add_argument(
            "--no-infer",
            action="store_true",
            help="skip the inference phase, exposing only asserted data",
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="se-kg",
        description="Social engineering knowledge graph toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("load", help="parse a dataset and print summary counts")
    _add_common(p, infer_flag=False)

    p = sub.add_parser("validate", help="lint scenarios for missing roles")
    _add_common(p, infer_flag=False)

    p = sub.add_parser("infer", help="run inference and list derived edges")
    _add_common(p, infer_flag=False)
    p.add_argument("--trace", action="store_true", help="print per-rule firing counts")

    p = sub.add_parser("stats", help="rank endpoint usage of one relation")
    _add_common(p)
    p.add_argument("--relation", required=True)
    p.add_argument("--end", choices=("src", "dst"), default="dst")
    p.add_argument("--top", type=int, default=3)
    p.add_argument("--format", choices=("table", "json", "csv"), default="table")

    p = sub.add_parser("threats", help="potential threats against one victim")
    _add_common(p)
    p.add_argument("--victim", required=True)
    p.add_argument("--format", choices=("table", "json"), default="table")

    p = sub.add_parser("targets", help="potential targets of one attacker")
    _add_common(p)
    p.add_argument("--attacker", required=True)
    p.add_argument("--format", choices=("table", "json"), default="table")

    p = sub.add_parser("paths", help="attack paths between an attacker and a victim")
    _add_common(p)
    p.add_argument("--from", dest="src", required=True, metavar="ATTACKER")
    p.add_argument("--to", dest="dst", required=True, metavar="VICTIM")
    p.add_argument("--format", choices=("table", "json"), default="table")

    p = sub.add_parser("same-origin", help="report same-origin attack evidence")
    _add_common(p)

    p = sub.add_parser("query", help="run a MATCH query")
    p.add_argument("text", nargs="?", default=None, help="query text; stdin when omitted")
    _add_common(p)
    p.add_argument("--format", choices=("table", "json"), default="table")

    p = sub.add_parser("export", help="export the graph as DOT or dataset text")
    _add_common(p)
    p.add_argument("--format", choices=("dot", "sekg"), default="dot")
    p.add_argument("--scenario", type=int, default=None, help="restrict to one scenario subgraph")

    p = sub.add_parser("eval", help="score the analysis patterns against the path oracle")
    _add_common(p)
    return parser


def _cmd_load(args: argparse.Namespace) -> str:
    result = load_dataset(
        _read_dataset(args.dataset),
        source=args.dataset or "<bundled>",
        strict_vocab=args.strict_vocab,
    )
    graph = result.graph
    lines = [
        f"scenarios: {len(graph.scenarios)}",
        f"attack types: {len(graph.attack_types())}",
        f"nodes: {graph.node_count}",
        f"edges: {graph.edge_count}",
        f"warnings: {len(result.warnings)}",
    ]
    lines.extend(f"warning: {w}" for w in result.warnings)
    return "\n".join(lines) + "\n"


def _cmd_validate(args: argparse.Namespace) -> tuple[str, int]:
    result = load_dataset(
        _read_dataset(args.dataset),
        source=args.dataset or "<bundled>",
        strict_vocab=args.strict_vocab,
    )
    findings = validate_scenario_completeness(result.graph)
    lines = [
        f"{f.severity} scenario={f.scenario_id} {f.role}: {f.message}"
        for f in findings
    ]
    mandatory = sum(1 for f in findings if f.severity == "mandatory")
    advisory = len(findings) - mandatory
    lines.append(f"findings: {mandatory} mandatory, {advisory} advisory")
    return "\n".join(lines) + "\n", 1 if mandatory else 0


def _cmd_infer(args: argparse.Namespace) -> str:
    result = load_dataset(
        _read_dataset(args.dataset),
        source=args.dataset or "<bundled>",
        strict_vocab=args.strict_vocab,
    )
    outcome = run_inference(result.graph)
    lines = []
    if args.trace:
        for rule in sorted(outcome.fired, key=str):
            lines.append(f"fired {rule}: {outcome.fired[rule]}")
        lines.append(f"rounds: {outcome.iterations}")
    for edge in outcome.sorted_added():
        lines.append(f"{edge.src} {edge.relation} {edge.dst} [{edge.rule}]")
    lines.append(f"added: {len(outcome.added)}")
    return "\n".join(lines) + "\n"


def _cmd_stats(args: argparse.Namespace) -> str:
    graph, _ = _load_graph(args)
    end = analytics.End.SRC if args.end == "src" else analytics.End.DST
    ranked = analytics.ranked_usage(graph, args.relation, end, args.top)
    if args.format == "json":
        return export_report(ranked, "json")
    if args.format == "csv":
        return export_report(ranked, "csv")
    lines = ["rank  count  id"]
    lines.extend(f"{r.rank:<5} {r.count:<6} {r.id}" for r in ranked)
    return "\n".join(lines) + "\n"


def _cmd_threats(args: argparse.Namespace) -> str:
    graph, _ = _load_graph(args)
    pairs = analytics.potential_threats_for_victim(graph, args.victim)
    if args.format == "json":
        return export_report([threat_pair_dict(p) for p in pairs], "json")
    lines = [f"threats against {args.victim}: {len(pairs)}"]
    for p in pairs:
        shared = ", ".join(sorted(p.shared_vulnerabilities))
        lines.append(
            f"  {p.attacker} via {p.method} (S{p.origin_scenarios[0]}) shares: {shared}"
        )
    return "\n".join(lines) + "\n"


def _cmd_targets(args: argparse.Namespace) -> str:
    graph, _ = _load_graph(args)
    pairs = analytics.potential_targets_for_attacker(graph, args.attacker)
    if args.format == "json":
        payload = []
        for p in pairs:
            entry = threat_pair_dict(p)
            entry["alternate_methods"] = list(
                analytics.alternate_methods_for_target(graph, args.attacker, p.victim)
            )
            payload.append(entry)
        return export_report(payload, "json")
    lines = [f"targets for {args.attacker}: {len(pairs)}"]
    for p in pairs:
        shared = ", ".join(sorted(p.shared_vulnerabilities))
        alternates = analytics.alternate_methods_for_target(
            graph, args.attacker, p.victim
        )
        suffix = f" (alternates: {', '.join(alternates)})" if alternates else ""
        lines.append(f"  {p.victim} via {p.method} shares: {shared}{suffix}")
    return "\n".join(lines) + "\n"


def _cmd_paths(args: argparse.Namespace) -> str:
    graph, _ = _load_graph(args)
    paths, auxiliary = analytics.attack_paths_between(graph, args.src, args.dst)
    if args.format == "json":
        return export_report(
            {
                "paths": [attack_path_dict(p) for p in paths],
                "auxiliary_methods": auxiliary,
            },
            "json",
        )
    lines = [f"attack paths {args.src} -> {args.dst}: {len(paths)}"]
    lines.extend(f"  {p.describe()}" for p in paths)
    shared = sorted({p.nodes[2] for p in paths if p.length == 3})
    if shared:
        lines.append(f"shared vulnerabilities: {', '.join(shared)}")
    lines.append(f"auxiliary methods: {len(auxiliary)}")
    lines.extend(f"  {m}" for m in auxiliary)
    return "\n".join(lines) + "\n"


def _cmd_same_origin(args: argparse.Namespace) -> str:
    graph, _ = _load_graph(args)
    return export_report(analytics.same_origin_report(graph), "json")


def _cmd_query(args: argparse.Namespace) -> str:
    text = args.text if args.text is not None else sys.stdin.read()
    graph, _ = _load_graph(args)
    query = parse_query(text, graph.schema)
    rows = evaluate_query(query, graph)
    if args.format == "json":
        return export_report([row.as_dict() for row in rows], "json")
    labels = [item.label for item in query.returns]
    lines = ["\t".join(labels)]
    lines.extend("\t".join(row.values) for row in rows)
    return "\n".join(lines) + "\n"


def _cmd_export(args: argparse.Namespace) -> str:
    graph, _ = _load_graph(args)
    if args.scenario is not None:
        graph = graph.scenario_subgraph(args.scenario)
    if args.format == "sekg":
        return serialize_dataset(graph, include_inferred=not args.no_infer)
    return export_dot(graph)


def _cmd_eval(args: argparse.Namespace) -> str:
    graph, _ = _load_graph(args)
    oracle = analytics.enumerate_oracle_paths(graph)
    triples = analytics.oracle_triples(oracle)
    pair_labels = analytics.oracle_victim_pairs(oracle)
    quads = analytics.oracle_quads(oracle)

    threat_out: set[tuple] = set()
    for victim in graph.nodes_by_concept("AttackTarget"):
        for p in analytics.potential_threats_for_victim(graph, victim.id):
            threat_out.add((p.attacker, p.method, p.victim))
    # in-scenario triples come from the asserted apply_to chain
    for edge in graph.edges("apply_to"):
        for attacker in graph.nodes_by_concept("Attacker"):
            if graph.has_edge(attacker.id, "craft_and_perform", edge.src):
                threat_out.add((attacker.id, edge.src, edge.dst))

    target_out: set[tuple] = set()
    for attacker in graph.nodes_by_concept("Attacker"):
        for p in analytics.potential_targets_for_attacker(graph, attacker.id):
            target_out.add((p.attacker, p.victim))
    for edge in graph.edges("attack"):
        target_out.add((edge.src, edge.dst))

    quad_out: set[tuple] = set()
    for attacker in graph.nodes_by_concept("Attacker"):
        for victim in graph.nodes_by_concept("AttackTarget"):
            paths, _ = analytics.attack_paths_between(graph, attacker.id, victim.id)
            for p in paths:
                quad_out.add(tuple(p.nodes))

    report = {
        "oracle": analytics.summarize_oracle(oracle),
        "labels": {
            "threat_triples": len(triples),
            "victim_pairs": len(pair_labels),
            "path_quads": len(quads),
        },
        "patterns": {
            "threat_triples": metrics_dict(
                analytics.evaluate_pattern(threat_out, triples)
            ),
            "victim_pairs": metrics_dict(
                analytics.evaluate_pattern(target_out, pair_labels)
            ),
            "path_quads": metrics_dict(analytics.evaluate_pattern(quad_out, quads)),
        },
    }
    return export_report(report, "json")


_HANDLERS = {
    "load": _cmd_load,
    "validate": _cmd_validate,
    "infer": _cmd_infer,
    "stats": _cmd_stats,
    "threats": _cmd_threats,
    "targets": _cmd_targets,
    "paths": _cmd_paths,
    "same-origin": _cmd_same_origin,
    "query": _cmd_query,
    "export": _cmd_export,
    "eval": _cmd_eval,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        outcome = _HANDLERS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return 1
    except SekgError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text, status = outcome if isinstance(outcome, tuple) else (outcome, 0)
    if args.output is not None:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
