"""Declarative pattern queries over a knowledge graph.

Grammar::

    query := "MATCH" path ("," path)* ("WHERE" cond ("AND" cond)*)?
             "RETURN" "DISTINCT"? item ("," item)*
    path  := node (edge node)*
    node  := "(" IDENT? (":" IDENT)? ("{" IDENT "=" STRING ("," IDENT "=" STRING)* "}")? ")"
    edge  := "-[" ":" IDENT "]->" | "<-[" ":" IDENT "]-"
    cond  := operand ("=" | "<>") operand
    operand := IDENT ("." IDENT)? | STRING
    item  := IDENT ("." IDENT)?

Keywords are case-sensitive uppercase. Matching uses homomorphism semantics:
distinct variables may bind the same node unless a ``<>`` condition forbids
it. Property comparisons use plain value equality; a property absent on a
node compares equal only to another absent property. Projected rows are
sorted by their values and, under DISTINCT, deduplicated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import QueryParseError, SchemaError
from .graph import Direction, KnowledgeGraph
from .schema import DEFAULT_SCHEMA, OntologySchema

KEYWORDS = ("MATCH", "WHERE", "AND", "RETURN", "DISTINCT")

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(text: str) -> list[Token]:
    """Scan ``text`` into tokens; offsets index into the source string."""
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if text.startswith("<-[", i):
            tokens.append(Token("<-[", "<-[", i))
            i += 3
            continue
        if text.startswith("-[", i):
            tokens.append(Token("-[", "-[", i))
            i += 2
            continue
        if text.startswith("]->", i):
            tokens.append(Token("]->", "]->", i))
            i += 3
            continue
        if text.startswith("]-", i):
            tokens.append(Token("]-", "]-", i))
            i += 2
            continue
        if text.startswith("<>", i):
            tokens.append(Token("<>", "<>", i))
            i += 2
            continue
        if ch in "(){}:,.=":
            tokens.append(Token(ch, ch, i))
            i += 1
            continue
        if ch == '"':
            start = i
            value, i = _scan_string(text, i)
            tokens.append(Token("STRING", value, start))
            continue
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group(0)
            kind = word if word in KEYWORDS else "IDENT"
            tokens.append(Token(kind, word, i))
            i = m.end()
            continue
        raise QueryParseError(f"unexpected character {ch!r}", i, frozenset())
    tokens.append(Token("EOF", "", n))
    return tokens


def _scan_string(text: str, start: int) -> tuple[str, int]:
    """Read a double-quoted string starting at ``start``; returns (value, end)."""
    out: list[str] = []
    i = start + 1
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == '"':
            return "".join(out), i + 1
        if ch == "\\":
            if i + 1 >= n:
                break
            out.append(text[i + 1])
            i += 2
            continue
        out.append(ch)
        i += 1
    raise QueryParseError("unterminated string literal", start, frozenset({'"'}))


@dataclass(frozen=True)
class NodePattern:
    variable: str | None
    concept: str | None
    constraints: tuple[tuple[str, str], ...] = ()
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class EdgePattern:
    relation: str
    reversed: bool
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class PathPattern:
    nodes: tuple[NodePattern, ...]
    edges: tuple[EdgePattern, ...]


@dataclass(frozen=True)
class Operand:
    """Variable, property access or string literal in a condition."""

    variable: str | None
    key: str | None
    literal: str | None
    offset: int = field(default=0, compare=False)

    @property
    def is_literal(self) -> bool:
        return self.literal is not None


@dataclass(frozen=True)
class Condition:
    left: Operand
    op: str
    right: Operand


@dataclass(frozen=True)
class ReturnItem:
    variable: str
    key: str | None = None
    offset: int = field(default=0, compare=False)

    @property
    def label(self) -> str:
        return self.variable if self.key is None else f"{self.variable}.{self.key}"


@dataclass(frozen=True)
class PatternQuery:
    patterns: tuple[PathPattern, ...]
    where: tuple[Condition, ...]
    returns: tuple[ReturnItem, ...]
    distinct: bool


@dataclass(frozen=True)
class BindingRow:
    """One result row: projection labels paired with their values."""

    items: tuple[tuple[str, str], ...]

    def as_dict(self) -> dict[str, str]:
        return dict(self.items)

    @property
    def values(self) -> tuple[str, ...]:
        return tuple(v for _, v in self.items)


class _Parser:
    def __init__(self, text: str, schema: OntologySchema):
        self.text = text
        self.schema = schema
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, *kinds: str) -> Token:
        tok = self.peek()
        if tok.kind not in kinds:
            raise QueryParseError(
                f"unexpected {_found(tok)}", tok.offset, frozenset(kinds)
            )
        return self.advance()

    def _require(self, kind: str, *also: str) -> None:
        """Check the next token is ``kind``; report the wider legal set."""
        tok = self.peek()
        if tok.kind != kind:
            raise QueryParseError(
                f"unexpected {_found(tok)}", tok.offset, frozenset((kind, *also))
            )

    def parse(self) -> PatternQuery:
        self.expect("MATCH")
        paths = [self.parse_path()]
        while self.peek().kind == ",":
            self.advance()
            paths.append(self.parse_path())
        conditions: list[Condition] = []
        if self.peek().kind == "WHERE":
            self.advance()
            conditions.append(self.parse_condition())
            while self.peek().kind == "AND":
                self.advance()
                conditions.append(self.parse_condition())
            self._require("RETURN", "AND")
        else:
            self._require("RETURN", ",", "WHERE", "-[", "<-[")
        self.advance()
        distinct = False
        if self.peek().kind == "DISTINCT":
            self.advance()
            distinct = True
        items = [self.parse_item()]
        while self.peek().kind == ",":
            self.advance()
            items.append(self.parse_item())
        self.expect("EOF", ",")
        query = PatternQuery(tuple(paths), tuple(conditions), tuple(items), distinct)
        self._check_bound(query)
        return query

    def parse_path(self) -> PathPattern:
        nodes = [self.parse_node()]
        edges: list[EdgePattern] = []
        while self.peek().kind in ("-[", "<-["):
            edges.append(self.parse_edge())
            nodes.append(self.parse_node())
        return PathPattern(tuple(nodes), tuple(edges))

    def parse_node(self) -> NodePattern:
        opening = self.expect("(")
        allowed = {"IDENT", ":", "{", ")"}
        variable = None
        if self.peek().kind == "IDENT":
            variable = self.advance().text
            allowed = {":", "{", ")"}
        concept = None
        if self.peek().kind == ":":
            self.advance()
            tok = self.expect("IDENT")
            try:
                concept = self.schema.concept(tok.text).name
            except SchemaError:
                raise QueryParseError(
                    f"unknown concept: {tok.text!r}", tok.offset, frozenset()
                ) from None
            allowed = {"{", ")"}
        constraints: list[tuple[str, str]] = []
        if self.peek().kind == "{":
            self.advance()
            constraints.append(self.parse_constraint())
            while self.peek().kind == ",":
                self.advance()
                constraints.append(self.parse_constraint())
            self.expect("}", ",")
            allowed = {")"}
        self._require(")", *(allowed - {")"}))
        self.advance()
        return NodePattern(variable, concept, tuple(constraints), opening.offset)

    def parse_constraint(self) -> tuple[str, str]:
        key = self.expect("IDENT")
        self.expect("=")
        value = self.expect("STRING")
        return (key.text, value.text)

    def parse_edge(self) -> EdgePattern:
        head = self.expect("-[", "<-[")
        self.expect(":")
        tok = self.expect("IDENT")
        try:
            relation, swapped = self.schema.normalize_relation(tok.text)
        except SchemaError:
            raise QueryParseError(
                f"unknown relation: {tok.text!r}", tok.offset, frozenset()
            ) from None
        if head.kind == "-[":
            self.expect("]->")
            reverse = False
        else:
            self.expect("]-")
            reverse = True
        return EdgePattern(relation, reverse ^ swapped, head.offset)

    def parse_condition(self) -> Condition:
        left = self.parse_operand()
        op = self.expect("=", "<>")
        right = self.parse_operand()
        return Condition(left, op.kind, right)

    def parse_operand(self) -> Operand:
        tok = self.expect("IDENT", "STRING")
        if tok.kind == "STRING":
            return Operand(None, None, tok.text, tok.offset)
        key = None
        if self.peek().kind == ".":
            self.advance()
            key = self.expect("IDENT").text
        return Operand(tok.text, key, None, tok.offset)

    def parse_item(self) -> ReturnItem:
        tok = self.expect("IDENT")
        key = None
        if self.peek().kind == ".":
            self.advance()
            key = self.expect("IDENT").text
        return ReturnItem(tok.text, key, tok.offset)

    def _check_bound(self, query: PatternQuery) -> None:
        bound = {
            node.variable
            for path in query.patterns
            for node in path.nodes
            if node.variable is not None
        }
        for cond in query.where:
            for operand in (cond.left, cond.right):
                if not operand.is_literal and operand.variable not in bound:
                    raise QueryParseError(
                        f"unbound variable: {operand.variable!r}",
                        operand.offset,
                        frozenset(),
                    )
        for item in query.returns:
            if item.variable not in bound:
                raise QueryParseError(
                    f"unbound variable: {item.variable!r}", item.offset, frozenset()
                )


def _found(tok: Token) -> str:
    return "end of input" if tok.kind == "EOF" else repr(tok.text)


def parse_query(text: str, schema: OntologySchema | None = None) -> PatternQuery:
    """Parse ``text`` into a schema-checked query AST."""
    return _Parser(text, schema or DEFAULT_SCHEMA).parse()


def format_query(query: PatternQuery) -> str:
    """Render a query AST back to canonical source text."""
    parts = ["MATCH "]
    parts.append(", ".join(_format_path(p) for p in query.patterns))
    if query.where:
        parts.append(" WHERE ")
        parts.append(" AND ".join(_format_condition(c) for c in query.where))
    parts.append(" RETURN ")
    if query.distinct:
        parts.append("DISTINCT ")
    parts.append(", ".join(item.label for item in query.returns))
    return "".join(parts)


def _format_path(path: PathPattern) -> str:
    out = [_format_node(path.nodes[0])]
    for edge, node in zip(path.edges, path.nodes[1:]):
        if edge.reversed:
            out.append(f"<-[:{edge.relation}]-")
        else:
            out.append(f"-[:{edge.relation}]->")
        out.append(_format_node(node))
    return "".join(out)


def _format_node(node: NodePattern) -> str:
    inner = node.variable or ""
    if node.concept is not None:
        inner += f":{node.concept}"
    if node.constraints:
        body = ", ".join(f'{k}={_quote(v)}' for k, v in node.constraints)
        inner += " {" + body + "}" if inner else "{" + body + "}"
    return f"({inner})"


def _format_condition(cond: Condition) -> str:
    return f"{_format_operand(cond.left)} {cond.op} {_format_operand(cond.right)}"


def _format_operand(op: Operand) -> str:
    if op.is_literal:
        return _quote(op.literal or "")
    return op.variable if op.key is None else f"{op.variable}.{op.key}"


def _quote(value: str) -> str:
    return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'


@dataclass(frozen=True)
class _NodeAtom:
    variable: str
    concept: str | None
    constraints: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class _EdgeAtom:
    src: str
    relation: str
    dst: str


def _compile(query: PatternQuery) -> tuple[list[_NodeAtom], list[_EdgeAtom]]:
    node_atoms: list[_NodeAtom] = []
    edge_atoms: list[_EdgeAtom] = []
    anon = 0
    for path in query.patterns:
        names: list[str] = []
        for node in path.nodes:
            name = node.variable
            if name is None:
                name = f" anon{anon}"
                anon += 1
            names.append(name)
            node_atoms.append(_NodeAtom(name, node.concept, node.constraints))
        for i, edge in enumerate(path.edges):
            src, dst = names[i], names[i + 1]
            if edge.reversed:
                src, dst = dst, src
            edge_atoms.append(_EdgeAtom(src, edge.relation, dst))
    return node_atoms, edge_atoms


def _node_ok(graph: KnowledgeGraph, node_id: str, atom: _NodeAtom) -> bool:
    node = graph.node(node_id)
    if atom.concept is not None and node.concept != atom.concept:
        return False
    return all(node.property(k) == v for k, v in atom.constraints)


def _candidates(graph: KnowledgeGraph, atom: _NodeAtom) -> list[str]:
    pool = (
        graph.nodes_by_concept(atom.concept)
        if atom.concept is not None
        else graph.nodes()
    )
    return sorted(
        n.id for n in pool if all(n.property(k) == v for k, v in atom.constraints)
    )


def _operand_value(
    graph: KnowledgeGraph, operand: Operand, env: dict[str, str]
) -> str | None:
    if operand.is_literal:
        return operand.literal
    node_id = env[operand.variable or ""]
    if operand.key is None:
        return node_id
    return graph.node(node_id).property(operand.key)


def _condition_holds(
    graph: KnowledgeGraph, cond: Condition, env: dict[str, str]
) -> bool:
    left = _operand_value(graph, cond.left, env)
    right = _operand_value(graph, cond.right, env)
    return left == right if cond.op == "=" else left != right


def _cond_vars(cond: Condition) -> frozenset[str]:
    out = set()
    for operand in (cond.left, cond.right):
        if not operand.is_literal and operand.variable is not None:
            out.add(operand.variable)
    return frozenset(out)


def evaluate_query(
    query: PatternQuery, graph: KnowledgeGraph
) -> list[BindingRow]:
    """Evaluate ``query`` against ``graph`` and return sorted projection rows.

    Backtracking join over the pattern atoms, most selective candidate set
    first; conditions are applied as soon as their variables are bound. The
    reordering never changes the result set, only the search order.
    """
    node_atoms, edge_atoms = _compile(query)
    filters: dict[str, list[_NodeAtom]] = {}
    for atom in node_atoms:
        filters.setdefault(atom.variable, []).append(atom)

    rows: list[tuple[str, ...]] = []
    pending_conditions = list(query.where)

    def conditions_ready(env: dict[str, str], done: set[int]) -> bool:
        for idx, cond in enumerate(pending_conditions):
            if idx in done:
                continue
            if _cond_vars(cond) <= env.keys():
                if not _condition_holds(graph, cond, env):
                    return False
                done.add(idx)
        return True

    def extend(env: dict[str, str], remaining: list[_EdgeAtom], done: set[int]) -> None:
        if not remaining:
            unbound = [v for v in filters if v not in env]
            if unbound:
                var = min(unbound, key=lambda v: len(_var_candidates(v)))
                for node_id in _var_candidates(var):
                    child_done = set(done)
                    child = dict(env)
                    child[var] = node_id
                    if conditions_ready(child, child_done):
                        extend(child, remaining, child_done)
                return
            if all(
                _condition_holds(graph, c, env)
                for i, c in enumerate(pending_conditions)
                if i not in done
            ):
                rows.append(_project(graph, query, env))
            return
        atom = min(remaining, key=lambda a: _edge_cost(a, env))
        rest = [a for a in remaining if a is not atom]
        for src, dst in _edge_bindings(atom, env):
            if atom.src == atom.dst and src != dst:
                continue
            child = dict(env)
            child[atom.src] = src
            child[atom.dst] = dst
            if not all(_node_ok(graph, child[v], f) for v in (atom.src, atom.dst)
                       for f in filters.get(v, ())):
                continue
            child_done = set(done)
            if conditions_ready(child, child_done):
                extend(child, rest, child_done)

    def _var_candidates(var: str) -> list[str]:
        out: list[str] | None = None
        for atom in filters[var]:
            cand = _candidates(graph, atom)
            out = cand if out is None else [c for c in out if c in set(cand)]
        return out or []

    def _edge_cost(atom: _EdgeAtom, env: dict[str, str]) -> tuple[int, int]:
        src_bound = atom.src in env
        dst_bound = atom.dst in env
        if src_bound and dst_bound:
            return (0, 0)
        if src_bound or dst_bound:
            anchor = env[atom.src] if src_bound else env[atom.dst]
            direction = Direction.OUT if src_bound else Direction.IN
            return (1, len(graph.neighbors(anchor, atom.relation, direction)))
        return (2, len(graph.edges(atom.relation)))

    def _edge_bindings(atom: _EdgeAtom, env: dict[str, str]):
        src_bound = atom.src in env
        dst_bound = atom.dst in env
        if src_bound and dst_bound:
            if graph.has_edge(env[atom.src], atom.relation, env[atom.dst]):
                yield env[atom.src], env[atom.dst]
            return
        if src_bound:
            src = env[atom.src]
            for dst in graph.neighbors(src, atom.relation, Direction.OUT):
                yield src, dst
            return
        if dst_bound:
            dst = env[atom.dst]
            for src in graph.neighbors(dst, atom.relation, Direction.IN):
                yield src, dst
            return
        for edge in sorted(graph.edges(atom.relation), key=lambda e: e.key()):
            yield edge.src, edge.dst

    extend({}, list(edge_atoms), set())

    rows.sort()
    if query.distinct:
        deduped: list[tuple[str, ...]] = []
        for row in rows:
            if not deduped or deduped[-1] != row:
                deduped.append(row)
        rows = deduped
    labels = tuple(item.label for item in query.returns)
    return [BindingRow(tuple(zip(labels, row))) for row in rows]


def _project(
    graph: KnowledgeGraph, query: PatternQuery, env: dict[str, str]
) -> tuple[str, ...]:
    out = []
    for item in query.returns:
        node_id = env[item.variable]
        if item.key is None:
            out.append(node_id)
        else:
            value = graph.node(node_id).property(item.key)
            out.append("" if value is None else value)
    return tuple(out)


def run_query(
    text: str, graph: KnowledgeGraph, schema: OntologySchema | None = None
) -> list[BindingRow]:
    """Parse and evaluate in one step."""
    return evaluate_query(parse_query(text, schema), graph)
