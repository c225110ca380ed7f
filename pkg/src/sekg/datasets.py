"""Access to the bundled canonical dataset."""

from __future__ import annotations

from importlib import resources

from .graph import KnowledgeGraph
from .inference import run_inference
from .loader import LoadResult, load_dataset

CANONICAL_RESOURCE = "data/canonical.sekg"


def canonical_text() -> str:
    """Return the raw text of the bundled canonical dataset."""
    return (
        resources.files("sekg").joinpath(CANONICAL_RESOURCE).read_text(encoding="utf-8")
    )


def load_canonical(strict_vocab: bool = True) -> LoadResult:
    """Parse the bundled dataset; strict mode turns vocabulary misses into errors."""
    return load_dataset(canonical_text(), strict_vocab=strict_vocab)


def canonical_graph(infer: bool = True) -> KnowledgeGraph:
    """Load the bundled dataset, optionally run inference, and freeze the result."""
    graph = load_canonical().graph
    if infer:
        run_inference(graph)
    graph.freeze()
    return graph
