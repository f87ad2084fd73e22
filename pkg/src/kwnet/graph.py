"""Word co-occurrence networks and virtual-edge enrichment.

A document becomes an undirected graph: one node per distinct stem, one
co-occurrence edge per stem pair appearing within ``w`` tokens inside a
sentence (weight = total co-occurrence count). Enrichment adds
``round_half_up(P * E_t)`` virtual edges between the most similar
non-adjacent node pairs, weighted by their similarity.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from itertools import combinations

from kwnet.corpus import ProcessedDocument
from kwnet.embeddings import SimilarityConfig, top_similar_pairs

logger = logging.getLogger(__name__)

KIND_COOCCURRENCE = "cooccurrence"
KIND_VIRTUAL = "virtual"

# keeps weighted measures defined when a similarity is negative or zero
VIRTUAL_WEIGHT_FLOOR = 1e-9


@dataclass(frozen=True)
class GraphConfig:
    w: int = 1
    p: float = 0.0

    def __post_init__(self):
        if self.w < 1:
            raise ValueError(f"window length must be >= 1, got {self.w}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"virtual-edge fraction must be in [0, 1], got {self.p}")


@dataclass(frozen=True)
class Edge:
    kind: str
    weight: float
    count: int | None = None  # co-occurrence count; None for virtual edges


@dataclass(frozen=True)
class WordGraph:
    nodes: tuple[str, ...]                         # sorted
    edges: dict[tuple[str, str], Edge]             # key: (a, b) with a < b
    w: int
    p: float = 0.0
    embedding: str = ""                            # descriptor echo for provenance
    _adjacency: dict[str, dict[str, Edge]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        adjacency: dict[str, dict[str, Edge]] = {node: {} for node in self.nodes}
        for (a, b), edge in self.edges.items():
            adjacency[a][b] = edge
            adjacency[b][a] = edge
        object.__setattr__(self, "_adjacency", adjacency)

    @property
    def e_t(self) -> int:
        return sum(1 for e in self.edges.values() if e.kind == KIND_COOCCURRENCE)

    @property
    def e_v(self) -> int:
        return sum(1 for e in self.edges.values() if e.kind == KIND_VIRTUAL)

    def neighbors(self, node: str) -> dict[str, Edge]:
        return self._adjacency[node]

    def degree(self, node: str) -> int:
        return len(self._adjacency[node])

    def strength(self, node: str) -> float:
        return sum(e.weight for e in self._adjacency[node].values())

    def has_edge(self, a: str, b: str) -> bool:
        return _pair(a, b) in self.edges


def _pair(a: str, b: str) -> tuple[str, str]:
    return (a, b) if a < b else (b, a)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def build_cooccurrence(doc: ProcessedDocument, w: int = 1) -> WordGraph:
    """Co-occurrence network at window length ``w`` (windows never cross sentences)."""
    if w < 1:
        raise ValueError(f"window length must be >= 1, got {w}")
    if not doc.sentences:
        raise ValueError(f"document {doc.id!r} has no sentences")
    counts: dict[tuple[str, str], int] = {}
    nodes: set[str] = set()
    for sentence in doc.sentences:
        nodes.update(sentence)
        for i, token in enumerate(sentence):
            for j in range(i + 1, min(i + w, len(sentence) - 1) + 1):
                other = sentence[j]
                if other == token:
                    continue  # no self-loops from repeated words
                key = _pair(token, other)
                counts[key] = counts.get(key, 0) + 1
    edges = {
        key: Edge(kind=KIND_COOCCURRENCE, weight=float(n), count=n)
        for key, n in counts.items()
    }
    return WordGraph(nodes=tuple(sorted(nodes)), edges=edges, w=w, p=0.0)


def eligible_pairs(graph: WordGraph) -> list[tuple[str, str]]:
    """All unordered non-adjacent node pairs, in lexicographic order."""
    return [pair for pair in combinations(graph.nodes, 2) if pair not in graph.edges]


def enrich(
    graph: WordGraph,
    cfg: GraphConfig,
    source=None,
    simcfg: SimilarityConfig | None = None,
    ranked_pairs: list[tuple[tuple[str, str], float]] | None = None,
) -> WordGraph:
    """Add the top-similarity virtual edges; co-occurrence edges are untouched.

    ``ranked_pairs`` may carry a precomputed ``top_similar_pairs`` result (a
    longer ranking is fine; a prefix is used), which lets a sweep rank the
    candidates once per document and reuse them across P values.
    """
    if graph.e_v != 0:
        raise ValueError("graph already carries virtual edges")
    wanted = round_half_up(cfg.p * graph.e_t)
    if wanted == 0:
        return WordGraph(nodes=graph.nodes, edges=dict(graph.edges), w=cfg.w, p=cfg.p)
    if ranked_pairs is None:
        if source is None or simcfg is None:
            raise ValueError("enrichment needs an embedding source and similarity config")
        ranked_pairs = top_similar_pairs(eligible_pairs(graph), wanted, source, simcfg)
    chosen = ranked_pairs[:wanted]
    if len(chosen) < wanted:
        logger.warning(
            "enrich: only %d eligible pairs for %d requested virtual edges", len(chosen), wanted
        )
    edges = dict(graph.edges)
    for (a, b), value in chosen:
        edges[_pair(a, b)] = Edge(kind=KIND_VIRTUAL, weight=max(value, VIRTUAL_WEIGHT_FLOOR))
    descriptor = simcfg.mode if simcfg is not None else graph.embedding
    return WordGraph(nodes=graph.nodes, edges=edges, w=cfg.w, p=cfg.p, embedding=descriptor)


def strip_virtual(graph: WordGraph) -> WordGraph:
    """Drop every virtual edge, restoring the pre-enrichment graph."""
    edges = {k: e for k, e in graph.edges.items() if e.kind == KIND_COOCCURRENCE}
    return WordGraph(nodes=graph.nodes, edges=edges, w=graph.w, p=0.0)


def dump_graph(graph: WordGraph) -> str:
    """Deterministic text dump: header with E_t, E_v, w, P, then sorted edges."""
    lines = [f"{graph.e_t}\t{graph.e_v}\t{graph.w}\t{graph.p:g}"]
    for (a, b) in sorted(graph.edges):
        edge = graph.edges[(a, b)]
        lines.append(f"{a}\t{b}\t{edge.kind}\t{edge.weight:.12f}")
    return "\n".join(lines) + "\n"
