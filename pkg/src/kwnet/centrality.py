"""Node-ranking measures over word graphs.

Twelve measures: degree (k), strength (s), PageRank and its weighted variant
(pi, pi_w), eigenvector (EV, EV_w), betweenness (B, B_w), closeness (C, C_w)
and self-avoiding-walk accessibility at hierarchy levels 1 and 2 (A1, A2).
Weighted shortest-path measures read an edge of weight ``x`` as distance
``1/x`` (strength as proximity).
"""

from __future__ import annotations

import heapq
import math
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from kwnet.graph import WordGraph

MEASURE_IDS = ("k", "s", "pi", "pi_w", "EV", "EV_w", "B", "B_w", "C", "C_w", "A1", "A2")


class ConvergenceError(RuntimeError):
    """Power iteration failed to reach its tolerance; carries the residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class MeasureError(RuntimeError):
    """A batch computation failed for one measure."""

    def __init__(self, measure: str, cause: Exception):
        super().__init__(f"measure {measure!r} failed: {cause}")
        self.measure = measure


@dataclass(frozen=True)
class PageRankParams:
    gamma: float = 0.85
    beta: float | None = None      # None: (1 - gamma) / N, the stochastic default
    tolerance: float = 1e-10
    max_iterations: int = 200

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must be in [0, 1], got {self.gamma}")
        if self.beta is not None and self.beta < 0:
            raise ValueError(f"beta must be nonnegative, got {self.beta}")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")


@dataclass(frozen=True)
class CentralityVector:
    measure: str
    scores: dict[str, float]
    w: int = 0
    p: float = 0.0
    embedding: str = ""


def rank_nodes(scores: dict[str, float]) -> list[str]:
    """Descending score, ties broken by ascending stem."""
    return sorted(scores, key=lambda node: (-scores[node], node))


def _vector(graph: WordGraph, measure: str, scores: dict[str, float]) -> CentralityVector:
    return CentralityVector(
        measure=measure, scores=scores, w=graph.w, p=graph.p, embedding=graph.embedding
    )


def degree(graph: WordGraph) -> CentralityVector:
    return _vector(graph, "k", {n: float(graph.degree(n)) for n in graph.nodes})


def strength(graph: WordGraph) -> CentralityVector:
    return _vector(graph, "s", {n: graph.strength(n) for n in graph.nodes})


def _adjacency_matrix(graph: WordGraph, weighted: bool) -> np.ndarray:
    n = len(graph.nodes)
    index = {node: i for i, node in enumerate(graph.nodes)}
    a = np.zeros((n, n))
    for (u, v), edge in graph.edges.items():
        value = edge.weight if weighted else 1.0
        a[index[u], index[v]] = value
        a[index[v], index[u]] = value
    return a


def transition_matrix(a: np.ndarray) -> np.ndarray:
    """Column-normalized adjacency; zero-degree columns teleport uniformly."""
    n = a.shape[0]
    totals = a.sum(axis=0)
    m = np.divide(a, totals, out=np.zeros_like(a), where=totals > 0)
    m[:, totals == 0] = 1.0 / n
    return m


def pagerank(
    graph: WordGraph,
    params: PageRankParams | None = None,
    weighted: bool = False,
) -> CentralityVector:
    """Power-iteration fixed point of pi = gamma * M pi + beta.

    With the default beta = (1 - gamma)/N the scores sum to 1. Weighted mode
    normalizes columns by strength instead of degree.
    """
    params = params or PageRankParams()
    n = len(graph.nodes)
    if n == 0:
        raise ValueError("empty graph")
    beta = params.beta if params.beta is not None else (1.0 - params.gamma) / n
    m = transition_matrix(_adjacency_matrix(graph, weighted))
    pi = np.full(n, 1.0 / n)
    for _ in range(params.max_iterations):
        updated = params.gamma * (m @ pi) + beta
        residual = float(np.max(np.abs(updated - pi)))
        pi = updated
        if residual < params.tolerance:
            break
    else:
        raise ConvergenceError(
            f"pagerank did not converge in {params.max_iterations} iterations", residual
        )
    scores = {node: float(pi[i]) for i, node in enumerate(graph.nodes)}
    return _vector(graph, "pi_w" if weighted else "pi", scores)


def eigenvector(
    graph: WordGraph,
    weighted: bool = False,
    tolerance: float = 1e-12,
    max_iterations: int = 1000,
) -> CentralityVector:
    """Principal eigenvector of the adjacency matrix, unit 1-norm.

    Iterates on A + I: the shift leaves eigenvectors untouched and breaks the
    period-2 oscillation of bipartite graphs.
    """
    if not graph.edges:
        raise ValueError("eigenvector centrality needs at least one edge")
    n = len(graph.nodes)
    b = _adjacency_matrix(graph, weighted) + np.eye(n)
    x = np.full(n, 1.0 / n)
    for _ in range(max_iterations):
        y = b @ x
        y /= y.sum()
        residual = float(np.max(np.abs(y - x)))
        x = y
        if residual < tolerance:
            break
    else:
        raise ConvergenceError(
            f"eigenvector iteration did not converge in {max_iterations} iterations", residual
        )
    scores = {node: float(x[i]) for i, node in enumerate(graph.nodes)}
    return _vector(graph, "EV_w" if weighted else "EV", scores)


def _edge_distances(graph: WordGraph, weighted: bool, exact: bool):
    """Per-node neighbor -> distance maps. Exact mode uses rational arithmetic
    (every float weight is exactly rational, so 1/weight stays exact)."""
    dist = {}
    for node in graph.nodes:
        if weighted:
            if exact:
                dist[node] = {m: 1 / Fraction(e.weight) for m, e in graph.neighbors(node).items()}
            else:
                dist[node] = {m: 1.0 / e.weight for m, e in graph.neighbors(node).items()}
        else:
            dist[node] = dict.fromkeys(graph.neighbors(node), 1)
    return dist


def _sorted_adjacency(graph: WordGraph) -> dict[str, list[str]]:
    return {node: sorted(graph.neighbors(node)) for node in graph.nodes}


def _sssp_unweighted(adj: dict[str, list[str]], source: str):
    """BFS shortest paths: visit order, predecessor DAG, path counts, distances."""
    dist = {source: 0}
    sigma = {source: 1}
    preds: dict[str, list[str]] = {source: []}
    order = []
    queue = deque([source])
    while queue:
        node = queue.popleft()
        order.append(node)
        for nbr in adj[node]:
            if nbr not in dist:
                dist[nbr] = dist[node] + 1
                sigma[nbr] = 0
                preds[nbr] = []
                queue.append(nbr)
            if dist[nbr] == dist[node] + 1:
                sigma[nbr] += sigma[node]
                preds[nbr].append(node)
    return order, preds, sigma, dist


def _sssp_weighted(adj: dict[str, list[str]], distances, source: str, zero=0.0):
    """Dijkstra shortest paths with path counting over the predecessor DAG."""
    dist = {}
    sigma = {source: 1}
    preds: dict[str, list[str]] = {source: []}
    order = []
    seen = {source: zero}
    heap = [(seen[source], source)]
    while heap:
        d, node = heapq.heappop(heap)
        if node in dist:
            continue
        dist[node] = d
        order.append(node)
        node_distances = distances[node]
        for nbr in adj[node]:
            if nbr in dist:
                continue
            candidate = d + node_distances[nbr]
            if nbr not in seen or candidate < seen[nbr]:
                seen[nbr] = candidate
                sigma[nbr] = sigma[node]
                preds[nbr] = [node]
                heapq.heappush(heap, (candidate, nbr))
            elif candidate == seen[nbr]:
                sigma[nbr] += sigma[node]
                preds[nbr].append(node)
    return order, preds, sigma, dist


def _brandes(graph: WordGraph, weighted: bool, zero, one):
    """Brandes dependency accumulation; arithmetic follows the seeds given
    (floats for production, Fractions for exact reproducibility)."""
    bc = {node: zero for node in graph.nodes}
    adj = _sorted_adjacency(graph)
    distances = _edge_distances(graph, weighted, exact=isinstance(one, Fraction)) if weighted else None
    for source in graph.nodes:
        if weighted:
            order, preds, sigma, _ = _sssp_weighted(adj, distances, source, zero)
        else:
            order, preds, sigma, _ = _sssp_unweighted(adj, source)
        delta = {node: zero for node in order}
        for node in reversed(order):
            coeff = (one + delta[node]) / sigma[node]
            for pred in preds[node]:
                delta[pred] += sigma[pred] * coeff
            if node != source:
                bc[node] += delta[node]
    return {node: value / 2 for node, value in bc.items()}  # undirected double count


def betweenness(graph: WordGraph, weighted: bool = False) -> CentralityVector:
    """Shortest-path betweenness (endpoints excluded, undirected halving)."""
    scores = _brandes(graph, weighted, 0.0, 1.0)
    return _vector(graph, "B_w" if weighted else "B", scores)


def betweenness_exact(graph: WordGraph, weighted: bool = False) -> dict[str, Fraction]:
    """Betweenness in exact rational arithmetic (slower; bitwise reproducible)."""
    return _brandes(graph, weighted, Fraction(0), Fraction(1))


def closeness(graph: WordGraph, weighted: bool = False) -> CentralityVector:
    """Harmonic closeness scaled by graph size: C_i = N * sum_j 1/d_ij.

    Unreachable pairs contribute nothing (1/inf = 0), so disconnected graphs
    need no special casing.
    """
    n = len(graph.nodes)
    adj = _sorted_adjacency(graph)
    distances = _edge_distances(graph, weighted, exact=False) if weighted else None
    scores = {}
    for node in graph.nodes:
        if weighted:
            _, _, _, dist = _sssp_weighted(adj, distances, node)
        else:
            _, _, _, dist = _sssp_unweighted(adj, node)
        scores[node] = n * sum(1.0 / d for other, d in dist.items() if other != node)
    return _vector(graph, "C_w" if weighted else "C", scores)


def _saw_endpoint_counts(adj: dict[str, list[str]], start: str, h: int):
    """Endpoint distribution of length-h self-avoiding walks from ``start``.

    Each step moves uniformly among unvisited neighbors; walks that dead-end
    before h steps drop out (their mass is excluded, not redistributed), so
    the total may be less than 1. A walk's probability is 1 over the product
    of its branch counts; everything is kept in integer arithmetic over a
    common denominator, so the distribution is exact.

    Returns (numerators per endpoint, common denominator).
    """
    # frontier: (current node, visited nodes, walk denominator)
    frontier = [(start, (start,), 1)]
    for _ in range(h):
        next_frontier = []
        for node, visited, denom in frontier:
            unvisited = [nbr for nbr in adj[node] if nbr not in visited]
            if not unvisited:
                continue
            step_denom = denom * len(unvisited)
            for nbr in unvisited:
                next_frontier.append((nbr, visited + (nbr,), step_denom))
        frontier = next_frontier
    if not frontier:
        return {}, 1
    common = 1
    for denom in {denom for _, _, denom in frontier}:
        common = common * denom // math.gcd(common, denom)
    numerators: dict[str, int] = {}
    for node, _, denom in frontier:
        numerators[node] = numerators.get(node, 0) + common // denom
    return numerators, common


def _saw_endpoint_mass(graph: WordGraph, start: str, h: int) -> dict[str, Fraction]:
    """Exact rational view of the endpoint distribution (testing hook)."""
    adj = {node: list(graph.neighbors(node)) for node in graph.nodes}
    numerators, common = _saw_endpoint_counts(adj, start, h)
    return {node: Fraction(num, common) for node, num in numerators.items()}


def _true_diversity(numerators: dict[str, int], common: int) -> float:
    if not numerators:
        return 0.0  # no reachable outcomes
    values = [numerators[k] for k in sorted(numerators)]
    # a uniform full-mass distribution has diversity exactly equal to its
    # support size; returning the integer avoids exp(log(k)) rounding
    if sum(values) == common and len(set(values)) == 1:
        return float(len(values))
    return math.exp(-sum((n / common) * math.log(n / common) for n in values))


def accessibility(graph: WordGraph, h: int = 1) -> CentralityVector:
    """Exponential of the entropy of the self-avoiding-walk endpoint distribution."""
    if h not in (1, 2):
        raise ValueError(f"accessibility hierarchy level must be 1 or 2, got {h}")
    adj = {node: list(graph.neighbors(node)) for node in graph.nodes}
    scores = {
        node: _true_diversity(*_saw_endpoint_counts(adj, node, h)) for node in graph.nodes
    }
    return _vector(graph, f"A{h}", scores)


def compute(
    graph: WordGraph,
    measure: str,
    params: PageRankParams | None = None,
) -> CentralityVector:
    if measure == "k":
        return degree(graph)
    if measure == "s":
        return strength(graph)
    if measure in ("pi", "pi_w"):
        return pagerank(graph, params, weighted=measure.endswith("_w"))
    if measure in ("EV", "EV_w"):
        return eigenvector(graph, weighted=measure.endswith("_w"))
    if measure in ("B", "B_w"):
        return betweenness(graph, weighted=measure.endswith("_w"))
    if measure in ("C", "C_w"):
        return closeness(graph, weighted=measure.endswith("_w"))
    if measure in ("A1", "A2"):
        return accessibility(graph, h=int(measure[1]))
    raise ValueError(f"unknown measure {measure!r}; choose from {MEASURE_IDS}")


def compute_all(
    graph: WordGraph,
    measures: list[str],
    params: PageRankParams | None = None,
) -> list[CentralityVector]:
    """Batch wrapper; failures are re-raised tagged with the measure id."""
    out = []
    for measure in measures:
        try:
            out.append(compute(graph, measure, params))
        except (ValueError, ConvergenceError) as exc:
            raise MeasureError(measure, exc) from exc
    return out


def dump_scores(vectors: list[CentralityVector]) -> str:
    """Diffable dump: one ``measure<TAB>stem<TAB>score`` line, sorted."""
    lines = []
    for vector in sorted(vectors, key=lambda v: v.measure):
        for stem in sorted(vector.scores):
            lines.append(f"{vector.measure}\t{stem}\t{vector.scores[stem]:.12f}")
    return "\n".join(lines) + "\n"
