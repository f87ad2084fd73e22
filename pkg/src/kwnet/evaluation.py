"""Keyword extraction from centrality scores and grid evaluation.

A document's keyword set is the top-N ranked stems where N is its gold stem
count; accuracy is precision at that cutoff (which equals recall and F1
there). The sweep crosses (embedding config, measure, w, P) and reports,
alongside accuracy, the relative gains over the (w=1, P=0) baseline (gamma1)
and the same-w P=0 baseline (gamma2).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from kwnet.centrality import (
    CentralityVector,
    ConvergenceError,
    MeasureError,
    PageRankParams,
    compute,
    rank_nodes,
)
from kwnet.corpus import ProcessedDocument
from kwnet.embeddings import SimilarityConfig, top_similar_pairs
from kwnet.graph import GraphConfig, build_cooccurrence, eligible_pairs, enrich, round_half_up

logger = logging.getLogger(__name__)


class SweepConfigError(ValueError):
    """The grid is missing a baseline or otherwise unusable."""


@dataclass(frozen=True)
class KeywordSet:
    doc_id: str
    measure: str
    stems: tuple[str, ...]


@dataclass(frozen=True)
class EvalRecord:
    measure: str
    w: int
    p: float
    embedding: str
    accuracy: float
    gamma1: float | None     # None renders as "--" (undefined: zero baseline)
    gamma2: float | None
    documents: int


@dataclass(frozen=True)
class EmbeddingSpec:
    """One embedding configuration axis value for a sweep."""
    name: str
    source: object | None = None
    simcfg: SimilarityConfig | None = None


@dataclass(frozen=True)
class SweepGrid:
    w_values: tuple[int, ...]
    p_values: tuple[float, ...]
    measures: tuple[str, ...]
    embeddings: tuple[EmbeddingSpec, ...] = field(default=(EmbeddingSpec(name="none"),))

    def __post_init__(self):
        if not self.w_values or not self.p_values or not self.measures or not self.embeddings:
            raise SweepConfigError("every grid axis must be non-empty")
        if any(w not in (1, 2, 3) for w in self.w_values):
            raise SweepConfigError("window lengths are restricted to {1, 2, 3}")
        if 0.0 not in self.p_values:
            raise SweepConfigError("the P axis must contain 0 (gain baseline)")
        if 1 not in self.w_values:
            raise SweepConfigError("the w axis must contain 1 (traditional baseline)")
        if any(p < 0 or p > 1 for p in self.p_values):
            raise SweepConfigError("P values must lie in [0, 1]")


def extract_keywords(scores: CentralityVector, n: int, doc_id: str = "") -> KeywordSet:
    """Top-n stems by descending score, ties broken lexicographically."""
    if n < 1:
        raise ValueError(f"keyword count must be >= 1, got {n}")
    ranked = rank_nodes(scores.scores)
    if len(ranked) < n:
        logger.debug("graph has %d nodes, fewer than the %d requested keywords", len(ranked), n)
    return KeywordSet(doc_id=doc_id, measure=scores.measure, stems=tuple(ranked[:n]))


def accuracy(extracted: KeywordSet, gold: frozenset[str] | set[str]) -> float:
    """|extracted ∩ gold| / |gold|."""
    if not gold:
        raise ValueError("gold stem set must be non-empty")
    return len(set(extracted.stems) & set(gold)) / len(gold)


def gains(acc: float, acc_tr: float | None, acc_w: float | None) -> tuple[float | None, float | None]:
    """Relative gains over the two baselines; None where a baseline is 0/absent."""
    gamma1 = (acc - acc_tr) / acc_tr if acc_tr else None
    gamma2 = (acc - acc_w) / acc_w if acc_w else None
    return gamma1, gamma2


def document_accuracies(
    doc: ProcessedDocument,
    grid: SweepGrid,
    spec: EmbeddingSpec,
    params: PageRankParams | None = None,
    failures: dict | None = None,
) -> dict[tuple[str, int, float], float]:
    """Per-cell accuracy for one document: {(measure, w, p): acc}.

    Builds each co-occurrence graph once per w and ranks enrichment
    candidates once, reusing ranking prefixes across P values. Per-measure
    errors propagate unless a ``failures`` dict is supplied to collect them.
    """
    out: dict[tuple[str, int, float], float] = {}
    n = len(doc.gold_stems)
    for w in sorted(grid.w_values):
        base = build_cooccurrence(doc, w)
        max_wanted = max(round_half_up(p * base.e_t) for p in grid.p_values)
        ranked = None
        if max_wanted > 0 and spec.source is not None:
            ranked = top_similar_pairs(eligible_pairs(base), max_wanted, spec.source, spec.simcfg)
        for p in sorted(grid.p_values):
            if p == 0.0:
                graph = base
            else:
                if spec.source is None:
                    raise SweepConfigError(
                        f"grid requests P={p} but embedding config {spec.name!r} has no source"
                    )
                graph = enrich(base, GraphConfig(w=w, p=p), spec.source, spec.simcfg, ranked_pairs=ranked)
            for measure in grid.measures:
                try:
                    vector = compute(graph, measure, params)
                except (ValueError, ConvergenceError) as exc:
                    if failures is None:
                        raise MeasureError(measure, exc) from exc
                    failures[(measure, w, p)] = f"{doc.id}: {exc}"
                    continue
                extracted = extract_keywords(vector, n, doc_id=doc.id)
                out[(vector.measure, w, p)] = accuracy(extracted, doc.gold_stems)
    return out


def run_sweep(
    corpus: list[ProcessedDocument],
    grid: SweepGrid,
    params: PageRankParams | None = None,
) -> list[EvalRecord]:
    """Mean accuracy per grid cell over usable documents, with gains filled in."""
    usable = [
        doc for doc in corpus
        if doc.usable and build_cooccurrence(doc, 1).e_t > 0
    ]
    skipped = len(corpus) - len(usable)
    if skipped:
        logger.warning("sweep: skipping %d unusable or edgeless documents", skipped)
    if not usable:
        raise SweepConfigError("no usable documents to evaluate")
    records: list[EvalRecord] = []
    for spec in grid.embeddings:
        totals: dict[tuple[str, int, float], float] = {}
        for doc in sorted(usable, key=lambda d: d.id):
            for cell, acc in document_accuracies(doc, grid, spec, params).items():
                totals[cell] = totals.get(cell, 0.0) + acc
        means = {cell: total / len(usable) for cell, total in totals.items()}
        for measure in grid.measures:
            for w in sorted(grid.w_values):
                for p in sorted(grid.p_values):
                    acc = means[(measure, w, p)]
                    gamma1, gamma2 = gains(acc, means.get((measure, 1, 0.0)), means.get((measure, w, 0.0)))
                    records.append(EvalRecord(
                        measure=measure, w=w, p=p, embedding=spec.name,
                        accuracy=acc, gamma1=gamma1, gamma2=gamma2,
                        documents=len(usable),
                    ))
    records.sort(key=lambda r: (r.embedding, r.measure, r.w, r.p))
    return records


def best_per_measure(records: list[EvalRecord]) -> list[EvalRecord]:
    """Per (embedding, measure): the record with maximal accuracy.

    Ties prefer the smallest P, then the smallest w.
    """
    best: dict[tuple[str, str], EvalRecord] = {}
    for record in records:
        key = (record.embedding, record.measure)
        current = best.get(key)
        if current is None:
            best[key] = record
            continue
        challenger = (-record.accuracy, record.p, record.w)
        incumbent = (-current.accuracy, current.p, current.w)
        if challenger < incumbent:
            best[key] = record
    return [best[key] for key in sorted(best)]


def _format_gain(value: float | None) -> str:
    if value is None or round(value, 2) == 0.0:
        return "--"
    return f"{value:.2f}"


def render_table(records: list[EvalRecord], title: str = "") -> str:
    """Human-readable table in the measure / P / w / gamma1 / gamma2 / Acc layout."""
    lines = []
    if title:
        lines.append(title)
    header = f"{'Meas.':<8} {'P':>4} {'w':>2} {'G1':>6} {'G2':>6} {'Acc.':>8}"
    by_embedding: dict[str, list[EvalRecord]] = {}
    for record in records:
        by_embedding.setdefault(record.embedding, []).append(record)
    for embedding in sorted(by_embedding):
        lines.append(f"[embedding: {embedding}]")
        lines.append(header)
        lines.append("-" * len(header))
        for record in by_embedding[embedding]:
            lines.append(
                f"{record.measure:<8} {round(record.p * 100):>4} {record.w:>2} "
                f"{_format_gain(record.gamma1):>6} {_format_gain(record.gamma2):>6} "
                f"{record.accuracy:>8.4f}"
            )
    return "\n".join(lines) + "\n"
