"""Keyword extraction from co-occurrence networks with embedding-similarity edges."""

from kwnet.corpus import (
    CorpusFormatError,
    DocumentStats,
    ProcessedDocument,
    RawDocument,
    corpus_stats,
    get_stemmer,
    load_corpus,
    load_stopwords,
    preprocess,
    preprocess_corpus,
    segment_sentences,
)
from kwnet.embeddings import (
    ContextualEmbeddingSet,
    EmbeddingFormatError,
    SimilarityConfig,
    StaticEmbeddingTable,
    UndefinedSimilarityError,
    cosine,
    similarity,
    top_similar_pairs,
)
from kwnet.graph import (
    Edge,
    GraphConfig,
    WordGraph,
    build_cooccurrence,
    dump_graph,
    eligible_pairs,
    enrich,
    round_half_up,
    strip_virtual,
)
from kwnet.centrality import (
    MEASURE_IDS,
    CentralityVector,
    ConvergenceError,
    MeasureError,
    PageRankParams,
    accessibility,
    betweenness,
    betweenness_exact,
    closeness,
    compute_all,
    degree,
    dump_scores,
    eigenvector,
    pagerank,
    rank_nodes,
    strength,
)
from kwnet.evaluation import (
    EmbeddingSpec,
    EvalRecord,
    KeywordSet,
    SweepConfigError,
    SweepGrid,
    accuracy,
    best_per_measure,
    extract_keywords,
    gains,
    render_table,
    run_sweep,
)

__version__ = "0.1.0"
