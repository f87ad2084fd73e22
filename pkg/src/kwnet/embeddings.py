"""Word-vector storage and similarity queries.

Two sources are supported: a static table (one vector per stem, word2vec-style
text format) and a contextual set (one vector per occurrence). Contextual
similarity comes in two flavours: cosine of the per-word occurrence means
(``bert_sim1``), or the mean of all pairwise occurrence cosines
(``bert_sim2``, cost O(f_a * f_b) per pair).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

logger = logging.getLogger(__name__)

MODE_STATIC = "static"
MODE_BERT_SIM1 = "bert_sim1"
MODE_BERT_SIM2 = "bert_sim2"
MODES = (MODE_STATIC, MODE_BERT_SIM1, MODE_BERT_SIM2)


class EmbeddingFormatError(ValueError):
    """Raised for malformed embedding files; message carries file/line context."""


class UndefinedSimilarityError(ValueError):
    """Cosine against a zero-norm vector has no defined value."""


@dataclass(frozen=True)
class SimilarityConfig:
    mode: str = MODE_STATIC

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown similarity mode {self.mode!r}; choose from {MODES}")

    def compatible_with(self, source) -> bool:
        if self.mode == MODE_STATIC:
            return isinstance(source, StaticEmbeddingTable)
        return isinstance(source, ContextualEmbeddingSet)


def _check_vectors(array: np.ndarray, context: str) -> None:
    if not np.all(np.isfinite(array)):
        raise EmbeddingFormatError(f"{context}: non-finite vector component")


class StaticEmbeddingTable:
    """One vector of fixed dimension per stem, immutable after construction."""

    def __init__(self, vectors: dict[str, np.ndarray]):
        if not vectors:
            raise EmbeddingFormatError("empty embedding table")
        dims = {len(v) for v in vectors.values()}
        if len(dims) != 1:
            raise EmbeddingFormatError(f"inconsistent vector dimensions: {sorted(dims)}")
        self.dimension = dims.pop()
        self._vectors = {w: np.asarray(v, dtype=float) for w, v in vectors.items()}
        for w, v in self._vectors.items():
            _check_vectors(v, f"vector for {w!r}")
        if not any(np.linalg.norm(v) > 0 for v in self._vectors.values()):
            raise EmbeddingFormatError("all vectors have zero norm")
        self._units: dict[str, np.ndarray | None] = {}

    def __contains__(self, stem: str) -> bool:
        return stem in self._vectors

    def __len__(self) -> int:
        return len(self._vectors)

    def stems(self) -> list[str]:
        return sorted(self._vectors)

    def vector(self, stem: str) -> np.ndarray:
        return self._vectors[stem]

    def unit(self, stem: str) -> np.ndarray | None:
        """Unit-norm vector, or None when the stored vector has zero norm."""
        if stem not in self._units:
            v = self._vectors[stem]
            n = np.linalg.norm(v)
            self._units[stem] = v / n if n > 0 else None
        return self._units[stem]

    @classmethod
    def load(cls, path: str | Path) -> "StaticEmbeddingTable":
        """Read the text format: header line ``V d`` then ``token x1 .. xd``."""
        vectors: dict[str, np.ndarray] = {}
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().split()
            if len(header) != 2:
                raise EmbeddingFormatError(f"{path}:1: header must be 'V d'")
            try:
                count, dim = int(header[0]), int(header[1])
            except ValueError:
                raise EmbeddingFormatError(f"{path}:1: header must be two integers") from None
            for lineno, line in enumerate(fh, start=2):
                parts = line.rstrip("\n").split(" ")
                if len(parts) != dim + 1:
                    raise EmbeddingFormatError(
                        f"{path}:{lineno}: expected token plus {dim} components, got {len(parts)} fields"
                    )
                word = parts[0]
                if word in vectors:
                    raise EmbeddingFormatError(f"{path}:{lineno}: duplicate token {word!r}")
                try:
                    vectors[word] = np.array([float(x) for x in parts[1:]])
                except ValueError:
                    raise EmbeddingFormatError(f"{path}:{lineno}: non-numeric component") from None
        if len(vectors) != count:
            raise EmbeddingFormatError(f"{path}: header declares {count} vectors, file has {len(vectors)}")
        table = cls(vectors)
        if table.dimension != dim:
            raise EmbeddingFormatError(f"{path}: header dimension {dim} != vector dimension {table.dimension}")
        return table

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"{len(self._vectors)} {self.dimension}\n")
            for word in sorted(self._vectors):
                comps = " ".join(format(x, ".8g") for x in self._vectors[word])
                fh.write(f"{word} {comps}\n")


class ContextualEmbeddingSet:
    """One vector per occurrence of each stem; frequency f = occurrence count."""

    def __init__(self, occurrences: dict[str, list[np.ndarray]]):
        if not occurrences:
            raise EmbeddingFormatError("empty contextual embedding set")
        dims = {len(v) for vs in occurrences.values() for v in vs}
        if len(dims) != 1:
            raise EmbeddingFormatError(f"inconsistent vector dimensions: {sorted(dims)}")
        if any(len(vs) == 0 for vs in occurrences.values()):
            raise EmbeddingFormatError("stem with zero occurrences")
        self.dimension = dims.pop()
        self._occurrences = {w: np.array(vs, dtype=float) for w, vs in occurrences.items()}
        for w, m in self._occurrences.items():
            _check_vectors(m, f"vectors for {w!r}")
        self._unit_rows: dict[str, np.ndarray | None] = {}
        self._unit_means: dict[str, np.ndarray | None] = {}

    def __contains__(self, stem: str) -> bool:
        return stem in self._occurrences

    def __len__(self) -> int:
        return len(self._occurrences)

    def stems(self) -> list[str]:
        return sorted(self._occurrences)

    def frequency(self, stem: str) -> int:
        return self._occurrences[stem].shape[0]

    def occurrences(self, stem: str) -> np.ndarray:
        return self._occurrences[stem]

    def unit_rows(self, stem: str) -> np.ndarray | None:
        """Row-normalized occurrence matrix; None if any row has zero norm."""
        if stem not in self._unit_rows:
            m = self._occurrences[stem]
            norms = np.linalg.norm(m, axis=1)
            self._unit_rows[stem] = m / norms[:, None] if np.all(norms > 0) else None
        return self._unit_rows[stem]

    def unit_mean(self, stem: str) -> np.ndarray | None:
        """Unit-norm occurrence-mean vector; None when the mean has zero norm."""
        if stem not in self._unit_means:
            mean = self._occurrences[stem].mean(axis=0)
            n = np.linalg.norm(mean)
            self._unit_means[stem] = mean / n if n > 0 else None
        return self._unit_means[stem]

    @classmethod
    def load(cls, path: str | Path) -> "ContextualEmbeddingSet":
        """Read line-delimited JSON records: doc_id, sentence_index, token_index, stem, vector."""
        occurrences: dict[str, list[np.ndarray]] = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    record = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise EmbeddingFormatError(f"{path}:{lineno}: invalid JSON record: {exc}") from None
                for fieldname in ("doc_id", "sentence_index", "token_index", "stem", "vector"):
                    if fieldname not in record:
                        raise EmbeddingFormatError(f"{path}:{lineno}: record missing field {fieldname!r}")
                vec = record["vector"]
                if not isinstance(vec, list) or not vec:
                    raise EmbeddingFormatError(f"{path}:{lineno}: vector must be a non-empty array")
                occurrences.setdefault(record["stem"], []).append(np.asarray(vec, dtype=float))
        return cls(occurrences)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1] against rounding."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"vector length mismatch: {u.shape} vs {v.shape}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise UndefinedSimilarityError("cosine of a zero-norm vector is undefined")
    if np.array_equal(u, v):
        return 1.0  # dot(v, v)/|v|^2 can round below 1
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def _pair_similarity(a: str, b: str, source, cfg: SimilarityConfig) -> float | None:
    """Similarity, or None when either stem lacks a usable (nonzero) vector."""
    if cfg.mode == MODE_STATIC:
        ua, ub = source.unit(a), source.unit(b)
        if ua is None or ub is None:
            return None
        if a == b:
            return 1.0  # same vector; unit dot may round below 1
        return float(np.clip(np.dot(ua, ub), -1.0, 1.0))
    if cfg.mode == MODE_BERT_SIM1:
        ua, ub = source.unit_mean(a), source.unit_mean(b)
        if ua is None or ub is None:
            return None
        if a == b:
            return 1.0
        return float(np.clip(np.dot(ua, ub), -1.0, 1.0))
    ra, rb = source.unit_rows(a), source.unit_rows(b)
    if ra is None or rb is None:
        return None
    # mean over all f_a * f_b occurrence-pair cosines; each entry already in
    # [-1, 1] so the mean needs no re-clamping
    return float(np.clip(ra @ rb.T, -1.0, 1.0).mean())


def similarity(a: str, b: str, source, cfg: SimilarityConfig) -> float:
    """Similarity between two stems under the configured mode."""
    if not cfg.compatible_with(source):
        raise ValueError(f"mode {cfg.mode!r} is incompatible with {type(source).__name__}")
    if a not in source:
        raise KeyError(a)
    if b not in source:
        raise KeyError(b)
    value = _pair_similarity(a, b, source, cfg)
    if value is None:
        raise UndefinedSimilarityError(f"zero-norm vector for {a!r} or {b!r}")
    return value


def top_similar_pairs(
    candidates,
    count: int,
    source,
    cfg: SimilarityConfig,
) -> list[tuple[tuple[str, str], float]]:
    """The ``count`` highest-similarity candidate pairs, descending.

    Pairs with a missing or zero-norm vector on either side are excluded
    before ranking. Ties break on the lexicographically smaller pair. Returns
    fewer than ``count`` pairs only when eligible candidates run out.
    """
    if not cfg.compatible_with(source):
        raise ValueError(f"mode {cfg.mode!r} is incompatible with {type(source).__name__}")
    if count < 0:
        raise ValueError("count must be nonnegative")
    if count == 0:
        return []
    scored: list[tuple[float, tuple[str, str]]] = []
    skipped = 0
    for pair in candidates:
        a, b = pair
        if a > b:
            a, b = b, a
        if a not in source or b not in source:
            skipped += 1
            continue
        value = _pair_similarity(a, b, source, cfg)
        if value is None:
            skipped += 1
            continue
        scored.append((value, (a, b)))
    if skipped:
        logger.debug("top_similar_pairs: skipped %d pairs without usable vectors", skipped)
    scored.sort(key=lambda item: (-item[0], item[1]))
    if len(scored) < count:
        logger.warning(
            "top_similar_pairs: only %d eligible pairs for a request of %d", len(scored), count
        )
    return [(pair, value) for value, pair in scored[:count]]
