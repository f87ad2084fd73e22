"""Corpus loading and the preprocessing pipeline.

Documents arrive as line-delimited JSON records (one object per line with
``id``, ``text`` and ``keywords`` fields) and leave as stemmed, stopword-free
token sentences plus the gold stem set used for evaluation.
"""

from __future__ import annotations

import json
import logging
import re
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from kwnet._porter import porter_stem

logger = logging.getLogger(__name__)

CORPUS_FORMAT_JSONL = "jsonl"


class CorpusFormatError(ValueError):
    """Raised for malformed corpus files; message carries file/line context."""


@dataclass(frozen=True)
class RawDocument:
    id: str
    text: str
    gold_keyphrases: tuple[str, ...]


@dataclass(frozen=True)
class DocumentStats:
    tokens: int       # W: total tokens after preprocessing
    sentences: int    # S: non-empty sentences
    vocabulary: int   # U: distinct stems
    references: int   # K: distinct gold stems


@dataclass(frozen=True)
class ProcessedDocument:
    id: str
    sentences: tuple[tuple[str, ...], ...]
    gold_stems: frozenset[str]
    stats: DocumentStats = field(compare=False)

    @property
    def usable(self) -> bool:
        return bool(self.sentences) and bool(self.gold_stems)


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    """Read one stopword per line; ``None`` loads the packaged default list."""
    if path is None:
        text = resources.files("kwnet").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text("utf-8")
    words = frozenset(line.strip() for line in text.splitlines() if line.strip())
    if any(w != w.lower() for w in words):
        raise CorpusFormatError("stopword list must be lowercase")
    return words


def _fixpoint_porter(word: str) -> str:
    # a single Porter pass is not idempotent for every stem; iterate to the
    # fixed point so that stemming pre-stemmed gold keywords is stable
    while True:
        out = porter_stem(word)
        if out == word:
            return out
        word = out


_STEMMERS = {
    "porter": _fixpoint_porter,
    "none": lambda word: word,
}


def get_stemmer(stemmer_id: str):
    try:
        return _STEMMERS[stemmer_id]
    except KeyError:
        raise ValueError(f"unknown stemmer {stemmer_id!r}; choose from {sorted(_STEMMERS)}") from None


def load_corpus(path: str | Path, format: str = CORPUS_FORMAT_JSONL) -> list[RawDocument]:
    """Parse a corpus file into documents, preserving file order."""
    if format != CORPUS_FORMAT_JSONL:
        raise CorpusFormatError(f"unsupported corpus format {format!r}")
    docs: list[RawDocument] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: invalid JSON record: {exc}") from None
            if not isinstance(record, dict):
                raise CorpusFormatError(f"{path}:{lineno}: record is not an object")
            for fieldname in ("id", "text", "keywords"):
                if fieldname not in record:
                    raise CorpusFormatError(f"{path}:{lineno}: record missing field {fieldname!r}")
            doc_id = str(record["id"])
            if doc_id in seen:
                raise CorpusFormatError(f"{path}:{lineno}: duplicate document id {doc_id!r}")
            seen.add(doc_id)
            keywords = record["keywords"]
            if not isinstance(keywords, list) or not all(isinstance(k, str) for k in keywords):
                raise CorpusFormatError(f"{path}:{lineno}: keywords must be an array of strings")
            docs.append(RawDocument(id=doc_id, text=str(record["text"]), gold_keyphrases=tuple(keywords)))
    return docs


_SENTENCE_BREAK = re.compile(r"(?<=[.!?])(?![.!?])")


def segment_sentences(text: str) -> list[str]:
    """Split on sentence terminators (., !, ?), keeping them with the sentence."""
    pieces = _SENTENCE_BREAK.split(text)
    return [piece.strip() for piece in pieces if piece.strip()]


def _is_punct_or_symbol(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


def _clean_token(token: str) -> str | None:
    token = token.lower()
    start, end = 0, len(token)
    while start < end and _is_punct_or_symbol(token[start]):
        start += 1
    while end > start and _is_punct_or_symbol(token[end - 1]):
        end -= 1
    token = token[start:end]
    if not token or not any(ch.isalpha() for ch in token):
        return None  # pure punctuation or pure numeric
    return token


def tokenize(text: str, stopwords: frozenset[str], stem) -> list[str]:
    """Lowercase, strip edge punctuation, drop stopwords, stem the rest.

    Stopwords are filtered both on the surface form and on the stem, so no
    stopword survives the pipeline under either spelling.
    """
    out = []
    for raw in text.split():
        token = _clean_token(raw)
        if token is None or token in stopwords:
            continue
        stemmed = stem(token)
        if stemmed and stemmed not in stopwords:
            out.append(stemmed)
    return out


def preprocess(
    doc: RawDocument,
    stopwords: frozenset[str],
    stemmer: str = "porter",
) -> ProcessedDocument:
    """Run segmentation, stopword removal and stemming over one document."""
    stem = get_stemmer(stemmer)
    sentences = []
    for sentence in segment_sentences(doc.text):
        tokens = tokenize(sentence, stopwords, stem)
        if tokens:
            sentences.append(tuple(tokens))
    gold: set[str] = set()
    for phrase in doc.gold_keyphrases:
        gold.update(tokenize(phrase, stopwords, stem))
    total = sum(len(s) for s in sentences)
    stats = DocumentStats(
        tokens=total,
        sentences=len(sentences),
        vocabulary=len({t for s in sentences for t in s}),
        references=len(gold),
    )
    processed = ProcessedDocument(
        id=doc.id,
        sentences=tuple(sentences),
        gold_stems=frozenset(gold),
        stats=stats,
    )
    if not processed.usable:
        reason = "no tokens survive preprocessing" if not sentences else "no gold stems survive preprocessing"
        logger.warning("document %r is unusable: %s", doc.id, reason)
    return processed


def preprocess_corpus(
    docs: list[RawDocument],
    stopwords: frozenset[str],
    stemmer: str = "porter",
) -> list[ProcessedDocument]:
    return [preprocess(doc, stopwords, stemmer) for doc in docs]


def corpus_stats(docs: list[ProcessedDocument]) -> dict:
    """Dataset summary: document count plus mean W, U, S, K over usable docs."""
    usable = [d for d in docs if d.usable]
    n = len(usable)

    def mean(values):
        return sum(values) / n if n else 0.0

    return {
        "documents": len(docs),
        "usable": n,
        "mean_tokens": mean([d.stats.tokens for d in usable]),
        "mean_vocabulary": mean([d.stats.vocabulary for d in usable]),
        "mean_sentences": mean([d.stats.sentences for d in usable]),
        "mean_references": mean([d.stats.references for d in usable]),
    }


def write_processed(docs: list[ProcessedDocument], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            record = {
                "id": doc.id,
                "sentences": [list(s) for s in doc.sentences],
                "gold_stems": sorted(doc.gold_stems),
                "stats": {
                    "W": doc.stats.tokens,
                    "S": doc.stats.sentences,
                    "U": doc.stats.vocabulary,
                    "K": doc.stats.references,
                },
                "usable": doc.usable,
            }
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
