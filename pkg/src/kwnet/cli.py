"""Command-line pipeline: preprocess, export-candidates, build-network, rank,
evaluate, sweep, report.

Every subcommand reads the raw corpus (line-delimited JSON) and preprocesses
inline, so a sweep cell is always reproducible in isolation from the same
flags. Exit codes: 0 success, 1 usage error, 2 data error, 3 partial sweep
failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from kwnet.centrality import MEASURE_IDS, PageRankParams, compute
from kwnet.corpus import (
    CorpusFormatError,
    ProcessedDocument,
    corpus_stats,
    load_corpus,
    load_stopwords,
    preprocess_corpus,
    write_processed,
)
from kwnet.embeddings import (
    ContextualEmbeddingSet,
    EmbeddingFormatError,
    SimilarityConfig,
    StaticEmbeddingTable,
)
from kwnet.evaluation import (
    EmbeddingSpec,
    EvalRecord,
    SweepConfigError,
    SweepGrid,
    accuracy,
    best_per_measure,
    document_accuracies,
    extract_keywords,
    gains,
    render_table,
)
from kwnet.graph import GraphConfig, build_cooccurrence, dump_graph, enrich

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PARTIAL = 3


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class RunManifest:
    """Everything a sweep depends on; validated before any work starts."""

    corpus: str
    stopwords: str | None
    stemmer: str
    embeddings: str | None
    embedding_mode: str
    w_values: tuple[int, ...]
    p_values: tuple[float, ...]
    measures: tuple[str, ...]
    out: str
    jobs: int = 1

    def validate(self) -> None:
        for label, path in (("corpus", self.corpus), ("stopword", self.stopwords),
                            ("embedding", self.embeddings)):
            if path is not None and not Path(path).is_file():
                raise FileNotFoundError(f"{label} file not found: {path}")
        if self.jobs < 1:
            raise UsageError(f"--jobs must be >= 1, got {self.jobs}")
        # grid invariants (baselines present, ranges) are SweepGrid's to check
        SweepGrid(w_values=self.w_values, p_values=self.p_values, measures=self.measures)


def _sweep_manifest(args) -> RunManifest:
    manifest = RunManifest(
        corpus=args.corpus,
        stopwords=args.stopwords,
        stemmer=args.stemmer,
        embeddings=args.embeddings,
        embedding_mode=args.embedding_mode.replace("-", "_") if args.embeddings else "",
        w_values=_parse_ints(args.w),
        p_values=_parse_p_values(args.p),
        measures=_parse_measures(args.measures),
        out=args.out,
        jobs=args.jobs,
    )
    manifest.validate()
    return manifest


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse integer list {text!r}") from None


def _parse_p_values(text: str) -> tuple[float, ...]:
    """Either a comma list ("0,0.05,0.1") or a range spec ("start:stop:step")."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            if step <= 0:
                raise UsageError("P step must be positive")
            values = []
            i = 0
            while True:
                value = round(start + i * step, 9)
                if value > stop + 1e-12:
                    break
                values.append(value)
                i += 1
            return tuple(values)
        return tuple(round(float(part), 9) for part in text.split(","))
    except ValueError:
        raise UsageError(f"cannot parse P values {text!r}") from None


def _parse_measures(text: str) -> tuple[str, ...]:
    if text == "all":
        return MEASURE_IDS
    measures = tuple(text.split(","))
    unknown = [m for m in measures if m not in MEASURE_IDS]
    if unknown:
        raise UsageError(f"unknown measures {unknown}; valid ids: {','.join(MEASURE_IDS)}")
    return measures


def _load_embedding_source(path: str, mode: str):
    if mode == "static":
        return StaticEmbeddingTable.load(path)
    return ContextualEmbeddingSet.load(path)


def _safe_filename(doc_id: str) -> str:
    safe = re.sub(r"[^A-Za-z0-9_.-]", "_", doc_id)
    if safe != doc_id:
        safe = f"{safe}-{hashlib.sha1(doc_id.encode('utf-8')).hexdigest()[:8]}"
    return safe


def _sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _load_pipeline(args) -> tuple[list[ProcessedDocument], frozenset[str]]:
    stopwords = load_stopwords(args.stopwords)
    raw = load_corpus(args.corpus)
    return preprocess_corpus(raw, stopwords, args.stemmer), stopwords


def _embedding_spec(args) -> EmbeddingSpec:
    if not getattr(args, "embeddings", None):
        return EmbeddingSpec(name="none")
    mode = args.embedding_mode.replace("-", "_")
    source = _load_embedding_source(args.embeddings, mode)
    name = f"{mode}:{Path(args.embeddings).name}"
    return EmbeddingSpec(name=name, source=source, simcfg=SimilarityConfig(mode=mode))


def _require_embeddings(args, p_values) -> None:
    if any(p < 0 or p > 1 for p in p_values):
        raise UsageError("P values must lie in [0, 1]")
    if any(p > 0 for p in p_values) and not getattr(args, "embeddings", None):
        raise UsageError("P > 0 requires --embeddings (and --embedding-mode)")


def _build_doc_graph(doc: ProcessedDocument, w: int, p: float, spec: EmbeddingSpec):
    base = build_cooccurrence(doc, w)
    if p == 0.0:
        return base
    if spec.source is None:
        raise UsageError("P > 0 requires an embedding source")
    return enrich(base, GraphConfig(w=w, p=p), spec.source, spec.simcfg)


# ----------------------------------------------------------------- commands


def cmd_preprocess(args) -> int:
    docs, _ = _load_pipeline(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_processed(docs, out_dir / "processed.jsonl")
    stats = corpus_stats(docs)
    print(f"|D| = {stats['documents']} (usable {stats['usable']})")
    print(f"<W> = {stats['mean_tokens']:.2f}")
    print(f"<U> = {stats['mean_vocabulary']:.2f}")
    print(f"<S> = {stats['mean_sentences']:.2f}")
    print(f"<K> = {stats['mean_references']:.2f}")
    return EXIT_OK


def cmd_export_candidates(args) -> int:
    docs, _ = _load_pipeline(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    vocabulary = sorted({stem for doc in docs for sentence in doc.sentences for stem in sentence})
    (out_dir / "vocabulary.txt").write_text(
        "".join(f"{stem}\n" for stem in vocabulary), encoding="utf-8"
    )
    with open(out_dir / "occurrences.jsonl", "w", encoding="utf-8") as fh:
        for doc in docs:
            for s_index, sentence in enumerate(doc.sentences):
                for t_index, stem in enumerate(sentence):
                    record = {
                        "doc_id": doc.id,
                        "sentence_index": s_index,
                        "token_index": t_index,
                        "stem": stem,
                    }
                    fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
    if not vocabulary:
        logger.warning("corpus produced an empty vocabulary")
    print(f"vocabulary: {len(vocabulary)} stems -> {out_dir / 'vocabulary.txt'}")
    return EXIT_OK


def cmd_build_network(args) -> int:
    docs, _ = _load_pipeline(args)
    spec = _embedding_spec(args)
    p = args.p_single
    _require_embeddings(args, [p])
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    selected = [d for d in docs if args.doc is None or d.id == args.doc]
    if args.doc is not None and not selected:
        raise CorpusFormatError(f"document id {args.doc!r} not found in corpus")
    written = 0
    for doc in selected:
        if not doc.sentences:
            logger.warning("skipping unusable document %r", doc.id)
            continue
        graph = _build_doc_graph(doc, args.w_single, p, spec)
        path = out_dir / f"{_safe_filename(doc.id)}.graph.tsv"
        path.write_text(dump_graph(graph), encoding="utf-8")
        written += 1
    print(f"wrote {written} graph dumps to {out_dir}")
    return EXIT_OK


def cmd_rank(args) -> int:
    docs, _ = _load_pipeline(args)
    spec = _embedding_spec(args)
    p = args.p_single
    _require_embeddings(args, [p])
    measures = _parse_measures(args.measures)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    from kwnet.centrality import dump_scores

    written = 0
    for doc in docs:
        if not doc.sentences:
            logger.warning("skipping unusable document %r", doc.id)
            continue
        graph = _build_doc_graph(doc, args.w_single, p, spec)
        vectors = [compute(graph, m) for m in measures]
        path = out_dir / f"{_safe_filename(doc.id)}.scores.tsv"
        path.write_text(dump_scores(vectors), encoding="utf-8")
        written += 1
    print(f"wrote {written} score dumps to {out_dir}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    docs, _ = _load_pipeline(args)
    spec = _embedding_spec(args)
    p = args.p_single
    _require_embeddings(args, [p])
    measures = _parse_measures(args.measures)
    usable = [d for d in docs if d.usable and build_cooccurrence(d, 1).e_t > 0]
    if not usable:
        raise CorpusFormatError("no usable documents to evaluate")
    totals = dict.fromkeys(measures, 0.0)
    for doc in sorted(usable, key=lambda d: d.id):
        graph = _build_doc_graph(doc, args.w_single, p, spec)
        for measure in measures:
            vector = compute(graph, measure)
            extracted = extract_keywords(vector, len(doc.gold_stems), doc_id=doc.id)
            totals[measure] += accuracy(extracted, doc.gold_stems)
    for measure in measures:
        record = {
            "measure": measure,
            "w": args.w_single,
            "p": p,
            "embedding": spec.name,
            "accuracy": totals[measure] / len(usable),
            "documents": len(usable),
        }
        print(json.dumps(record, sort_keys=True))
    return EXIT_OK


def _cell_key(parts: dict) -> str:
    return hashlib.sha256(json.dumps(parts, sort_keys=True).encode("utf-8")).hexdigest()


def _doc_cells(doc, w_values, p_values, measures, spec, params):
    """Worker for one document: ({(measure, w, p): acc}, {(measure, w, p): err})."""
    failures: dict = {}
    grid = SweepGrid(w_values=w_values, p_values=p_values, measures=measures, embeddings=(spec,))
    accs = document_accuracies(doc, grid, spec, params, failures=failures)
    return accs, failures


def cmd_sweep(args) -> int:
    manifest = _sweep_manifest(args)
    _require_embeddings(args, manifest.p_values)
    docs, _ = _load_pipeline(args)
    spec = _embedding_spec(args)
    w_values, p_values, measures = manifest.w_values, manifest.p_values, manifest.measures

    out_dir = Path(manifest.out)
    cache_dir = out_dir / "cache"
    cache_dir.mkdir(parents=True, exist_ok=True)
    base_key = {
        "corpus": _sha256_file(manifest.corpus),
        "stopwords": _sha256_file(manifest.stopwords) if manifest.stopwords else "default",
        "stemmer": manifest.stemmer,
        "embeddings": _sha256_file(manifest.embeddings) if manifest.embeddings else "",
        "mode": manifest.embedding_mode,
    }

    usable = [d for d in docs if d.usable and build_cooccurrence(d, 1).e_t > 0]
    skipped = len(docs) - len(usable)
    if skipped:
        logger.warning("sweep: skipping %d unusable or edgeless documents", skipped)
    if not usable:
        raise CorpusFormatError("no usable documents to evaluate")
    usable.sort(key=lambda d: d.id)

    cells = [(m, w, p) for m in measures for w in sorted(w_values) for p in sorted(p_values)]
    cache_paths = {
        cell: cache_dir / f"{_cell_key({**base_key, 'measure': cell[0], 'w': cell[1], 'p': repr(cell[2])})}.json"
        for cell in cells
    }
    means: dict[tuple[str, int, float], float] = {}
    needed = []
    for cell, path in cache_paths.items():
        if path.exists():
            means[cell] = json.loads(path.read_text())["accuracy"]
        else:
            needed.append(cell)

    failures: dict[tuple[str, int, float], str] = {}
    if needed:
        needed_measures = tuple(sorted({m for m, _, _ in needed}))
        needed_w = tuple(sorted({w for _, w, _ in needed}))
        needed_p = tuple(sorted({p for _, _, p in needed}))
        if 0.0 not in needed_p:
            needed_p = (0.0, *needed_p)  # P axis must satisfy grid invariants
        if 1 not in needed_w:
            needed_w = (1, *needed_w)
        params = PageRankParams()
        per_doc: dict[str, dict] = {}
        if manifest.jobs > 1:
            with ProcessPoolExecutor(max_workers=manifest.jobs) as pool:
                results = pool.map(
                    _doc_cells,
                    usable,
                    [needed_w] * len(usable),
                    [needed_p] * len(usable),
                    [needed_measures] * len(usable),
                    [spec] * len(usable),
                    [params] * len(usable),
                )
                for doc, (accs, fails) in zip(usable, results):
                    per_doc[doc.id] = accs
                    failures.update(fails)
        else:
            for doc in usable:
                accs, fails = _doc_cells(doc, needed_w, needed_p, needed_measures, spec, params)
                per_doc[doc.id] = accs
                failures.update(fails)
        for cell in needed:
            total, count = 0.0, 0
            for doc in usable:  # already sorted by id: deterministic reduction
                if cell in per_doc[doc.id]:
                    total += per_doc[doc.id][cell]
                    count += 1
            if count == len(usable):
                means[cell] = total / count
                cache_paths[cell].write_text(
                    json.dumps({"accuracy": means[cell], "documents": count}, sort_keys=True)
                )
            elif cell not in failures:
                failures[cell] = f"only {count}/{len(usable)} documents produced this cell"

    records = []
    for measure, w, p in cells:
        if (measure, w, p) not in means:
            continue
        acc = means[(measure, w, p)]
        gamma1, gamma2 = gains(acc, means.get((measure, 1, 0.0)), means.get((measure, w, 0.0)))
        records.append(EvalRecord(
            measure=measure, w=w, p=p, embedding=spec.name,
            accuracy=acc, gamma1=gamma1, gamma2=gamma2, documents=len(usable),
        ))
    records.sort(key=lambda r: (r.embedding, r.measure, r.w, r.p))
    _write_records(records, out_dir / "results.jsonl")
    (out_dir / "tables.txt").write_text(
        render_table(best_per_measure(records), title="best configuration per measure"),
        encoding="utf-8",
    )
    print(f"wrote {len(records)} records to {out_dir / 'results.jsonl'}")
    if failures:
        with open(out_dir / "failures.jsonl", "w", encoding="utf-8") as fh:
            for (measure, w, p), error in sorted(failures.items()):
                fh.write(json.dumps(
                    {"measure": measure, "w": w, "p": p, "error": error}, sort_keys=True
                ) + "\n")
        print(f"{len(failures)} cells failed; see {out_dir / 'failures.jsonl'}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _write_records(records: list[EvalRecord], path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps({
                "measure": r.measure, "w": r.w, "p": r.p, "embedding": r.embedding,
                "accuracy": r.accuracy, "gamma1": r.gamma1, "gamma2": r.gamma2,
                "documents": r.documents,
            }, sort_keys=True) + "\n")


def _read_records(path: str) -> list[EvalRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
                records.append(EvalRecord(
                    measure=data["measure"], w=data["w"], p=data["p"],
                    embedding=data["embedding"], accuracy=data["accuracy"],
                    gamma1=data["gamma1"], gamma2=data["gamma2"],
                    documents=data["documents"],
                ))
            except (json.JSONDecodeError, KeyError) as exc:
                raise CorpusFormatError(f"{path}:{lineno}: bad results record: {exc}") from None
    return records


def cmd_report(args) -> int:
    records = _read_records(args.results)
    table = render_table(best_per_measure(records), title="best configuration per measure")
    if args.out:
        Path(args.out).write_text(table, encoding="utf-8")
    else:
        print(table, end="")
    return EXIT_OK


# ------------------------------------------------------------------- parser


def _add_pipeline_flags(sub):
    sub.add_argument("--corpus", required=True, help="line-delimited JSON corpus")
    sub.add_argument("--stopwords", default=None, help="stopword file (default: packaged list)")
    sub.add_argument("--stemmer", default="porter", choices=["porter", "none"])


def _add_embedding_flags(sub):
    sub.add_argument("--embeddings", default=None, help="embedding file")
    sub.add_argument(
        "--embedding-mode",
        default="static",
        choices=["static", "bert-sim1", "bert-sim2"],
        dest="embedding_mode",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kwnet", description=__doc__)
    commands = parser.add_subparsers(dest="command", required=True)

    sub = commands.add_parser("preprocess", help="preprocess a corpus and print its statistics")
    _add_pipeline_flags(sub)
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=cmd_preprocess)

    sub = commands.add_parser("export-candidates", help="emit vocabulary and occurrence files for the embedding exporter")
    _add_pipeline_flags(sub)
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=cmd_export_candidates)

    sub = commands.add_parser("build-network", help="dump word graphs for inspection")
    _add_pipeline_flags(sub)
    _add_embedding_flags(sub)
    sub.add_argument("--doc", default=None, help="restrict to one document id")
    sub.add_argument("--w", type=int, default=1, choices=[1, 2, 3], dest="w_single")
    sub.add_argument("--p", type=float, default=0.0, dest="p_single")
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=cmd_build_network)

    sub = commands.add_parser("rank", help="dump per-document centrality scores")
    _add_pipeline_flags(sub)
    _add_embedding_flags(sub)
    sub.add_argument("--w", type=int, default=1, choices=[1, 2, 3], dest="w_single")
    sub.add_argument("--p", type=float, default=0.0, dest="p_single")
    sub.add_argument("--measures", default="all")
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=cmd_rank)

    sub = commands.add_parser("evaluate", help="mean accuracy for one (w, P) configuration")
    _add_pipeline_flags(sub)
    _add_embedding_flags(sub)
    sub.add_argument("--w", type=int, default=1, choices=[1, 2, 3], dest="w_single")
    sub.add_argument("--p", type=float, default=0.0, dest="p_single")
    sub.add_argument("--measures", default="all")
    sub.set_defaults(func=cmd_evaluate)

    sub = commands.add_parser("sweep", help="run the full (w, P, measure) grid with caching")
    _add_pipeline_flags(sub)
    _add_embedding_flags(sub)
    sub.add_argument("--w", default="1,2,3", help="comma list of window lengths")
    sub.add_argument("--p", default="0:1:0.01", help="comma list or start:stop:step")
    sub.add_argument("--measures", default="all")
    sub.add_argument("--jobs", type=int, default=1)
    sub.add_argument("--out", required=True)
    sub.set_defaults(func=cmd_sweep)

    sub = commands.add_parser("report", help="render the best-per-measure table from a results file")
    sub.add_argument("--results", required=True)
    sub.add_argument("--out", default=None)
    sub.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, SweepConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CorpusFormatError, EmbeddingFormatError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
