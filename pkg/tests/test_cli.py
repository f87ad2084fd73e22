import json

import numpy as np
import pytest

from kwnet.cli import EXIT_DATA, EXIT_OK, EXIT_PARTIAL, EXIT_USAGE, main


@pytest.fixture
def embeddings_path(tmp_path, tiny_corpus_path):
    assert main(["export-candidates", "--corpus", str(tiny_corpus_path),
                 "--out", str(tmp_path / "cand")]) == EXIT_OK
    vocab = (tmp_path / "cand" / "vocabulary.txt").read_text().split()
    rng = np.random.default_rng(13)
    path = tmp_path / "vectors.txt"
    with open(path, "w") as fh:
        fh.write(f"{len(vocab)} 6\n")
        for word in vocab:
            fh.write(word + " " + " ".join(f"{x:.6f}" for x in rng.normal(size=6)) + "\n")
    return path


def sweep_args(corpus, out, embeddings=None, measures="k,s,C", p="0:0.2:0.1", jobs=None):
    args = ["sweep", "--corpus", str(corpus), "--w", "1,2", "--p", p,
            "--measures", measures, "--out", str(out)]
    if embeddings is not None:
        args += ["--embeddings", str(embeddings)]
    if jobs is not None:
        args += ["--jobs", str(jobs)]
    return args


class TestPreprocess:
    def test_stats_block(self, tmp_path, tiny_corpus_path, capsys):
        rc = main(["preprocess", "--corpus", str(tiny_corpus_path), "--out", str(tmp_path / "pre")])
        assert rc == EXIT_OK
        out = capsys.readouterr().out
        assert "|D| = 3" in out
        assert "<K> =" in out
        processed = (tmp_path / "pre" / "processed.jsonl").read_text().splitlines()
        assert len(processed) == 3
        record = json.loads(processed[0])
        assert record["stats"]["W"] == sum(len(s) for s in record["sentences"])

    def test_missing_stopword_file(self, tmp_path, tiny_corpus_path):
        rc = main(["preprocess", "--corpus", str(tiny_corpus_path),
                   "--stopwords", str(tmp_path / "nope.txt"), "--out", str(tmp_path / "pre")])
        assert rc == EXIT_DATA

    def test_missing_corpus(self, tmp_path):
        rc = main(["preprocess", "--corpus", str(tmp_path / "nope.jsonl"), "--out", str(tmp_path / "pre")])
        assert rc == EXIT_DATA


class TestExportCandidates:
    def test_vocabulary_and_occurrences(self, tmp_path, tiny_corpus_path):
        out = tmp_path / "cand"
        assert main(["export-candidates", "--corpus", str(tiny_corpus_path), "--out", str(out)]) == EXIT_OK
        vocab = (out / "vocabulary.txt").read_text().split()
        assert vocab == sorted(set(vocab))
        occurrences = [json.loads(line) for line in (out / "occurrences.jsonl").read_text().splitlines()]
        assert {o["stem"] for o in occurrences} == set(vocab)
        first = occurrences[0]
        assert set(first) == {"doc_id", "sentence_index", "token_index", "stem"}

    def test_empty_corpus(self, tmp_path):
        corpus = tmp_path / "empty.jsonl"
        corpus.write_text("")
        out = tmp_path / "cand"
        assert main(["export-candidates", "--corpus", str(corpus), "--out", str(out)]) == EXIT_OK
        assert (out / "vocabulary.txt").read_text() == ""


class TestBuildNetworkAndRank:
    def test_graph_dump(self, tmp_path, tiny_corpus_path):
        out = tmp_path / "nets"
        rc = main(["build-network", "--corpus", str(tiny_corpus_path), "--doc", "d1",
                   "--w", "2", "--out", str(out)])
        assert rc == EXIT_OK
        dump = (out / "d1.graph.tsv").read_text().splitlines()
        e_t, e_v, w, p = dump[0].split("\t")
        assert int(e_v) == 0 and int(w) == 2
        assert len(dump) == 1 + int(e_t)

    def test_unknown_doc_id(self, tmp_path, tiny_corpus_path):
        rc = main(["build-network", "--corpus", str(tiny_corpus_path), "--doc", "missing",
                   "--out", str(tmp_path / "nets")])
        assert rc == EXIT_DATA

    def test_rank_scores_dump(self, tmp_path, tiny_corpus_path):
        out = tmp_path / "scores"
        rc = main(["rank", "--corpus", str(tiny_corpus_path), "--w", "1",
                   "--measures", "k,A1", "--out", str(out)])
        assert rc == EXIT_OK
        lines = (out / "d1.scores.tsv").read_text().splitlines()
        measures = {line.split("\t")[0] for line in lines}
        assert measures == {"k", "A1"}

    def test_p_without_embeddings_is_usage_error(self, tmp_path, tiny_corpus_path):
        rc = main(["rank", "--corpus", str(tiny_corpus_path), "--w", "1", "--p", "0.2",
                   "--out", str(tmp_path / "scores")])
        assert rc == EXIT_USAGE

    def test_out_of_range_p_is_usage_error(self, tmp_path, tiny_corpus_path):
        rc = main(["rank", "--corpus", str(tiny_corpus_path), "--w", "1", "--p", "1.5",
                   "--out", str(tmp_path / "scores")])
        assert rc == EXIT_USAGE

    def test_unsupported_window_is_usage_error(self, tmp_path, tiny_corpus_path):
        rc = main(["rank", "--corpus", str(tiny_corpus_path), "--w", "4",
                   "--out", str(tmp_path / "scores")])
        assert rc == EXIT_USAGE


class TestEvaluate:
    def test_prints_records(self, tiny_corpus_path, capsys):
        rc = main(["evaluate", "--corpus", str(tiny_corpus_path), "--w", "1", "--measures", "k,pi"])
        assert rc == EXIT_OK
        lines = capsys.readouterr().out.strip().splitlines()
        records = [json.loads(line) for line in lines]
        assert [r["measure"] for r in records] == ["k", "pi"]
        for record in records:
            assert 0.0 <= record["accuracy"] <= 1.0
            assert record["documents"] == 3


class TestSweep:
    def test_single_cell_grid(self, tmp_path, tiny_corpus_path, capsys):
        out = tmp_path / "sweep1"
        rc = main(["sweep", "--corpus", str(tiny_corpus_path), "--w", "1", "--p", "0",
                   "--measures", "k", "--out", str(out)])
        assert rc == EXIT_OK
        records = [json.loads(line) for line in (out / "results.jsonl").read_text().splitlines()]
        assert len(records) == 1
        assert records[0]["gamma1"] == 0.0 and records[0]["gamma2"] == 0.0
        assert (out / "tables.txt").read_text().count("\n") >= 4

    def test_rerun_hits_cache_and_is_byte_identical(self, tmp_path, tiny_corpus_path, embeddings_path):
        out = tmp_path / "sweep2"
        assert main(sweep_args(tiny_corpus_path, out, embeddings_path)) == EXIT_OK
        first = (out / "results.jsonl").read_bytes()
        cache_files = sorted((out / "cache").glob("*.json"))
        assert cache_files
        assert main(sweep_args(tiny_corpus_path, out, embeddings_path)) == EXIT_OK
        assert (out / "results.jsonl").read_bytes() == first

    def test_interrupted_run_resumes_to_identical_output(self, tmp_path, tiny_corpus_path, embeddings_path):
        clean_out = tmp_path / "clean"
        assert main(sweep_args(tiny_corpus_path, clean_out, embeddings_path)) == EXIT_OK
        reference = (clean_out / "results.jsonl").read_bytes()

        resumed_out = tmp_path / "resumed"
        assert main(sweep_args(tiny_corpus_path, resumed_out, embeddings_path)) == EXIT_OK
        # simulate an interruption that lost the results and half the cache
        (resumed_out / "results.jsonl").unlink()
        for path in sorted((resumed_out / "cache").glob("*.json"))[::2]:
            path.unlink()
        assert main(sweep_args(tiny_corpus_path, resumed_out, embeddings_path)) == EXIT_OK
        assert (resumed_out / "results.jsonl").read_bytes() == reference

    def test_jobs_do_not_change_output(self, tmp_path, tiny_corpus_path, embeddings_path):
        serial = tmp_path / "serial"
        parallel = tmp_path / "parallel"
        assert main(sweep_args(tiny_corpus_path, serial, embeddings_path, jobs=1)) == EXIT_OK
        assert main(sweep_args(tiny_corpus_path, parallel, embeddings_path, jobs=2)) == EXIT_OK
        assert (serial / "results.jsonl").read_bytes() == (parallel / "results.jsonl").read_bytes()

    def test_cell_failure_reports_partial_exit(self, tmp_path, tiny_corpus_path, monkeypatch):
        import kwnet.evaluation as evaluation

        real_compute = evaluation.compute

        def flaky_compute(graph, measure, params=None):
            if measure == "EV":
                raise ValueError("injected failure")
            return real_compute(graph, measure, params)

        monkeypatch.setattr(evaluation, "compute", flaky_compute)
        out = tmp_path / "partial"
        rc = main(["sweep", "--corpus", str(tiny_corpus_path), "--w", "1", "--p", "0",
                   "--measures", "k,EV", "--out", str(out)])
        assert rc == EXIT_PARTIAL
        failures = [json.loads(line) for line in (out / "failures.jsonl").read_text().splitlines()]
        assert failures and failures[0]["measure"] == "EV"
        records = [json.loads(line) for line in (out / "results.jsonl").read_text().splitlines()]
        assert [r["measure"] for r in records] == ["k"]

    def test_usage_error_exit_code(self, tmp_path, tiny_corpus_path):
        rc = main(["sweep", "--corpus", str(tiny_corpus_path), "--w", "1", "--p", "0",
                   "--measures", "nope", "--out", str(tmp_path / "x")])
        assert rc == EXIT_USAGE

    def test_grid_without_baseline_w_is_usage_error(self, tmp_path, tiny_corpus_path):
        rc = main(["sweep", "--corpus", str(tiny_corpus_path), "--w", "2,3", "--p", "0",
                   "--measures", "k", "--out", str(tmp_path / "x")])
        assert rc == EXIT_USAGE

    def test_cell_reproducible_in_isolation_via_evaluate(self, tmp_path, tiny_corpus_path,
                                                         embeddings_path, capsys):
        out = tmp_path / "sweep"
        assert main(sweep_args(tiny_corpus_path, out, embeddings_path)) == EXIT_OK
        records = [json.loads(line) for line in (out / "results.jsonl").read_text().splitlines()]
        cell = next(r for r in records if r["measure"] == "C" and r["w"] == 2 and r["p"] == 0.2)
        capsys.readouterr()
        rc = main(["evaluate", "--corpus", str(tiny_corpus_path), "--w", "2", "--p", "0.2",
                   "--embeddings", str(embeddings_path), "--measures", "C"])
        assert rc == EXIT_OK
        standalone = json.loads(capsys.readouterr().out.strip())
        assert standalone["accuracy"] == cell["accuracy"]


class TestReport:
    def test_report_from_results(self, tmp_path, tiny_corpus_path, capsys):
        out = tmp_path / "sweep"
        assert main(["sweep", "--corpus", str(tiny_corpus_path), "--w", "1", "--p", "0",
                     "--measures", "k,s", "--out", str(out)]) == EXIT_OK
        capsys.readouterr()
        rc = main(["report", "--results", str(out / "results.jsonl")])
        assert rc == EXIT_OK
        text = capsys.readouterr().out
        assert "Meas." in text and "Acc." in text

    def test_bad_args_exit_usage(self):
        assert main(["report"]) == EXIT_USAGE
        assert main(["no-such-command"]) == EXIT_USAGE
