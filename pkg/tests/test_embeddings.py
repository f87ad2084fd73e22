import math
import random

import numpy as np
import pytest

from oracles import nested_loop_bert_sim2
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


class TestCosine:
    def test_identity(self):
        v = np.array([0.3, -2.0, 5.0])
        assert cosine(v, v) == 1.0

    def test_orthogonal(self):
        assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_45_degrees(self):
        # dot = 1, norms = sqrt(2) and 1
        assert cosine(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == pytest.approx(
            math.sqrt(2) / 2, abs=1e-15
        )

    def test_zero_norm_rejected(self):
        with pytest.raises(UndefinedSimilarityError):
            cosine(np.zeros(3), np.ones(3))

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            cosine(np.ones(2), np.ones(3))

    def test_clamped_to_unit_interval(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            u, v = rng.normal(size=4), rng.normal(size=4)
            value = cosine(u, v)
            assert -1.0 <= value <= 1.0
            assert cosine(u, v) == cosine(v, u)


class TestStaticTable:
    def test_round_trip(self, tmp_path):
        table = StaticEmbeddingTable({"alpha": [1.0, 2.0], "beta": [0.5, -0.25]})
        path = tmp_path / "vec.txt"
        table.save(path)
        loaded = StaticEmbeddingTable.load(path)
        assert loaded.dimension == 2
        assert "alpha" in loaded and "beta" in loaded
        assert np.allclose(loaded.vector("alpha"), [1.0, 2.0])

    def test_header_mismatch_rejected(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("2 2\nalpha 1.0 2.0\n")
        with pytest.raises(EmbeddingFormatError, match="declares 2"):
            StaticEmbeddingTable.load(path)

    def test_bad_component_count_rejected(self, tmp_path):
        path = tmp_path / "vec.txt"
        path.write_text("1 3\nalpha 1.0 2.0\n")
        with pytest.raises(EmbeddingFormatError, match=":2:"):
            StaticEmbeddingTable.load(path)

    def test_nan_rejected(self):
        with pytest.raises(EmbeddingFormatError):
            StaticEmbeddingTable({"alpha": [float("nan"), 1.0]})

    def test_inconsistent_dimensions_rejected(self):
        with pytest.raises(EmbeddingFormatError):
            StaticEmbeddingTable({"a": [1.0], "b": [1.0, 2.0]})


class TestContextualSet:
    def test_frequencies(self):
        ctx = ContextualEmbeddingSet({"a": [np.array([1.0, 0.0])] * 3, "b": [np.array([0.0, 1.0])]})
        assert ctx.frequency("a") == 3
        assert ctx.frequency("b") == 1

    def test_load(self, tmp_path):
        path = tmp_path / "ctx.jsonl"
        lines = [
            '{"doc_id": "d", "sentence_index": 0, "token_index": 0, "stem": "a", "vector": [1.0, 0.0]}',
            '{"doc_id": "d", "sentence_index": 0, "token_index": 2, "stem": "a", "vector": [0.0, 1.0]}',
            '{"doc_id": "d", "sentence_index": 1, "token_index": 0, "stem": "b", "vector": [1.0, 1.0]}',
        ]
        path.write_text("\n".join(lines) + "\n")
        ctx = ContextualEmbeddingSet.load(path)
        assert ctx.dimension == 2
        assert ctx.frequency("a") == 2 and ctx.frequency("b") == 1

    def test_missing_field_rejected(self, tmp_path):
        path = tmp_path / "ctx.jsonl"
        path.write_text('{"doc_id": "d", "stem": "a", "vector": [1.0]}\n')
        with pytest.raises(EmbeddingFormatError, match="sentence_index"):
            ContextualEmbeddingSet.load(path)


class TestSimilarity:
    def test_static_is_cosine_of_table_vectors(self):
        table = StaticEmbeddingTable({"a": [1.0, 1.0], "b": [1.0, 0.0]})
        value = similarity("a", "b", table, SimilarityConfig("static"))
        assert value == pytest.approx(math.sqrt(2) / 2, abs=1e-12)

    def test_missing_stem_raises_keyerror(self):
        table = StaticEmbeddingTable({"a": [1.0, 0.0]})
        with pytest.raises(KeyError):
            similarity("a", "zz", table, SimilarityConfig("static"))

    def test_mode_source_mismatch(self):
        table = StaticEmbeddingTable({"a": [1.0, 0.0]})
        with pytest.raises(ValueError):
            similarity("a", "a", table, SimilarityConfig("bert_sim1"))

    def test_bert_sim2_single_occurrences_degenerate_to_cosine(self):
        ctx = ContextualEmbeddingSet({"a": [np.array([1.0, 2.0])], "b": [np.array([2.0, 1.0])]})
        value = similarity("a", "b", ctx, SimilarityConfig("bert_sim2"))
        assert value == pytest.approx(cosine([1.0, 2.0], [2.0, 1.0]), abs=1e-12)

    def test_bert_sim1_identical_occurrences_match_static(self):
        v = [0.3, 0.4]
        ctx = ContextualEmbeddingSet({"a": [np.array(v)] * 3, "b": [np.array([1.0, 0.0])] * 2})
        table = StaticEmbeddingTable({"a": v, "b": [1.0, 0.0]})
        s1 = similarity("a", "b", ctx, SimilarityConfig("bert_sim1"))
        s2 = similarity("a", "b", table, SimilarityConfig("static"))
        assert s1 == pytest.approx(s2, abs=1e-12)

    def test_bert_sim1_single_occurrence_per_word_matches_static(self):
        npr = np.random.default_rng(21)
        vectors = {w: npr.normal(size=5) for w in ("a", "b", "c")}
        ctx = ContextualEmbeddingSet({w: [v] for w, v in vectors.items()})
        table = StaticEmbeddingTable(vectors)
        for x, y in (("a", "b"), ("a", "c"), ("b", "c")):
            s1 = similarity(x, y, ctx, SimilarityConfig("bert_sim1"))
            s2 = similarity(x, y, table, SimilarityConfig("static"))
            assert s1 == pytest.approx(s2, abs=1e-12)

    def test_bert_sim2_two_by_one_hand_value(self):
        # cos([1,0],[1,0]) = 1 and cos([0,1],[1,0]) = 0, mean = 0.5
        ctx = ContextualEmbeddingSet({
            "a": [np.array([1.0, 0.0]), np.array([0.0, 1.0])],
            "b": [np.array([1.0, 0.0])],
        })
        assert similarity("a", "b", ctx, SimilarityConfig("bert_sim2")) == pytest.approx(0.5, abs=1e-15)

    def test_bert_sim2_matches_nested_loop_oracle(self):
        rng = random.Random(11)
        npr = np.random.default_rng(11)
        for _ in range(50):
            fa, fb, d = rng.randint(1, 4), rng.randint(1, 4), rng.randint(2, 5)
            va = [npr.normal(size=d) for _ in range(fa)]
            vb = [npr.normal(size=d) for _ in range(fb)]
            ctx = ContextualEmbeddingSet({"a": va, "b": vb})
            ours = similarity("a", "b", ctx, SimilarityConfig("bert_sim2"))
            assert ours == pytest.approx(nested_loop_bert_sim2(va, vb), abs=1e-12)

    def test_symmetry_all_modes(self):
        npr = np.random.default_rng(5)
        table = StaticEmbeddingTable({"a": npr.normal(size=4), "b": npr.normal(size=4)})
        ctx = ContextualEmbeddingSet({
            "a": [npr.normal(size=4) for _ in range(3)],
            "b": [npr.normal(size=4) for _ in range(2)],
        })
        assert similarity("a", "b", table, SimilarityConfig("static")) == similarity(
            "b", "a", table, SimilarityConfig("static"))
        for mode in ("bert_sim1", "bert_sim2"):
            assert similarity("a", "b", ctx, SimilarityConfig(mode)) == pytest.approx(
                similarity("b", "a", ctx, SimilarityConfig(mode)), abs=1e-15)

    def test_bert_sim2_range(self):
        npr = np.random.default_rng(9)
        for _ in range(30):
            ctx = ContextualEmbeddingSet({
                "a": [npr.normal(size=3) for _ in range(npr.integers(1, 5))],
                "b": [npr.normal(size=3) for _ in range(npr.integers(1, 5))],
            })
            assert -1.0 <= similarity("a", "b", ctx, SimilarityConfig("bert_sim2")) <= 1.0


class TestTopSimilarPairs:
    def table(self):
        return StaticEmbeddingTable({
            "a": [1.0, 0.0],
            "b": [1.0, 0.1],
            "c": [0.0, 1.0],
            "d": [-1.0, 0.0],
        })

    def test_count_zero(self):
        assert top_similar_pairs([("a", "b")], 0, self.table(), SimilarityConfig("static")) == []

    def test_top_two_descending_matches_sort_oracle(self):
        table = self.table()
        cfg = SimilarityConfig("static")
        candidates = [("a", "b"), ("a", "c"), ("a", "d")]
        expected = sorted(
            ((similarity(x, y, table, cfg), (x, y)) for x, y in candidates),
            key=lambda item: (-item[0], item[1]),
        )
        result = top_similar_pairs(candidates, 2, table, cfg)
        assert [pair for pair, _ in result] == [pair for _, pair in expected[:2]]
        assert result[0][1] >= result[1][1]

    def test_tie_breaks_lexicographically(self):
        table = StaticEmbeddingTable({
            "a": [1.0, 0.0], "b": [1.0, 0.0], "c": [1.0, 0.0], "z": [0.0, 1.0],
        })
        result = top_similar_pairs(
            [("b", "c"), ("a", "b"), ("a", "c")], 1, table, SimilarityConfig("static")
        )
        assert result[0][0] == ("a", "b")

    def test_missing_embeddings_excluded(self):
        result = top_similar_pairs(
            [("a", "zz"), ("a", "b")], 2, self.table(), SimilarityConfig("static")
        )
        assert [pair for pair, _ in result] == [("a", "b")]

    def test_unordered_pair_input_canonicalized(self):
        result = top_similar_pairs([("b", "a")], 1, self.table(), SimilarityConfig("static"))
        assert result[0][0] == ("a", "b")

    def test_zero_norm_vector_excluded(self):
        table = StaticEmbeddingTable({"a": [1.0, 0.0], "b": [0.0, 0.0], "c": [0.0, 2.0]})
        result = top_similar_pairs(
            [("a", "b"), ("a", "c")], 2, table, SimilarityConfig("static")
        )
        assert [pair for pair, _ in result] == [("a", "c")]
