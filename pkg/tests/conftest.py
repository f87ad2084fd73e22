import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make synth.py importable


@pytest.fixture
def tiny_corpus_path(tmp_path):
    docs = [
        {
            "id": "d1",
            "text": "Complex networks model text structure. Words form network edges. Network centrality ranks words.",
            "keywords": ["complex networks", "centrality"],
        },
        {
            "id": "d2",
            "text": "Keyword extraction finds important words. Graph methods rank keywords by centrality!",
            "keywords": ["keyword extraction", "graph"],
        },
        {
            "id": "d3",
            "text": "Embedding vectors capture word similarity. Similar words link through virtual edges?",
            "keywords": ["embeddings", "virtual edges"],
        },
    ]
    path = tmp_path / "corpus.jsonl"
    path.write_text("".join(json.dumps(d) + "\n" for d in docs), encoding="utf-8")
    return path
