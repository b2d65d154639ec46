import json

import pytest

from hatescan.lexicon import load_seed_lexicon


@pytest.fixture
def seed_lexicon():
    return load_seed_lexicon()


@pytest.fixture
def jsonl_corpus(tmp_path):
    """Factory writing a JSONL corpus file from dicts (or raw lines)."""

    def write(rows, name="corpus.jsonl"):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as f:
            for row in rows:
                if isinstance(row, str):
                    f.write(row + "\n")
                else:
                    f.write(json.dumps(row, ensure_ascii=False) + "\n")
        return str(path)

    return write


def make_doc(doc_id, text, site="siteA", timestamp="2017-06-01T12:00:00Z"):
    return {"id": doc_id, "site": site, "timestamp": timestamp, "text": text}
