import io

import numpy as np
import pytest

from efge.io import EmbeddingFormatError, load_embeddings, save_embeddings


def test_small_file_layout():
    sink = io.StringIO()
    save_embeddings(np.array([[1.0, 2.0], [3.0, 4.5]]), ["a", "b"], sink)
    lines = sink.getvalue().splitlines()
    assert lines == ["2 2", "a 1 2", "b 3 4.5"]


def test_round_trip(rng):
    vectors = rng.normal(size=(30, 16))
    tokens = [f"v{i}" for i in range(30)]
    sink = io.StringIO()
    save_embeddings(vectors, tokens, sink)
    sink.seek(0)
    got_tokens, got = load_embeddings(sink)
    assert got_tokens == tokens
    assert np.abs(got - vectors).max() < 1e-6


@pytest.mark.parametrize("text,match", [
    ("3 128\n" + "a" + " 0" * 128 + "\n" + "b" + " 0" * 128 + "\n", "declares 3 rows"),
    ("1 2\na 0 0 0\n", "expected 2 values"),
    ("2 1\na 0\na 1\n", "duplicate token"),
    ("x\n", "header"),
    ("1 two\n", "integers"),
    ("1 1\na 0\nb 1\n", "more rows"),
])
def test_load_errors(text, match):
    with pytest.raises(EmbeddingFormatError, match=match):
        load_embeddings(io.StringIO(text))


def test_refuses_non_finite():
    with pytest.raises(ValueError):
        save_embeddings(np.array([[np.nan]]), ["a"], io.StringIO())
    with pytest.raises(ValueError):
        save_embeddings(np.zeros((2, 2)), ["a"], io.StringIO())
