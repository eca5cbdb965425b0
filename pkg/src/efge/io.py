"""Embedding files in the word2vec text format.

The first line is ``<rows> <dim>``; each following line is a node token and
its ``dim`` values separated by spaces.
"""

from __future__ import annotations

from typing import Sequence, TextIO

import numpy as np


class EmbeddingFormatError(ValueError):
    pass


def save_embeddings(vectors: np.ndarray, tokens: Sequence[str], sink: TextIO) -> None:
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or len(vectors) != len(tokens):
        raise ValueError("need one vector per token")
    if not np.all(np.isfinite(vectors)):
        raise ValueError("refusing to write non-finite embeddings")
    sink.write(f"{vectors.shape[0]} {vectors.shape[1]}\n")
    for tok, row in zip(tokens, vectors):
        sink.write(tok + " " + " ".join(format(x, ".9g") for x in row) + "\n")


def load_embeddings(source: TextIO) -> tuple[list[str], np.ndarray]:
    header = source.readline().split()
    if len(header) != 2:
        raise EmbeddingFormatError("header must be '<rows> <dim>'")
    try:
        rows, dim = int(header[0]), int(header[1])
    except ValueError:
        raise EmbeddingFormatError("header must contain two integers") from None
    tokens: list[str] = []
    seen: set[str] = set()
    out = np.empty((rows, dim))
    for lineno, line in enumerate(source, start=2):
        parts = line.split()
        if not parts:
            continue
        if len(tokens) == rows:
            raise EmbeddingFormatError(f"line {lineno}: more rows than the header declares")
        if len(parts) != dim + 1:
            raise EmbeddingFormatError(f"line {lineno}: expected {dim} values, got {len(parts) - 1}")
        tok = parts[0]
        if tok in seen:
            raise EmbeddingFormatError(f"line {lineno}: duplicate token {tok!r}")
        seen.add(tok)
        out[len(tokens)] = [float(x) for x in parts[1:]]
        tokens.append(tok)
    if len(tokens) != rows:
        raise EmbeddingFormatError(f"header declares {rows} rows, found {len(tokens)}")
    return tokens, out
