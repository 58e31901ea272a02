"""Word vector loading and topic scoring.

Vectors come from the common plain-text distribution format (one word and
its coordinates per line). Topics are the mean embedding of the prompt
tokens; rhyme candidates are scored by cosine similarity against it.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import FormatError


@dataclass
class EmbeddingTable:
    dimension: int
    vectors: dict[str, np.ndarray]

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.vectors

    def get(self, word: str) -> np.ndarray | None:
        return self.vectors.get(word.lower())


@dataclass
class TopicVector:
    values: np.ndarray
    source_tokens: tuple[str, ...]


def load_vectors(lines: Iterable[str]) -> EmbeddingTable:
    """Parse `word v1 v2 ... vd` lines; the first line fixes the dimension."""
    dimension = None
    vectors: dict[str, np.ndarray] = {}
    for line_no, raw in enumerate(lines, start=1):
        parts = raw.split()
        if not parts:
            continue
        word = parts[0].lower()
        try:
            values = np.array([float(x) for x in parts[1:]], dtype=np.float64)
        except ValueError as exc:
            raise FormatError(f"bad coordinate: {exc}", line_no) from None
        if dimension is None:
            if values.size == 0:
                raise FormatError("first line has no coordinates", line_no)
            dimension = values.size
        elif values.size != dimension:
            raise FormatError(
                f"dimension {values.size}, expected {dimension}", line_no
            )
        if word in vectors:
            warnings.warn(f"line {line_no}: duplicate vector for {word!r}, last wins")
        vectors[word] = values
    if dimension is None:
        raise FormatError("empty vector stream")
    return EmbeddingTable(dimension, vectors)


def load_vector_file(path) -> EmbeddingTable:
    with open(path, encoding="utf-8") as fh:
        return load_vectors(fh)


def topic_vector(prompt: Iterable[str], table: EmbeddingTable) -> TopicVector:
    """Mean embedding of the in-vocabulary prompt tokens."""
    tokens = [t.lower() for t in prompt]
    if not tokens:
        raise ValueError("empty prompt")
    known = [t for t in tokens if t in table]
    missing = [t for t in tokens if t not in table]
    if not known:
        raise ValueError(f"no prompt token in embedding vocabulary: {missing}")
    if missing:
        warnings.warn(f"prompt tokens outside embedding vocabulary: {missing}")
    stacked = np.stack([table.vectors[t] for t in known])
    return TopicVector(stacked.mean(axis=0), tuple(known))


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("cosine undefined for a zero vector")
    return float(np.dot(a, b) / (norm_a * norm_b))
