"""Corpus ingestion: tokenize author texts and train per-author bundles.

Verse corpora contribute one training sequence per line; prose corpora
one per sentence. Commas and periods survive as standalone tokens (comma
scoring depends on them); all other punctuation is dropped. Each
sequence is reversed and boundary-wrapped before n-gram counting, so the
resulting model predicts words from their right context.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .embeddings import EmbeddingTable
from .errors import GenerationError
from .langmodel import (
    BOUNDARY_TOKENS,
    COMMA,
    PERIOD,
    PUNCT_TOKENS,
    NGramModel,
    train,
    wrap_reversed,
)
from .phonodict import PronouncingDict

DEFAULT_MIN_VOCAB = 500

# Words may contain letters, digits, and interior apostrophes/hyphens;
# hyphens then split the word, apostrophes stay ('tis, don't).
_WORD_RE = re.compile(r"[a-z0-9']+(?:-[a-z0-9']+)*|[,.]")

_DASHES = str.maketrans({"—": " ", "–": " ", "-": "-"})


def _tokenize_piece(text: str) -> list[str]:
    # Leading apostrophes are kept ('tis, 'gainst live in the CMU dict);
    # trailing ones (closing quotes, bare possessives) are dropped.
    text = text.lower().translate(_DASHES)
    tokens = []
    for match in _WORD_RE.findall(text):
        if match in (",", "."):
            tokens.append(match)
        else:
            tokens.extend(part.rstrip("'") for part in match.split("-"))
    return [t for t in tokens if t.strip("'")]


DEFAULT_ABBREVIATIONS = frozenset(
    "mr mrs ms dr st jr sr prof rev hon vs etc".split()
)


def split_sentences(text: str, abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS):
    """Split prose on sentence-final . ! ? with abbreviation exceptions."""
    sentences = []
    current = []
    for chunk in re.split(r"(\.|!|\?)", text):
        if chunk in ("!", "?"):
            current.append(".")
            sentences.append("".join(current))
            current = []
        elif chunk == ".":
            prev = "".join(current).rstrip()
            last_word = prev.rsplit(None, 1)[-1].lower() if prev else ""
            current.append(".")
            if last_word.strip("'\"()") not in abbreviations:
                sentences.append("".join(current))
                current = []
        else:
            current.append(chunk)
    tail = "".join(current).strip()
    if tail:
        sentences.append(tail)
    return sentences


def tokenize(
    text: str,
    mode: str = "verse",
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
) -> list[list[str]]:
    """Token sequences for training: one per verse line or prose sentence."""
    if mode == "verse":
        pieces = text.splitlines()
    elif mode == "prose":
        pieces = split_sentences(text, abbreviations)
    else:
        raise ValueError(f"mode must be verse or prose, not {mode!r}")
    sequences = [toks for piece in pieces if (toks := _tokenize_piece(piece))]
    if not sequences:
        raise ValueError("corpus produced no token sequences")
    return sequences


def training_sequences(token_lines: list[list[str]]) -> list[list[str]]:
    """Reverse each surface sequence and add boundary markers."""
    return [wrap_reversed(toks) for toks in token_lines]


@dataclass
class AuthorBundle:
    """A trained backward model plus the vocabulary generation may use."""

    author: str
    model: NGramModel
    generation_vocab: frozenset[str]


def generation_vocabulary(
    model: NGramModel, dictionary: PronouncingDict, table: EmbeddingTable
) -> frozenset[str]:
    """Model vocabulary restricted to words with a pronunciation and an
    embedding; punctuation and boundary markers are never generated."""
    return frozenset(
        w
        for w in model.words
        if w not in PUNCT_TOKENS
        and w not in BOUNDARY_TOKENS
        and w in dictionary
        and w in table
    )


def make_bundle(
    author: str,
    model: NGramModel,
    dictionary: PronouncingDict,
    table: EmbeddingTable,
    min_vocab: int = DEFAULT_MIN_VOCAB,
) -> AuthorBundle:
    vocab = generation_vocabulary(model, dictionary, table)
    if len(vocab) < min_vocab:
        raise GenerationError(
            f"author {author!r}: generation vocabulary has {len(vocab)} words, "
            f"below the floor of {min_vocab}"
        )
    return AuthorBundle(author, model, vocab)


def build_bundle(
    author: str,
    text: str,
    dictionary: PronouncingDict,
    table: EmbeddingTable,
    order: int = 3,
    discount: float = 0.75,
    mode: str = "verse",
    min_vocab: int = DEFAULT_MIN_VOCAB,
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
) -> AuthorBundle:
    """Tokenize, train the backward model, and intersect vocabularies."""
    sequences = training_sequences(tokenize(text, mode, abbreviations))
    model = train(sequences, order=order, discount=discount, author=author)
    return make_bundle(author, model, dictionary, table, min_vocab)
