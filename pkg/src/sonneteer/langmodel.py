"""Backward n-gram language model with interpolated Kneser-Ney smoothing.

Lines are modelled right to left: training sequences are surface lines
reversed and wrapped in boundary markers, so the reversed stream starts at
LINE_END and finishes at LINE_START, and every conditional probability
conditions only on the tokens that FOLLOW a word in the surface line.

A query with a full (order-1)-token context scores with raw counts at the
top order and continuation counts below, per interpolated Kneser-Ney.
Shorter contexts (near the right edge of a line, where the only history
is the boundary marker) score the same way with the query's own length as
the top order. With discount 0 the model reduces to maximum likelihood,
backing off only when a context was never seen.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence, TextIO

import numpy as np

from .errors import FormatError

LINE_START = "<s>"
LINE_END = "</s>"
COMMA = ","
PERIOD = "."
BOUNDARY_TOKENS = frozenset({LINE_START, LINE_END})
PUNCT_TOKENS = frozenset({COMMA, PERIOD})

_FORMAT_HEADER = "sonneteer-ngram"
_FORMAT_VERSION = 1


def wrap_reversed(tokens: Sequence[str]) -> list[str]:
    """Reverse a surface-order token list and add boundary markers."""
    return [LINE_END, *reversed(tokens), LINE_START]


class _LevelSpec:
    """Discounted counts for one context at one interpolation level."""

    __slots__ = ("lam", "ids", "vals", "val_dict")

    def __init__(self, counts: dict[int, int], discount: float):
        total = sum(counts.values())
        self.lam = discount * len(counts) / total
        items = sorted(counts.items())
        self.ids = np.array([w for w, _ in items], dtype=np.int64)
        self.vals = np.array(
            [max(c - discount, 0.0) / total for _, c in items], dtype=np.float64
        )
        self.val_dict = dict(zip(self.ids.tolist(), self.vals.tolist()))


class NGramModel:
    """Immutable after construction; safe for concurrent scoring."""

    direction = "backward"

    def __init__(
        self,
        order: int,
        discount: float,
        words: Sequence[str],
        raw_counts: dict[int, dict[tuple[int, ...], dict[int, int]]],
        author: str | None = None,
    ):
        if order < 2:
            raise ValueError("order must be >= 2")
        if not 0.0 <= discount < 1.0:
            raise ValueError("discount must be in [0, 1)")
        if not words:
            raise FormatError("empty vocabulary")
        self.order = order
        self.discount = discount
        self.author = author
        self.words = tuple(words)
        self.word_ids = {w: i for i, w in enumerate(self.words)}
        self._raw = raw_counts
        # Continuation counts for context length c come from the distinct
        # (c+2)-gram types: how many different tokens precede (ctx, w) in
        # the reversed stream.
        self._cont: dict[int, dict[tuple[int, ...], dict[int, int]]] = {}
        for k in range(2, order + 1):
            reduced: dict[tuple[int, ...], dict[int, int]] = {}
            for ctx, followers in raw_counts.get(k, {}).items():
                bucket = reduced.setdefault(ctx[1:], {})
                for w in followers:
                    bucket[w] = bucket.get(w, 0) + 1
            self._cont[k - 2] = reduced
        self._cont1 = self._unigram_array(self._cont[0].get((), {}))
        self._raw1 = self._unigram_array(raw_counts.get(1, {}).get((), {}))
        self._spec_cache: dict[tuple, _LevelSpec | None] = {}

    def _unigram_array(self, counts: dict[int, int]) -> np.ndarray:
        arr = np.zeros(len(self.words), dtype=np.float64)
        total = sum(counts.values())
        if total:
            for w, c in counts.items():
                arr[w] = c / total
        return arr

    def vocabulary(self) -> frozenset[str]:
        return frozenset(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.word_ids

    # -- internals ----------------------------------------------------

    def _context_ids(self, context: Sequence[str]) -> tuple[int, ...]:
        k = min(self.order - 1, len(context))
        # Unknown context tokens get a sentinel id: no table contains it,
        # so every level that mentions it is skipped (pure backoff).
        return tuple(
            self.word_ids.get(w, -1) for w in context[len(context) - k :]
        )

    def _spec(self, top: bool, level: int, ctx: tuple[int, ...]) -> _LevelSpec | None:
        key = (top, level, ctx)
        try:
            return self._spec_cache[key]
        except KeyError:
            pass
        table = self._raw.get(level, {}) if top else self._cont.get(level - 1, {})
        counts = table.get(ctx)
        spec = _LevelSpec(counts, self.discount) if counts else None
        self._spec_cache[key] = spec
        return spec

    def _chain(self, ctx: tuple[int, ...]):
        top_level = len(ctx) + 1
        for level in range(2, top_level + 1):
            yield self._spec(level == top_level, level, ctx[len(ctx) - level + 1 :])

    def _prob_scalar(self, wid: int, ctx: tuple[int, ...]) -> float:
        p = self._cont1[wid] if ctx else self._raw1[wid]
        for spec in self._chain(ctx):
            if spec is None:
                continue
            p = spec.val_dict.get(wid, 0.0) + spec.lam * p
        return float(p)

    def prob_for_candidates(
        self, context: Sequence[str], cand_ids: np.ndarray, posmap: np.ndarray
    ) -> np.ndarray:
        """Vectorized probabilities for a candidate id array.

        posmap maps word id -> position in cand_ids (or -1). Performs the
        same arithmetic as the scalar path, so results agree bit for bit.
        """
        ctx = self._context_ids(context)
        base = self._cont1 if ctx else self._raw1
        arr = base[cand_ids].copy()
        for spec in self._chain(ctx):
            if spec is None:
                continue
            arr *= spec.lam
            sel = posmap[spec.ids]
            valid = sel >= 0
            if valid.any():
                arr[sel[valid]] += spec.vals[valid]
        return arr

    # -- public scoring -----------------------------------------------

    def log_prob(self, word: str, context: Sequence[str]) -> float:
        """Natural-log P(word | context).

        `context` lists the tokens following `word` in the surface line,
        in reversed-stream order: context[-1] is the token immediately to
        the word's right. Only the most recent order-1 tokens are used.
        """
        wid = self.word_ids.get(word)
        if wid is None:
            raise ValueError(f"word not in vocabulary: {word!r}")
        p = self._prob_scalar(wid, self._context_ids(context))
        return math.log(p) if p > 0.0 else -math.inf

    def sequence_logprob(self, tokens: Sequence[str]) -> float:
        """Log-likelihood of a surface-order line body.

        The body is reversed, wrapped in boundary markers, and chain-scored
        token by token; an empty body scores the lone line-start-given-
        line-end transition.
        """
        stream = wrap_reversed(tokens)
        for tok in stream:
            if tok not in self.word_ids:
                raise ValueError(f"token not in vocabulary: {tok!r}")
        total = 0.0
        for i in range(1, len(stream)):
            total += self.log_prob(stream[i], stream[max(0, i - self.order + 1) : i])
        return total

    # -- serialization ------------------------------------------------

    def save(self, stream: TextIO) -> None:
        stream.write(f"{_FORMAT_HEADER} {_FORMAT_VERSION}\n")
        stream.write(f"order {self.order}\n")
        stream.write(f"discount {self.discount!r}\n")
        if self.author:
            stream.write(f"author {self.author}\n")
        order_ids = sorted(self.word_ids.values(), key=lambda i: self.words[i])
        remap = {old: new for new, old in enumerate(order_ids)}
        stream.write(f"vocab {len(self.words)}\n")
        for old in order_ids:
            stream.write(self.words[old] + "\n")
        for k in sorted(self._raw):
            rows = []
            for ctx, followers in self._raw[k].items():
                for w, c in followers.items():
                    rows.append((*(remap[i] for i in ctx), remap[w], c))
            rows.sort()
            stream.write(f"ngrams {k} {len(rows)}\n")
            for row in rows:
                stream.write(" ".join(map(str, row)) + "\n")
        stream.write("end\n")

    def save_file(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            self.save(fh)

    @classmethod
    def load(cls, stream: TextIO) -> "NGramModel":
        lines = iter(enumerate(stream, start=1))

        def next_line():
            try:
                no, raw = next(lines)
            except StopIteration:
                raise FormatError("truncated model stream") from None
            return no, raw.rstrip("\n")

        no, header = next_line()
        parts = header.split()
        if len(parts) != 2 or parts[0] != _FORMAT_HEADER:
            raise FormatError(f"not a model stream: {header!r}", no)
        if parts[1] != str(_FORMAT_VERSION):
            raise FormatError(f"unsupported model version {parts[1]}", no)
        order = discount = None
        author = None
        while True:
            no, line = next_line()
            key, _, value = line.partition(" ")
            if key == "order":
                order = int(value)
            elif key == "discount":
                discount = float(value)
            elif key == "author":
                author = value
            elif key == "vocab":
                vocab_size = int(value)
                break
            else:
                raise FormatError(f"unexpected header line {line!r}", no)
        if order is None or discount is None:
            raise FormatError("missing order/discount in header")
        if vocab_size <= 0:
            raise FormatError("empty vocabulary block")
        words = [next_line()[1] for _ in range(vocab_size)]
        raw: dict[int, dict[tuple[int, ...], dict[int, int]]] = {}
        while True:
            no, line = next_line()
            if line == "end":
                break
            head = line.split()
            if len(head) != 3 or head[0] != "ngrams":
                raise FormatError(f"expected ngrams block, got {line!r}", no)
            k, rows = int(head[1]), int(head[2])
            table: dict[tuple[int, ...], dict[int, int]] = {}
            for _ in range(rows):
                no, row = next_line()
                nums = [int(x) for x in row.split()]
                if len(nums) != k + 1:
                    raise FormatError(f"bad {k}-gram row {row!r}", no)
                ctx, w, c = tuple(nums[: k - 1]), nums[k - 1], nums[k]
                table.setdefault(ctx, {})[w] = c
            raw[k] = table
        return cls(order, discount, words, raw, author=author)

    @classmethod
    def load_file(cls, path) -> "NGramModel":
        with open(path, encoding="utf-8") as fh:
            return cls.load(fh)

    def top_ngrams(self, n: int = 10) -> list[tuple[tuple[str, ...], int]]:
        """Highest-count full-order n-grams, in reversed-stream order."""
        rows = []
        for ctx, followers in self._raw.get(self.order, {}).items():
            for w, c in followers.items():
                rows.append((tuple(self.words[i] for i in (*ctx, w)), c))
        rows.sort(key=lambda rc: (-rc[1], rc[0]))
        return rows[:n]


def train(
    sequences: Iterable[Sequence[str]],
    order: int = 3,
    discount: float = 0.75,
    author: str | None = None,
) -> NGramModel:
    """Count n-grams over already-reversed, boundary-wrapped sequences."""
    if order < 2:
        raise ValueError("order must be >= 2")
    if not 0.0 <= discount < 1.0:
        raise ValueError("discount must be in [0, 1)")
    word_ids: dict[str, int] = {}
    seqs_ids = []
    for seq in sequences:
        ids = []
        for tok in seq:
            if tok not in word_ids:
                word_ids[tok] = len(word_ids)
            ids.append(word_ids[tok])
        if ids:
            seqs_ids.append(ids)
    if not seqs_ids:
        raise ValueError("no training sequences")
    raw: dict[int, dict[tuple[int, ...], dict[int, int]]] = {
        k: {} for k in range(1, order + 1)
    }
    for ids in seqs_ids:
        for k in range(1, order + 1):
            table = raw[k]
            for i in range(len(ids) - k + 1):
                ctx = tuple(ids[i : i + k - 1])
                w = ids[i + k - 1]
                bucket = table.setdefault(ctx, {})
                bucket[w] = bucket.get(w, 0) + 1
    words = sorted(word_ids, key=word_ids.get)
    return NGramModel(order, discount, words, raw, author=author)
