"""Rhyme pair enumeration, topic scoring, and plan sampling.

Pairs are drawn without replacement: each draw removes every remaining
pair that shares the drawn rhyme key, then renormalizes, so no two scheme
letters can end up with the same rhyme sound.
"""

from __future__ import annotations

import bisect
import random
from dataclasses import dataclass

import numpy as np

from .embeddings import EmbeddingTable, TopicVector, cosine
from .errors import GenerationError
from .forms import Form
from .phonodict import (
    PENTAMETER,
    PronouncingDict,
    Pronunciation,
    Relaxations,
    final_onset,
    fits_at,
    rhyme_key,
)


@dataclass(frozen=True, slots=True)
class RhymePair:
    word_a: str
    word_b: str
    variant_a: int
    variant_b: int
    key: tuple[str, ...]
    similarity: float


@dataclass
class PairDistribution:
    pairs: list[RhymePair]
    probabilities: np.ndarray

    def __len__(self):
        return len(self.pairs)


@dataclass(frozen=True)
class PlannedRhyme:
    word: str
    variant: int
    key: tuple[str, ...]


@dataclass
class RhymePlan:
    """Rhyme word (and chosen pronunciation) for each line of a form."""

    form: Form
    by_line: dict[int, PlannedRhyme]

    def check(self) -> None:
        for letter in self.form.letters:
            a, b = self.form.lines_of(letter)
            if self.by_line[a].key != self.by_line[b].key:
                raise AssertionError(f"letter {letter}: keys differ")
        keys = {letter: self.by_line[self.form.lines_of(letter)[0]].key
                for letter in self.form.letters}
        if len(set(keys.values())) != len(keys):
            raise AssertionError("two letters share a rhyme key")


def _final_capable(
    dictionary: PronouncingDict,
    word: str,
    template: str,
    relaxations: Relaxations,
) -> list[Pronunciation]:
    end = len(template) - 1
    return [
        p for p in dictionary.lookup(word) if fits_at(p, template, end, relaxations)
    ]


def enumerate_pairs(
    dictionary: PronouncingDict,
    vocab: set[str],
    topic: TopicVector,
    table: EmbeddingTable,
    template: str = PENTAMETER,
    relaxations: Relaxations = Relaxations(),
    min_keys: int = 7,
    forbid_matching_onsets: bool = False,
) -> list[RhymePair]:
    """All unordered pairs of distinct line-final-capable words that share
    a rhyme key, scored with the larger of the two topic cosines.

    A word with several pronunciations may appear in one pair per distinct
    rhyme key; the participating variant is recorded.
    """
    by_key: dict[tuple[str, ...], list[tuple[str, int]]] = {}
    onsets: dict[tuple[str, int], tuple[str, ...]] = {}
    for word in sorted(vocab):
        seen_keys = set()
        for pron in _final_capable(dictionary, word, template, relaxations):
            key = rhyme_key(pron)
            if key in seen_keys:
                continue  # lowest fitting variant represents the key
            seen_keys.add(key)
            by_key.setdefault(key, []).append((word, pron.variant))
            onsets[(word, pron.variant)] = final_onset(pron)

    sims: dict[str, float] = {}

    def sim(word: str) -> float:
        if word not in sims:
            vec = table.get(word)
            sims[word] = cosine(topic.values, vec) if vec is not None else -1.0
        return sims[word]

    pairs: list[RhymePair] = []
    for key in sorted(by_key):
        members = by_key[key]
        for i in range(len(members)):
            word_a, var_a = members[i]
            for j in range(i + 1, len(members)):
                word_b, var_b = members[j]
                if forbid_matching_onsets and (
                    onsets[(word_a, var_a)] == onsets[(word_b, var_b)]
                ):
                    continue
                pairs.append(
                    RhymePair(
                        word_a, word_b, var_a, var_b, key,
                        max(sim(word_a), sim(word_b)),
                    )
                )
    distinct = len({p.key for p in pairs})
    if distinct < min_keys:
        raise GenerationError(
            f"only {distinct} distinct rhyme keys among candidate pairs; "
            f"{min_keys} needed"
        )
    return pairs


def build_distribution(pairs: list[RhymePair], temperature: float = 0.1) -> PairDistribution:
    """Softmax of pair similarities at the given temperature."""
    if not pairs:
        raise ValueError("no rhyme pairs")
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    sims = np.array([p.similarity for p in pairs], dtype=np.float64)
    scaled = sims / temperature
    scaled -= scaled.max()
    weights = np.exp(scaled)
    return PairDistribution(list(pairs), weights / weights.sum())


def _draw(probs: np.ndarray, alive: np.ndarray, rng: random.Random) -> int:
    weights = np.where(alive, probs, 0.0)
    total = weights.sum()
    if total <= 0.0:
        raise GenerationError("rhyme pair distribution exhausted")
    cum = np.cumsum(weights)
    idx = int(np.searchsorted(cum, rng.random() * total, side="right"))
    return min(idx, len(probs) - 1)


def draw_pair(
    dist: PairDistribution, alive: np.ndarray, rng: random.Random
) -> tuple[RhymePair, np.ndarray]:
    """Draw one pair, then retire every pair sharing its key."""
    idx = _draw(dist.probabilities, alive, rng)
    pair = dist.pairs[idx]
    alive = alive.copy()
    for i, p in enumerate(dist.pairs):
        if p.key == pair.key:
            alive[i] = False
    return pair, alive


def sample_plan(
    dist: PairDistribution, form: Form, rng: random.Random
) -> tuple[RhymePlan, np.ndarray]:
    """One pair per scheme letter, discarding drawn keys as it goes.

    Within a pair, which word takes the letter's first line is a fair coin
    flip. Returns the plan and the surviving-pair mask so a caller can
    redraw a letter whose line search later dead-ends.
    """
    alive = np.ones(len(dist.pairs), dtype=bool)
    by_line: dict[int, PlannedRhyme] = {}
    for letter in form.letters:
        pair, alive = draw_pair(dist, alive, rng)
        first, second = form.lines_of(letter)
        a = PlannedRhyme(pair.word_a, pair.variant_a, pair.key)
        b = PlannedRhyme(pair.word_b, pair.variant_b, pair.key)
        if rng.random() < 0.5:
            by_line[first], by_line[second] = a, b
        else:
            by_line[first], by_line[second] = b, a
    plan = RhymePlan(form, by_line)
    plan.check()
    return plan, alive
