"""Backward beam search for one pentameter line.

A line is grown leftward from its rhyme word. States carry the syllables
still to fill, the language-model context, and the two newest tags; the
beam keeps the `width` best states per step (score descending, ties by
word order so runs are reproducible), and a state that exactly fills the
template is closed with the line-start boundary term.

Zero-probability extensions (possible only at discount 0) are treated as
dead ends: the searcher never emits a line the model scores at -inf.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from . import grammar
from .errors import SearchError
from .grammar import ForbiddenRuleSet, TagLexicon, violates
from .langmodel import LINE_END, LINE_START, NGramModel
from .phonodict import (
    PENTAMETER,
    PronouncingDict,
    Pronunciation,
    Relaxations,
    fits_bits,
    rhyme_key,
    stress_pattern,
)


@dataclass(frozen=True, slots=True)
class SearchState:
    words: tuple[str, ...]  # surface order; rightmost is the rhyme word
    prons: tuple[Pronunciation, ...]
    remaining: int
    ctx: tuple[str, ...]  # most recent reversed-stream tokens
    tag_window: tuple[str, ...]  # newest tag first, length <= 2
    score: float

    def sort_key(self):
        return (-self.score, self.words, tuple(p.variant for p in self.prons))

    def dedup_key(self):
        return (self.remaining, self.ctx, self.tag_window)


@dataclass(frozen=True, slots=True)
class LineDraft:
    words: tuple[str, ...]
    prons: tuple[Pronunciation, ...]
    score: float
    rhyme_word: str
    rhyme_key: tuple[str, ...]

    def sort_key(self):
        return (-self.score, self.words, tuple(p.variant for p in self.prons))


class _Column:
    """Candidates able to end at one template position."""

    __slots__ = ("words", "ids", "tags", "tags_arr", "min_syl", "variants", "posmap")

    def __init__(self, rows, vocab_size):
        self.words = [w for w, *_ in rows]
        self.ids = np.array([i for _, i, *_ in rows], dtype=np.int64)
        self.tags = [t for _, _, t, _ in rows]
        self.tags_arr = np.array(self.tags) if rows else np.empty(0, dtype="<U1")
        self.variants = [v for *_, v in rows]
        self.min_syl = np.array(
            [min(s for _, s in v) for v in self.variants] or [], dtype=np.int64
        )
        self.posmap = np.full(vocab_size, -1, dtype=np.int64)
        self.posmap[self.ids] = np.arange(len(rows), dtype=np.int64)


class CandidateIndex:
    """Per-template-position candidate arrays for one vocabulary and model.

    Built once per author bundle and shared by every line search; all
    members are read-only afterwards.
    """

    def __init__(
        self,
        dictionary: PronouncingDict,
        vocab: set[str],
        lexicon: TagLexicon,
        lm: NGramModel,
        template: str = PENTAMETER,
        relaxations: Relaxations = Relaxations(),
    ):
        self.dictionary = dictionary
        self.lexicon = lexicon
        self.template = template
        self.relaxations = relaxations
        usable = sorted(
            w for w in vocab if w in lm.word_ids and dictionary.lookup(w)
        )
        per_pos: list[list] = [[] for _ in template]
        for word in usable:
            prons = [(p, stress_pattern(p)) for p in dictionary.lookup(word)]
            tag = lexicon.primary_tag(word)
            wid = lm.word_ids[word]
            for end_pos in range(len(template)):
                fitting = [
                    (pron, len(bits))
                    for pron, bits in prons
                    if len(bits) <= end_pos + 1
                    and fits_bits(bits, template, end_pos, relaxations)
                ]
                if fitting:
                    per_pos[end_pos].append((word, wid, tag, fitting))
        self.columns = [_Column(rows, len(lm.words)) for rows in per_pos]

    def at(self, end_pos: int) -> _Column:
        return self.columns[end_pos]

    def final_column(self) -> _Column:
        return self.columns[-1]


def _forbidden_new_tags(rules: ForbiddenRuleSet, tag_window: tuple[str, ...]) -> set[str]:
    """Tags that, prepended to this window, would complete a rule."""
    forbidden = set()
    t1 = tag_window[0]
    for a, b in rules.bigrams:
        if b == t1:
            forbidden.add(a)
    if len(tag_window) >= 2:
        t2 = tag_window[1]
        for a, b, c in rules.trigrams:
            if b == t1 and c == t2:
                forbidden.add(a)
    return forbidden


def candidate_extensions(
    state: SearchState, index: CandidateIndex, rules: ForbiddenRuleSet
) -> list[tuple[str, Pronunciation]]:
    """Every legal (word, pronunciation) prepend for a state: it must fit
    the template slots ending at the current frontier, fit within the
    remaining syllables, and not complete a forbidden tag sequence."""
    if state.remaining <= 0:
        return []
    col = index.at(state.remaining - 1)
    forbidden = _forbidden_new_tags(rules, state.tag_window)
    out = []
    for pos, word in enumerate(col.words):
        if col.tags[pos] in forbidden:
            continue
        if col.min_syl[pos] > state.remaining:
            continue
        for pron, syl in col.variants[pos]:
            if syl <= state.remaining:
                out.append((word, pron))
    return out


def beam_search_line(
    rhyme_word: str,
    variant: int,
    lm: NGramModel,
    index: CandidateIndex,
    rules: ForbiddenRuleSet,
    width: int = 20,
    keep: int = 10,
) -> list[LineDraft]:
    """Top `keep` complete lines ending with the given rhyme word."""
    if width < 1 or keep < 1:
        raise ValueError("width and keep must be >= 1")
    template = index.template
    pron = next(
        (p for p in index.dictionary.lookup(rhyme_word) if p.variant == variant),
        None,
    )
    if pron is None:
        raise ValueError(f"no pronunciation {rhyme_word!r}({variant})")
    bits = stress_pattern(pron)
    if not fits_bits(bits, template, len(template) - 1, index.relaxations):
        raise ValueError(f"{rhyme_word!r}({variant}) cannot end the line")
    order_ctx = lm.order - 1
    rkey = rhyme_key(pron)

    def close(state: SearchState) -> LineDraft | None:
        window = (grammar.LINE_START,) + state.tag_window
        if violates(rules, window):
            return None
        term = lm.log_prob(LINE_START, state.ctx)
        if term == -math.inf:
            return None
        return LineDraft(
            state.words, state.prons, state.score + term, rhyme_word, rkey
        )

    start_score = lm.log_prob(rhyme_word, (LINE_END,))
    initial_window = (index.lexicon.primary_tag(rhyme_word), grammar.LINE_END)
    completed: list[LineDraft] = []
    if start_score == -math.inf or violates(rules, initial_window):
        beam: list[SearchState] = []
    else:
        state0 = SearchState(
            (rhyme_word,),
            (pron,),
            len(template) - len(bits),
            (LINE_END, rhyme_word)[-order_ctx:],
            initial_window,
            start_score,
        )
        if state0.remaining == 0:
            draft = close(state0)
            if draft:
                completed.append(draft)
            beam = []
        else:
            beam = [state0]

    while beam:
        pool: dict[tuple, SearchState] = {}
        for state in beam:
            for child in _expand(state, lm, index, rules, width, order_ctx):
                key = child.dedup_key()
                held = pool.get(key)
                if held is None or child.sort_key() < held.sort_key():
                    pool[key] = child
        kept = sorted(pool.values(), key=SearchState.sort_key)[:width]
        beam = []
        for state in kept:
            if state.remaining == 0:
                draft = close(state)
                if draft:
                    completed.append(draft)
            else:
                beam.append(state)

    if not completed:
        raise SearchError(f"no complete line found for rhyme word {rhyme_word!r}")
    completed.sort(key=LineDraft.sort_key)
    return completed[:keep]


def _expand(state, lm, index, rules, width, order_ctx):
    col = index.at(state.remaining - 1)
    if not col.words:
        return
    mask = col.min_syl <= state.remaining
    forbidden = _forbidden_new_tags(rules, state.tag_window)
    if forbidden:
        mask &= ~np.isin(col.tags_arr, sorted(forbidden))
    if not mask.any():
        return
    probs = lm.prob_for_candidates(state.ctx, col.ids, col.posmap)
    eligible = np.flatnonzero(mask)
    ranked = eligible[np.argsort(-probs[eligible], kind="stable")[:width]]
    for pos in ranked:
        p = probs[pos]
        if p <= 0.0:
            continue
        increment = math.log(p)
        word = col.words[pos]
        new_ctx = (*state.ctx, word)[-order_ctx:]
        new_window = (col.tags[pos], state.tag_window[0])
        for pron, syl in col.variants[pos]:
            if syl <= state.remaining:
                yield SearchState(
                    (word, *state.words),
                    (pron, *state.prons),
                    state.remaining - syl,
                    new_ctx,
                    new_window,
                    state.score + increment,
                )


def sample_line(
    drafts: list[LineDraft],
    rng: random.Random,
    top: int = 10,
    proportional: bool = False,
) -> LineDraft:
    """Draw one draft from the `top` best; uniform by default, optionally
    proportional to line likelihood."""
    if not drafts:
        raise ValueError("no drafts to sample from")
    pool = drafts[: min(top, len(drafts))]
    if not proportional:
        return pool[rng.randrange(len(pool))]
    best = max(d.score for d in pool)
    weights = [math.exp(d.score - best) for d in pool]
    target = rng.random() * sum(weights)
    acc = 0.0
    for draft, w in zip(pool, weights):
        acc += w
        if target < acc:
            return draft
    return pool[-1]
