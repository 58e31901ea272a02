"""Comma placement and terminal punctuation for finished poems.

Commas are placed after all words are fixed: a comma budget is sampled,
every candidate gap is scored by the likelihood change of inserting a
comma token there, and the n best gaps win. Scores are not recomputed
between placements, so the line likelihoods are only approximately
maximized; word content is never touched.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass

from .errors import GenerationError
from .forms import Form
from .langmodel import COMMA, PERIOD, NGramModel


@dataclass(frozen=True)
class CommaBudget:
    """Uniform categorical over an inclusive integer range."""

    low: int
    high: int

    def __post_init__(self):
        if self.low < 0 or self.high < self.low:
            raise ValueError(f"bad comma range {self.low}..{self.high}")


def scale_budget(base: CommaBudget, line_count: int, reference: int = 14) -> CommaBudget:
    """Scale a per-sonnet budget to a shorter form, rounding to nearest."""
    return CommaBudget(
        round(base.low * line_count / reference),
        round(base.high * line_count / reference),
    )


def sample_budget(budget: CommaBudget, rng: random.Random) -> int:
    return rng.randint(budget.low, budget.high)


@dataclass(frozen=True)
class InsertionPoint:
    line: int  # 0-based line index
    gap: int  # insert before words[gap]; gap == len(words) is line-final
    score: float


def candidate_gaps(words: list[str], takes_period: bool) -> list[int]:
    """Interior gaps between adjacent words, plus the line-final gap on
    lines that will not receive a period."""
    gaps = list(range(1, len(words)))
    if not takes_period:
        gaps.append(len(words))
    return gaps


def score_insertions(
    lines: list[list[str]], lm: NGramModel, form: Form
) -> list[InsertionPoint]:
    """Likelihood delta of a comma at every candidate gap, per line."""
    if COMMA not in lm.word_ids:
        raise GenerationError(
            "comma token missing from language model vocabulary; retrain "
            "with punctuation retained"
        )
    period_lines = {p - 1 for p in form.period_lines}
    points = []
    for line_no, words in enumerate(lines):
        base = lm.sequence_logprob(words)
        for gap in candidate_gaps(words, line_no in period_lines):
            with_comma = [*words[:gap], COMMA, *words[gap:]]
            points.append(
                InsertionPoint(line_no, gap, lm.sequence_logprob(with_comma) - base)
            )
    return points


def place_commas(
    lines: list[list[str]], points: list[InsertionPoint], n: int
) -> list[list[str]]:
    """Insert commas at the n best-scoring gaps (ties by line, then gap)."""
    if n > len(points):
        warnings.warn(
            f"comma budget {n} exceeds {len(points)} candidate gaps; placing all"
        )
        n = len(points)
    chosen = sorted(points, key=lambda p: (-p.score, p.line, p.gap))[:n]
    by_line: dict[int, list[int]] = {}
    for point in chosen:
        by_line.setdefault(point.line, []).append(point.gap)
    out = []
    for line_no, words in enumerate(lines):
        gaps = sorted(by_line.get(line_no, ()), reverse=True)
        new = list(words)
        for gap in gaps:
            new.insert(gap, COMMA)
        out.append(new)
    return out


def finalize_line_ends(lines: list[list[str]], form: Form) -> list[list[str]]:
    """Append the form's terminal periods, replacing any line-final comma,
    so the poem always ends with a period."""
    out = [list(words) for words in lines]
    for line_1based in form.period_lines:
        words = out[line_1based - 1]
        if words and words[-1] == COMMA:
            words[-1] = PERIOD
        else:
            words.append(PERIOD)
    return out


def strip_punctuation(lines: list[list[str]]) -> list[list[str]]:
    return [[w for w in words if w not in (COMMA, PERIOD)] for words in lines]
