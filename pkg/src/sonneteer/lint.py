"""Independent verification of meter, rhyme scheme, and tag rules.

The linter shares only the pronunciation and grammar primitives with the
generator: it re-derives scansion and rhyme keys from the dictionary and
re-tags lines from scratch, so a bookkeeping bug in the searcher cannot
hide from it. It also runs on human poems, where out-of-dictionary words
are reported as warnings rather than failures.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import _tokenize_piece
from .forms import validate_scheme
from .grammar import LINE_END, LINE_START, ForbiddenRuleSet, TagLexicon
from .langmodel import PUNCT_TOKENS
from .phonodict import (
    PENTAMETER,
    PronouncingDict,
    Pronunciation,
    Relaxations,
    fits_bits,
    rhyme_key,
    stress_pattern,
)


@dataclass(frozen=True)
class Finding:
    line: int  # 1-based
    col: int  # 1-based word position within the line
    kind: str  # meter | rhyme | pos | oov
    message: str
    severity: str = "error"

    def __str__(self):
        return f"{self.line}:{self.col} {self.kind.upper()} {self.message}"


def tokenize_poem(text: str) -> list[list[str]]:
    """Word tokens per non-blank line; punctuation marks are dropped."""
    lines = []
    for raw in text.splitlines():
        tokens = [t for t in _tokenize_piece(raw) if t not in PUNCT_TOKENS]
        if tokens:
            lines.append(tokens)
    return lines


def _strip_punct(words: list[str]) -> list[str]:
    return [w for w in words if w not in PUNCT_TOKENS]


def _scan_exact(
    words: list[str],
    prons: list[Pronunciation],
    template: str,
    relaxations: Relaxations,
) -> str | None:
    """Check the recorded pronunciations against the template; returns an
    error message or None."""
    pos = 0
    for word, pron in zip(words, prons):
        bits = stress_pattern(pron)
        end = pos + len(bits) - 1
        if end >= len(template):
            return f"line overflows the template at {word!r}"
        if not fits_bits(bits, template, end, relaxations):
            return (
                f"{word!r} ({bits}) breaks the template at syllables "
                f"{pos + 1}-{end + 1}"
            )
        pos = end + 1
    if pos != len(template):
        return f"line has {pos} syllables (template needs {len(template)})"
    return None


def _scan_any(
    words: list[str],
    dictionary: PronouncingDict,
    template: str,
    relaxations: Relaxations,
) -> bool:
    """True when SOME choice of pronunciation variants fills the template."""

    def rec(i: int, pos: int) -> bool:
        if i == len(words):
            return pos == len(template)
        for pron in dictionary.lookup(words[i]):
            bits = stress_pattern(pron)
            end = pos + len(bits) - 1
            if end < len(template) and fits_bits(bits, template, end, relaxations):
                if rec(i + 1, end + 1):
                    return True
        return False

    return rec(0, 0)


def _syllable_totals(words: list[str], dictionary: PronouncingDict) -> set[int]:
    totals = {0}
    for word in words:
        counts = {
            len(stress_pattern(p)) for p in dictionary.lookup(word)
        }
        totals = {t + c for t in totals for c in counts}
    return totals


def verify_meter(
    lines: list[list[str]],
    dictionary: PronouncingDict,
    relaxations: Relaxations = Relaxations(),
    template: str = PENTAMETER,
    prons: list[list[Pronunciation]] | None = None,
) -> list[Finding]:
    """Each line must scan to the template under some variant assignment,
    or exactly under the recorded pronunciations when given."""
    findings = []
    for line_no, raw_words in enumerate(lines, start=1):
        words = _strip_punct(raw_words)
        oov = [w for w in words if not dictionary.lookup(w)]
        if oov:
            for word in oov:
                findings.append(
                    Finding(
                        line_no,
                        words.index(word) + 1,
                        "oov",
                        f"{word!r} not in pronouncing dictionary; line not scanned",
                        severity="warning",
                    )
                )
            continue
        if prons is not None:
            message = _scan_exact(words, prons[line_no - 1], template, relaxations)
            if message:
                findings.append(Finding(line_no, 1, "meter", message))
        elif not _scan_any(words, dictionary, template, relaxations):
            totals = _syllable_totals(words, dictionary)
            if len(template) not in totals:
                counts = "/".join(str(t) for t in sorted(totals))
                message = (
                    f"line has {counts} syllables (template needs {len(template)})"
                )
            else:
                message = f"no pronunciation assignment scans to {template}"
            findings.append(Finding(line_no, 1, "meter", message))
    return findings


def _final_keys(
    words: list[str], dictionary: PronouncingDict
) -> tuple[str, set[tuple[str, ...]]]:
    word = words[-1]
    return word, {rhyme_key(p) for p in dictionary.lookup(word)}


def verify_rhyme(
    lines: list[list[str]],
    scheme: str,
    dictionary: PronouncingDict,
    prons: list[list[Pronunciation]] | None = None,
) -> list[Finding]:
    """Same-letter lines must share a rhyme key; different letters must
    not. Without recorded pronunciations, any variant's key may match."""
    validate_scheme(scheme)
    if len(lines) != len(scheme):
        raise ValueError(
            f"poem has {len(lines)} lines but scheme {scheme!r} has {len(scheme)}"
        )
    findings = []
    keys: dict[int, set[tuple[str, ...]]] = {}
    enders: dict[int, str] = {}
    for i, raw_words in enumerate(lines):
        words = _strip_punct(raw_words)
        if prons is not None:
            enders[i] = words[-1]
            keys[i] = {rhyme_key(prons[i][-1])}
        else:
            word, key_set = _final_keys(words, dictionary)
            enders[i] = word
            if not key_set:
                findings.append(
                    Finding(
                        i + 1,
                        len(words),
                        "oov",
                        f"{word!r} not in pronouncing dictionary; rhyme unchecked",
                        severity="warning",
                    )
                )
            keys[i] = key_set

    by_letter: dict[str, list[int]] = {}
    for i, letter in enumerate(scheme):
        by_letter.setdefault(letter, []).append(i)

    for letter, (a, b) in sorted(by_letter.items(), key=lambda kv: kv[1]):
        if not keys[a] or not keys[b]:
            continue
        if not keys[a] & keys[b]:
            findings.append(
                Finding(
                    b + 1,
                    len(_strip_punct(lines[b])),
                    "rhyme",
                    f"{enders[b]!r} does not rhyme with {enders[a]!r} "
                    f"(scheme letter {letter})",
                )
            )
    letters = sorted(by_letter)
    for x in range(len(letters)):
        for y in range(x + 1, len(letters)):
            a = by_letter[letters[x]][0]
            b = by_letter[letters[y]][0]
            if keys[a] and keys[b] and keys[a] & keys[b]:
                findings.append(
                    Finding(
                        b + 1,
                        len(_strip_punct(lines[b])),
                        "rhyme",
                        f"letters {letters[x]} and {letters[y]} share a rhyme "
                        f"sound ({enders[a]!r}/{enders[b]!r})",
                    )
                )
    return findings


def verify_pos(
    lines: list[list[str]],
    lexicon: TagLexicon,
    rules: ForbiddenRuleSet,
) -> list[Finding]:
    """Flag every contiguous primary-tag window matching a forbidden rule;
    line boundaries participate as pseudo-tags."""
    findings = []
    for line_no, raw_words in enumerate(lines, start=1):
        words = _strip_punct(raw_words)
        tags = [LINE_START, *(lexicon.primary_tag(w) for w in words), LINE_END]
        spans = [(tags[i], tags[i + 1]) for i in range(len(tags) - 1)]
        for i, span in enumerate(spans):
            if span in rules.bigrams:
                findings.append(
                    Finding(
                        line_no,
                        max(i, 1),
                        "pos",
                        f"forbidden tag sequence {' '.join(span)} at "
                        f"{' '.join(words[max(i - 1, 0):i + 1]) or 'line edge'!r}",
                    )
                )
        for i in range(len(tags) - 2):
            tri = (tags[i], tags[i + 1], tags[i + 2])
            if tri in rules.trigrams:
                findings.append(
                    Finding(
                        line_no,
                        max(i, 1),
                        "pos",
                        f"forbidden tag sequence {' '.join(tri)} at "
                        f"{' '.join(words[max(i - 1, 0):i + 2]) or 'line edge'!r}",
                    )
                )
    return findings


def lint_lines(
    lines: list[list[str]],
    scheme: str,
    dictionary: PronouncingDict,
    lexicon: TagLexicon | None = None,
    rules: ForbiddenRuleSet | None = None,
    relaxations: Relaxations = Relaxations(),
    template: str = PENTAMETER,
    prons: list[list[Pronunciation]] | None = None,
) -> list[Finding]:
    findings = verify_meter(lines, dictionary, relaxations, template, prons)
    findings += verify_rhyme(lines, scheme, dictionary, prons)
    if lexicon is not None and rules is not None:
        findings += verify_pos(lines, lexicon, rules)
    return sorted(findings, key=lambda f: (f.line, f.col, f.kind, f.message))


def lint_text(
    text: str,
    scheme: str,
    dictionary: PronouncingDict,
    lexicon: TagLexicon | None = None,
    rules: ForbiddenRuleSet | None = None,
    relaxations: Relaxations = Relaxations(),
    template: str = PENTAMETER,
) -> list[Finding]:
    return lint_lines(
        tokenize_poem(text), scheme, dictionary, lexicon, rules, relaxations, template
    )


def has_errors(findings: list[Finding]) -> bool:
    return any(f.severity == "error" for f in findings)
