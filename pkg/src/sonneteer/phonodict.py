"""CMU pronouncing dictionary parsing, scansion, and rhyme keys.

Every metrical and rhyme constraint in the package is phrased in terms of
this module: stress patterns (one bit per syllable, secondary stress
folded into stressed), syllable counts, and rhyme keys (the stress-free
phoneme suffix from a word's final vowel to its end).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, TextIO

from .errors import FormatError

VOWELS = frozenset(
    "AA AE AH AO AW AY EH ER EY IH IY OW OY UH UW".split()
)
CONSONANTS = frozenset(
    "B CH D DH F G HH JH K L M N NG P R S SH T TH V W Y Z ZH".split()
)
ARPABET = VOWELS | CONSONANTS

# Iambic pentameter: five unstressed/stressed feet.
PENTAMETER = "0101010101"


@dataclass(frozen=True, slots=True)
class Phoneme:
    """One ARPABET symbol; vowels carry a stress digit, consonants do not."""

    symbol: str
    stress: int | None = None

    def __post_init__(self):
        if self.symbol not in ARPABET:
            raise ValueError(f"unknown ARPABET symbol {self.symbol!r}")
        if (self.symbol in VOWELS) != (self.stress is not None):
            raise ValueError(
                f"stress digit present iff vowel: {self.symbol!r}/{self.stress!r}"
            )

    def __str__(self):
        return self.symbol if self.stress is None else f"{self.symbol}{self.stress}"


@dataclass(frozen=True, slots=True)
class Pronunciation:
    """One dictionary entry variant: `variant` 0 is the base entry."""

    word: str
    variant: int
    phonemes: tuple[Phoneme, ...]

    def __post_init__(self):
        if not self.word:
            raise ValueError("empty word")
        if not any(p.symbol in VOWELS for p in self.phonemes):
            raise ValueError(f"{self.word!r} has no vowel phoneme")


@dataclass(frozen=True, slots=True)
class Relaxations:
    """Scansion relaxations; both default on, independently disableable.

    monosyllable_flexible: a 1-syllable word matches either template bit.
    final_promotion: a word-final unstressed syllable may sit on a stressed
    template position when it is also the line's last position.
    """

    monosyllable_flexible: bool = True
    final_promotion: bool = True


STRICT = Relaxations(monosyllable_flexible=False, final_promotion=False)


def stress_pattern(pron: Pronunciation) -> str:
    """Bit string over {0,1}, one bit per vowel; CMU stress 2 maps to 1."""
    return "".join(
        "1" if p.stress in (1, 2) else "0"
        for p in pron.phonemes
        if p.stress is not None
    )


def syllable_count(pron: Pronunciation) -> int:
    return sum(1 for p in pron.phonemes if p.stress is not None)


def rhyme_key(pron: Pronunciation) -> tuple[str, ...]:
    """Stress-stripped symbols from the final vowel to the end of the word."""
    last_vowel = max(i for i, p in enumerate(pron.phonemes) if p.stress is not None)
    return tuple(p.symbol for p in pron.phonemes[last_vowel:])


def final_onset(pron: Pronunciation) -> tuple[str, ...]:
    """Consonants immediately before the final vowel (used by the
    near-identical-rhyme filter)."""
    vowel_ix = [i for i, p in enumerate(pron.phonemes) if p.stress is not None]
    last = vowel_ix[-1]
    start = vowel_ix[-2] + 1 if len(vowel_ix) > 1 else 0
    return tuple(p.symbol for p in pron.phonemes[start:last])


def fits_bits(
    bits: str,
    template: str,
    end_pos: int,
    relaxations: Relaxations = Relaxations(),
) -> bool:
    """fits_at on a precomputed stress pattern (the hot path for indexing)."""
    if not 0 <= end_pos < len(template):
        raise ValueError(f"end_pos {end_pos} outside template")
    start = end_pos - len(bits) + 1
    if start < 0:
        return False
    if relaxations.monosyllable_flexible and len(bits) == 1:
        return True
    for i, bit in enumerate(bits):
        want = template[start + i]
        if bit == want:
            continue
        if (
            relaxations.final_promotion
            and bit == "0"
            and want == "1"
            and i == len(bits) - 1
            and start + i == len(template) - 1
        ):
            continue
        return False
    return True


def fits_at(
    pron: Pronunciation,
    template: str,
    end_pos: int,
    relaxations: Relaxations = Relaxations(),
) -> bool:
    """True when the word can occupy the template slots ending at end_pos.

    end_pos is the 0-based template index of the word's last syllable.
    A word longer than the available prefix simply does not fit.
    """
    return fits_bits(stress_pattern(pron), template, end_pos, relaxations)


class PronouncingDict:
    """Immutable word -> pronunciation variants map, case-insensitive."""

    def __init__(self, entries: dict[str, list[Pronunciation]]):
        self._entries = entries

    def lookup(self, word: str) -> list[Pronunciation]:
        return self._entries.get(word.lower(), [])

    def __contains__(self, word: str) -> bool:
        return word.lower() in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def words(self) -> Iterable[str]:
        return self._entries.keys()

    def items(self):
        return self._entries.items()

    def __eq__(self, other):
        return (
            isinstance(other, PronouncingDict) and self._entries == other._entries
        )

    def dump(self, stream: TextIO) -> None:
        """Write back in CMU text format; reparsing yields an equal dict."""
        for word in sorted(self._entries):
            for pron in self._entries[word]:
                head = word.upper()
                if pron.variant:
                    head = f"{head}({pron.variant})"
                phones = " ".join(str(p) for p in pron.phonemes)
                stream.write(f"{head}  {phones}\n")


def _parse_phoneme(token: str, line_no: int) -> Phoneme:
    if token and token[-1].isdigit():
        symbol, digit = token[:-1], int(token[-1])
        if symbol not in VOWELS or digit not in (0, 1, 2):
            raise FormatError(f"bad phoneme {token!r}", line_no)
        return Phoneme(symbol, digit)
    if token not in CONSONANTS:
        raise FormatError(f"unknown ARPABET symbol {token!r}", line_no)
    return Phoneme(token)


def _split_headword(head: str, line_no: int) -> tuple[str, int]:
    variant = 0
    if head.endswith(")") and "(" in head:
        head, _, tail = head.partition("(")
        tail = tail[:-1]
        if not tail.isdigit():
            raise FormatError(f"bad variant suffix on {head!r}", line_no)
        variant = int(tail)
    return head.lower(), variant


def parse_cmu_dict(lines: Iterable[str]) -> PronouncingDict:
    """Parse CMU dictionary lines: `WORD  PH1 PH2 ...`, variants `WORD(1)`.

    Comment lines start with `;;;`. Headwords that begin with punctuation
    other than an apostrophe name punctuation marks and are skipped.
    Entries without a vowel cannot scan and are skipped with a warning.
    """
    entries: dict[str, list[Pronunciation]] = {}
    count = 0
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith(";;;"):
            continue
        parts = line.split()
        head, phone_tokens = parts[0], parts[1:]
        first = head[0]
        if not (first.isalnum() or first == "'"):
            continue
        if not phone_tokens:
            raise FormatError(f"no phonemes for {head!r}", line_no)
        word, variant = _split_headword(head, line_no)
        phonemes = tuple(_parse_phoneme(t, line_no) for t in phone_tokens)
        if not any(p.stress is not None for p in phonemes):
            warnings.warn(f"line {line_no}: {head!r} has no vowel, skipped")
            continue
        entries.setdefault(word, []).append(Pronunciation(word, variant, phonemes))
        count += 1
    for word, prons in entries.items():
        variants = [p.variant for p in prons]
        if len(set(variants)) != len(variants):
            raise FormatError(f"duplicate variant index for {word!r}")
        prons.sort(key=lambda p: p.variant)
    return PronouncingDict(entries)


def load_cmu_dict(path) -> PronouncingDict:
    """Parse a dictionary file; the standard distribution is Latin-1."""
    with open(path, encoding="latin-1") as fh:
        return parse_cmu_dict(fh)
