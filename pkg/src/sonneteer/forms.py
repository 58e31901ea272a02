"""Poetic forms: rhyme scheme, metrical template, terminal punctuation."""

from __future__ import annotations

from dataclasses import dataclass

from .phonodict import PENTAMETER


@dataclass(frozen=True)
class Form:
    name: str
    scheme: str  # one letter per line; each letter appears exactly twice
    period_lines: tuple[int, ...]  # 1-based lines that end with a period
    template: str = PENTAMETER

    def __post_init__(self):
        validate_scheme(self.scheme)

    @property
    def line_count(self) -> int:
        return len(self.scheme)

    @property
    def letters(self) -> list[str]:
        seen = []
        for letter in self.scheme:
            if letter not in seen:
                seen.append(letter)
        return seen

    def lines_of(self, letter: str) -> tuple[int, ...]:
        """0-based line indices carrying the given scheme letter."""
        return tuple(i for i, l in enumerate(self.scheme) if l == letter)


def validate_scheme(scheme: str) -> None:
    if not scheme or not scheme.isalpha() or scheme != scheme.upper():
        raise ValueError(f"scheme must be uppercase letters: {scheme!r}")
    for letter in set(scheme):
        if scheme.count(letter) != 2:
            raise ValueError(f"letter {letter} must appear exactly twice in {scheme!r}")


SONNET = Form("sonnet", "ABABCDCDEFEFGG", (4, 8, 12, 14))
SHORT = Form("short", "ABABCC", (4, 6))
FORMS = {f.name: f for f in (SONNET, SHORT)}
