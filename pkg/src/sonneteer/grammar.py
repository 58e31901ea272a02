"""Part-of-speech lexicon and forbidden tag-sequence rules.

Tagging is deliberately context-free: each word gets its single most
frequent tag, and a small rule table rejects tag bigrams/trigrams that
never form grammatical English. Line boundaries participate as the
pseudo-tags LINE_START and LINE_END so rules can constrain line edges.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import FormatError

# The Penn-style 35-tag space used by word lexica.
TAGSET = frozenset(
    """CC CD DT EX FW IN JJ JJR JJS LS MD NN NNS NNP NNPS PDT POS PRP PRP$
    RB RBR RBS RP TO UH VB VBD VBG VBN VBP VBZ WDT WP WP$ WRB""".split()
)
LINE_START = "LINE_START"
LINE_END = "LINE_END"
RULE_TAGS = TAGSET | {LINE_START, LINE_END}

DEFAULT_TAG = "NN"


@dataclass
class TagLexicon:
    """word -> [(tag, count), ...] sorted by descending count."""

    tags: dict[str, list[tuple[str, int]]]
    default_tag: str = DEFAULT_TAG

    def primary_tag(self, word: str) -> str:
        entry = self.tags.get(word.lower())
        return entry[0][0] if entry else self.default_tag


def primary_tag(lexicon: TagLexicon, word: str) -> str:
    return lexicon.primary_tag(word)


def load_tag_lexicon(lines: Iterable[str], default_tag: str = DEFAULT_TAG) -> TagLexicon:
    """Parse `word<TAB>tag:count[,tag:count...]` lines."""
    table: dict[str, list[tuple[str, int]]] = {}
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        word, _, spec = line.partition("\t")
        if not spec:
            raise FormatError("expected `word<TAB>tag:count`", line_no)
        pairs = []
        for item in spec.split(","):
            tag, _, count_s = item.strip().partition(":")
            if tag not in TAGSET:
                raise FormatError(f"unknown tag {tag!r}", line_no)
            try:
                count = int(count_s)
            except ValueError:
                raise FormatError(f"bad count {count_s!r}", line_no) from None
            if count <= 0:
                raise FormatError(f"nonpositive count for {tag}", line_no)
            pairs.append((tag, count))
        pairs.sort(key=lambda tc: (-tc[1], tc[0]))
        table[word.lower()] = pairs
    return TagLexicon(table, default_tag)


def load_tag_lexicon_file(path) -> TagLexicon:
    with open(path, encoding="utf-8") as fh:
        return load_tag_lexicon(fh)


@dataclass
class ForbiddenRuleSet:
    """Tag sequences (length 2 or 3) that must not appear in a line."""

    bigrams: frozenset[tuple[str, str]] = field(default_factory=frozenset)
    trigrams: frozenset[tuple[str, str, str]] = field(default_factory=frozenset)

    def __len__(self):
        return len(self.bigrams) + len(self.trigrams)


def make_rules(rules: Iterable[Sequence[str]]) -> ForbiddenRuleSet:
    bigrams, trigrams = set(), set()
    for rule in rules:
        rule = tuple(rule)
        if any(t not in RULE_TAGS for t in rule):
            raise ValueError(f"unknown tag in rule {rule}")
        if len(rule) == 2:
            bigrams.add(rule)
        elif len(rule) == 3:
            trigrams.add(rule)
        else:
            raise ValueError(f"rule length must be 2 or 3: {rule}")
    return ForbiddenRuleSet(frozenset(bigrams), frozenset(trigrams))


def load_rules(lines: Iterable[str]) -> ForbiddenRuleSet:
    """Parse one space-separated tag sequence per line; `#` comments."""
    rules = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        rule = tuple(line.split())
        try:
            make_rules([rule])
        except ValueError as exc:
            raise FormatError(str(exc), line_no) from None
        rules.append(rule)
    return make_rules(rules)


def load_rules_file(path) -> ForbiddenRuleSet:
    with open(path, encoding="utf-8") as fh:
        return load_rules(fh)


def violates(rules: ForbiddenRuleSet, tag_window: Sequence[str]) -> bool:
    """True when a rule matches the window anchored at its newest tag.

    The window lists the last <=3 tags of the line in surface order; the
    line grows leftward, so the newest tag is the leftmost. A rule fires
    only when it includes the newest tag: older alignments were already
    checked when their own words were added.
    """
    window = tuple(tag_window)
    if len(window) >= 2 and window[:2] in rules.bigrams:
        return True
    if len(window) >= 3 and window[:3] in rules.trigrams:
        return True
    return False
