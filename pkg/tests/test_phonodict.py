import io

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sonneteer.errors import FormatError
from sonneteer.phonodict import (
    PENTAMETER,
    STRICT,
    Phoneme,
    Pronunciation,
    Relaxations,
    fits_at,
    parse_cmu_dict,
    rhyme_key,
    stress_pattern,
    syllable_count,
)


def pron(word, *phones):
    parsed = []
    for tok in phones:
        if tok[-1].isdigit():
            parsed.append(Phoneme(tok[:-1], int(tok[-1])))
        else:
            parsed.append(Phoneme(tok))
    return Pronunciation(word, 0, tuple(parsed))


class TestParsing:
    def test_basic_entry(self):
        d = parse_cmu_dict(["GAME  G EY1 M"])
        (p,) = d.lookup("game")
        assert [str(ph) for ph in p.phonemes] == ["G", "EY1", "M"]

    def test_comment_skipped(self):
        assert len(parse_cmu_dict([";;; comment", "GAME  G EY1 M"])) == 1

    def test_variant_syntax(self):
        d = parse_cmu_dict(["NAME  N EY1 M", "NAME(1)  N EY1 M"])
        assert [p.variant for p in d.lookup("name")] == [0, 1]

    def test_punctuation_headword_skipped(self):
        d = parse_cmu_dict(["!EXCLAMATION-POINT  EH2 K S K L AH0 M EY1 SH AH0 N P OY2 N T"])
        assert len(d) == 0

    def test_apostrophe_headword_kept(self):
        d = parse_cmu_dict(["'TIS  T IH1 Z"])
        assert "'tis" in d

    def test_lookup_case_insensitive(self):
        d = parse_cmu_dict(["GAME  G EY1 M"])
        assert d.lookup("GaMe") == d.lookup("game")

    def test_no_phonemes_error(self):
        with pytest.raises(FormatError, match="line 2"):
            parse_cmu_dict([";;; x", "GAME"])

    def test_unknown_symbol_error(self):
        with pytest.raises(FormatError, match="line 1"):
            parse_cmu_dict(["GAME  G QX1 M"])

    def test_vowel_without_stress_error(self):
        with pytest.raises(FormatError):
            parse_cmu_dict(["GAME  G EY M"])

    def test_vowelless_entry_skipped_with_warning(self):
        with pytest.warns(UserWarning, match="no vowel"):
            d = parse_cmu_dict(["PSST  P S S T", "GAME  G EY1 M"])
        assert "psst" not in d and "game" in d

    def test_round_trip(self, mini_dict):
        buf = io.StringIO()
        mini_dict.dump(buf)
        assert parse_cmu_dict(buf.getvalue().splitlines()) == mini_dict


class TestStressPattern:
    def test_lament(self, mini_dict):
        assert stress_pattern(mini_dict.lookup("lament")[0]) == "01"

    def test_ability(self, mini_dict):
        assert stress_pattern(mini_dict.lookup("ability")[0]) == "0100"

    def test_game(self, mini_dict):
        assert stress_pattern(mini_dict.lookup("game")[0]) == "1"

    def test_secondary_stress_maps_to_one(self):
        assert stress_pattern(pron("glorify", "G", "L", "AO1", "R", "AH0", "F", "AY2")) == "101"


class TestRhymeKey:
    def test_game_equals_name(self, mini_dict):
        game = rhyme_key(mini_dict.lookup("game")[0])
        assert game == ("EY", "M")
        assert game == rhyme_key(mini_dict.lookup("name")[0])

    def test_ability_equals_me(self, mini_dict):
        assert rhyme_key(mini_dict.lookup("ability")[0]) == ("IY",)
        assert rhyme_key(mini_dict.lookup("ability")[0]) == rhyme_key(
            mini_dict.lookup("me")[0]
        )

    def test_doom_differs_from_roam(self, mini_dict):
        assert rhyme_key(mini_dict.lookup("doom")[0]) == ("UW", "M")
        assert rhyme_key(mini_dict.lookup("roam")[0]) == ("OW", "M")

    def test_stress_invariant(self, mini_dict):
        for word in mini_dict.words():
            for p in mini_dict.lookup(word):
                restressed = Pronunciation(
                    p.word,
                    p.variant,
                    tuple(
                        Phoneme(ph.symbol, 0 if ph.stress is not None else None)
                        for ph in p.phonemes
                    ),
                )
                assert rhyme_key(restressed) == rhyme_key(p)

    def test_starts_at_last_vowel(self, mini_dict):
        for word in mini_dict.words():
            for p in mini_dict.lookup(word):
                key = rhyme_key(p)
                assert key[0] in {
                    ph.symbol for ph in p.phonemes if ph.stress is not None
                }


class TestSyllableCount:
    def test_examples(self, mini_dict):
        assert syllable_count(mini_dict.lookup("game")[0]) == 1
        assert syllable_count(mini_dict.lookup("ability")[0]) == 4

    def test_equals_pattern_length(self, mini_dict):
        for word in mini_dict.words():
            for p in mini_dict.lookup(word):
                assert syllable_count(p) == len(stress_pattern(p))


class TestFitsAt:
    def test_ability_line_final_with_promotion(self, mini_dict):
        ability = mini_dict.lookup("ability")[0]
        assert fits_at(ability, PENTAMETER, 9, Relaxations(final_promotion=True))

    def test_ability_strict_fails(self, mini_dict):
        assert not fits_at(mini_dict.lookup("ability")[0], PENTAMETER, 9, STRICT)

    def test_monosyllable_anywhere(self, mini_dict):
        the = mini_dict.lookup("the")[0]
        for pos in range(10):
            assert fits_at(the, PENTAMETER, pos)

    def test_word_longer_than_prefix(self, mini_dict):
        assert not fits_at(mini_dict.lookup("ability")[0], PENTAMETER, 2)

    def test_end_pos_out_of_range(self, mini_dict):
        with pytest.raises(ValueError):
            fits_at(mini_dict.lookup("game")[0], PENTAMETER, 10)

    @given(st.data())
    def test_strict_is_exact_slice_match(self, data):
        bits = data.draw(st.text(alphabet="01", min_size=1, max_size=6))
        template = data.draw(st.text(alphabet="01", min_size=6, max_size=12))
        end = data.draw(st.integers(0, len(template) - 1))
        phonemes = []
        for b in bits:
            phonemes.append(Phoneme("K"))
            phonemes.append(Phoneme("AA", int(b)))
        p = Pronunciation("w", 0, tuple(phonemes))
        start = end - len(bits) + 1
        expected = start >= 0 and template[start : end + 1] == bits
        assert fits_at(p, template, end, STRICT) == expected

    def test_final_promotion_only_at_line_end(self, mini_dict):
        # "ability" (0100) lands its final unstressed syllable on a
        # stressed slot; that is forgiven at the line end only.
        ability = mini_dict.lookup("ability")[0]
        assert not fits_at(ability, PENTAMETER, 7)
        assert fits_at(ability, PENTAMETER, 9)
        # "woman" (10) fits odd-start slots and promotion cannot rescue
        # an interior mismatch.
        woman = mini_dict.lookup("woman")[0]
        assert fits_at(woman, PENTAMETER, 6)
        assert not fits_at(woman, PENTAMETER, 7)
        assert not fits_at(woman, PENTAMETER, 9)
