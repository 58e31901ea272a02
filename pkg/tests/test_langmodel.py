import io
import itertools
import math
import random

import numpy as np
import pytest

from sonneteer.errors import FormatError
from sonneteer.langmodel import (
    LINE_END,
    LINE_START,
    NGramModel,
    train,
    wrap_reversed,
)

# Surface line "a b a c"; train() receives its reversal with boundaries.
TINY = [wrap_reversed(["a", "b", "a", "c"])]


@pytest.fixture(scope="module")
def tiny_mle():
    return train(TINY, order=2, discount=0.0)


@pytest.fixture(scope="module")
def fixture_model(bundles):
    return bundles["brook"].model


def all_contexts(model, max_contexts=None, seed=0):
    ctxs = [
        tuple(model.words[i] for i in ctx)
        for ctx in model._raw[model.order]
    ]
    ctxs.sort()
    if max_contexts is not None and len(ctxs) > max_contexts:
        ctxs = random.Random(seed).sample(ctxs, max_contexts)
    return ctxs


def total_prob(model, context):
    return sum(
        math.exp(model.log_prob(w, context))
        for w in model.words
        if model.log_prob(w, context) > -math.inf
    )


class TestTraining:
    def test_mle_hand_count(self, tiny_mle):
        # Reversed stream: </s> c a b a <s>; every bigram is unique, so
        # all conditionals are 1.
        assert tiny_mle.log_prob("a", ("c",)) == 0.0
        assert tiny_mle.log_prob("a", (LINE_END, "c")) == 0.0
        assert tiny_mle.log_prob("b", ("a",)) == pytest.approx(math.log(0.5))

    def test_unseen_word_zero_at_mle(self, tiny_mle):
        assert tiny_mle.log_prob("c", ("c",)) == -math.inf

    def test_smoothing_gives_positive_probability(self):
        m = train(TINY, order=2, discount=0.5)
        assert m.log_prob("c", ("c",)) > -math.inf

    def test_normalization(self, fixture_model):
        for ctx in all_contexts(fixture_model, max_contexts=100):
            assert total_prob(fixture_model, ctx) == pytest.approx(1.0, abs=1e-6)

    def test_normalization_tiny_all_discounts(self):
        for discount in (0.0, 0.3, 0.75):
            m = train(TINY, order=2, discount=discount)
            for w in m.words:
                assert total_prob(m, (w,)) == pytest.approx(1.0, abs=1e-6)

    def test_order_validation(self):
        with pytest.raises(ValueError):
            train(TINY, order=1)

    def test_discount_validation(self):
        with pytest.raises(ValueError):
            train(TINY, order=2, discount=1.0)

    def test_empty_corpus(self):
        with pytest.raises(ValueError):
            train([], order=2)

    def test_deterministic(self, tiny_mle):
        again = train(TINY, order=2, discount=0.0)
        for w in tiny_mle.words:
            for ctx in tiny_mle.words:
                assert again.log_prob(w, (ctx,)) == tiny_mle.log_prob(w, (ctx,))


class TestLogProb:
    def test_oov_word_error(self, tiny_mle):
        with pytest.raises(ValueError, match="vocabulary"):
            tiny_mle.log_prob("zzz", ("a",))

    def test_short_context_backoff(self, fixture_model):
        # With no context at all the model falls back to unigram stats.
        p = fixture_model.log_prob("the", ())
        assert -math.inf < p < 0.0

    def test_unknown_context_token_backs_off(self, fixture_model):
        got = fixture_model.log_prob("the", ("zzznotaword", "zzznotaword"))
        assert got > -math.inf

    def test_conditions_only_on_following_tokens(self):
        # Surface lines: "x a" and "a y". Predicting "a" given right
        # context "</s> a"... the backward model sees only what FOLLOWS.
        m = train(
            [wrap_reversed(["x", "a"]), wrap_reversed(["a", "y"])],
            order=3,
            discount=0.0,
        )
        # P(x | right-context a): in surface "x a", x is followed by a.
        assert m.log_prob("x", (LINE_END, "a")) == 0.0
        # Only the most recent order-1 tokens matter.
        long_ctx = ("ignored", "padding", LINE_END, "a")
        assert m.log_prob("x", long_ctx) == m.log_prob("x", (LINE_END, "a"))


class TestSequenceLogprob:
    def test_empty_body(self, tiny_mle):
        assert tiny_mle.sequence_logprob([]) == tiny_mle.log_prob(
            LINE_START, (LINE_END,)
        )

    def test_single_token_two_terms(self, tiny_mle):
        expected = tiny_mle.log_prob("a", (LINE_END,)) + tiny_mle.log_prob(
            LINE_START, (LINE_END, "a")
        )
        assert tiny_mle.sequence_logprob(["a"]) == expected

    def test_training_line_is_finite(self, tiny_mle):
        assert tiny_mle.sequence_logprob(["a", "b", "a", "c"]) > -math.inf

    def test_oov_error(self, tiny_mle):
        with pytest.raises(ValueError):
            tiny_mle.sequence_logprob(["a", "zzz"])


class TestVectorizedScoring:
    def test_matches_scalar_bitwise(self, fixture_model):
        m = fixture_model
        ids = np.arange(len(m.words), dtype=np.int64)
        posmap = np.arange(len(m.words), dtype=np.int64)
        rng = random.Random(7)
        contexts = all_contexts(m, max_contexts=25, seed=3)
        contexts += [(LINE_END,), (), (rng.choice(m.words),)]
        for ctx in contexts:
            vec = m.prob_for_candidates(ctx, ids, posmap)
            for wid in rng.sample(range(len(m.words)), 40):
                scalar = m._prob_scalar(wid, m._context_ids(ctx))
                assert vec[wid] == scalar  # bit-exact, not approx


class TestSaveLoad:
    def test_round_trip_scores(self, tiny_mle):
        buf = io.StringIO()
        tiny_mle.save(buf)
        loaded = NGramModel.load(io.StringIO(buf.getvalue()))
        for w, ctx in itertools.product(tiny_mle.words, repeat=2):
            assert loaded.log_prob(w, (ctx,)) == tiny_mle.log_prob(w, (ctx,))

    def test_round_trip_bytes_stable(self, fixture_model):
        buf = io.StringIO()
        fixture_model.save(buf)
        loaded = NGramModel.load(io.StringIO(buf.getvalue()))
        buf2 = io.StringIO()
        loaded.save(buf2)
        assert buf.getvalue() == buf2.getvalue()

    def test_author_preserved(self):
        m = train(TINY, order=2, discount=0.5, author="tiny poet")
        buf = io.StringIO()
        m.save(buf)
        assert NGramModel.load(io.StringIO(buf.getvalue())).author == "tiny poet"

    def test_unknown_version(self):
        with pytest.raises(FormatError, match="version"):
            NGramModel.load(io.StringIO("sonneteer-ngram 99\n"))

    def test_not_a_model(self):
        with pytest.raises(FormatError):
            NGramModel.load(io.StringIO("hello world\n"))

    def test_truncated(self, tiny_mle):
        buf = io.StringIO()
        tiny_mle.save(buf)
        lines = buf.getvalue().splitlines(keepends=True)
        clipped = "".join(lines[: len(lines) - 3])
        with pytest.raises(FormatError, match="truncated"):
            NGramModel.load(io.StringIO(clipped))

    def test_empty_vocab_block(self):
        with pytest.raises(FormatError, match="vocabulary"):
            NGramModel.load(
                io.StringIO("sonneteer-ngram 1\norder 2\ndiscount 0.5\nvocab 0\n")
            )


class TestDataMonotonicity:
    def test_duplicate_never_decreases_own_likelihood(self):
        # Duplicating a training line moves the model toward it; its own
        # joint probability must not drop.
        rng = random.Random(11)
        vocab = list("pqrstu")
        for trial in range(25):
            lines = [
                [rng.choice(vocab) for _ in range(rng.randint(2, 6))]
                for _ in range(rng.randint(2, 5))
            ]
            target = rng.choice(lines)
            base = train([wrap_reversed(l) for l in lines], order=2, discount=0.5)
            grown = train(
                [wrap_reversed(l) for l in lines + [target]], order=2, discount=0.5
            )
            assert grown.sequence_logprob(target) >= base.sequence_logprob(target) - 1e-12

    def test_counts_monotone(self):
        base = train(TINY, order=2, discount=0.5)
        grown = train(TINY + TINY, order=2, discount=0.5)
        for k, table in base._raw.items():
            for ctx, followers in table.items():
                g = grown._raw[k][tuple(grown.word_ids[base.words[i]] for i in ctx)]
                for w, c in followers.items():
                    assert g[grown.word_ids[base.words[w]]] >= c
