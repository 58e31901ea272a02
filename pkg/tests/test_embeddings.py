import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sonneteer.embeddings import cosine, load_vectors, topic_vector
from sonneteer.errors import FormatError


class TestLoadVectors:
    def test_single_line(self):
        table = load_vectors(["love 0.1 0.2"])
        assert table.dimension == 2
        assert np.allclose(table.vectors["love"], [0.1, 0.2])

    def test_dimension_mismatch(self):
        with pytest.raises(FormatError, match="line 2"):
            load_vectors(["a 1 2", "b 1 2 3"])

    def test_duplicate_last_wins(self):
        with pytest.warns(UserWarning, match="duplicate"):
            table = load_vectors(["a 1 2", "a 3 4"])
        assert np.allclose(table.vectors["a"], [3, 4])

    def test_empty_stream(self):
        with pytest.raises(FormatError, match="empty"):
            load_vectors([])

    def test_bad_float(self):
        with pytest.raises(FormatError, match="line 1"):
            load_vectors(["a one two"])

    def test_words_lowercased(self):
        table = load_vectors(["LOVE 1 0"])
        assert "love" in table.vectors


class TestTopicVector:
    def test_single_token_exact(self, table):
        topic = topic_vector(["love"], table)
        assert np.array_equal(topic.values, table.vectors["love"])

    def test_mean_of_two(self):
        table = load_vectors(["a 1 0", "b 0 1"])
        topic = topic_vector(["a", "b"], table)
        assert np.allclose(topic.values, [0.5, 0.5])

    def test_oov_dropped_with_warning(self):
        table = load_vectors(["love 1 0"])
        with pytest.warns(UserWarning, match="zzxqy"):
            topic = topic_vector(["love", "zzxqy"], table)
        assert np.array_equal(topic.values, table.vectors["love"])
        assert topic.source_tokens == ("love",)

    def test_all_oov_error(self):
        table = load_vectors(["love 1 0"])
        with pytest.raises(ValueError, match="zzxqy"):
            topic_vector(["zzxqy"], table)

    def test_empty_prompt(self, table):
        with pytest.raises(ValueError):
            topic_vector([], table)


class TestCosine:
    def test_identical(self):
        v = np.array([1.0, 2.0, 3.0])
        assert cosine(v, v) == pytest.approx(1.0)

    def test_orthogonal(self):
        assert cosine(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 0.0

    def test_antipodal(self):
        assert cosine(np.array([1.0, 0.0]), np.array([-1.0, 0.0])) == -1.0

    def test_zero_vector_error(self):
        with pytest.raises(ValueError):
            cosine(np.zeros(2), np.array([1.0, 0.0]))

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            cosine(np.ones(2), np.ones(3))

    @given(
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
        st.lists(st.floats(-10, 10), min_size=3, max_size=3),
        st.floats(0.01, 100.0),
    )
    def test_symmetry_and_scale_invariance(self, a, b, scale):
        a, b = np.array(a), np.array(b)
        if np.linalg.norm(a) < 1e-6 or np.linalg.norm(b) < 1e-6:
            return
        assert cosine(a, b) == pytest.approx(cosine(b, a))
        assert abs(cosine(scale * a, b) - cosine(a, b)) < 1e-9
