import hashlib
from pathlib import Path

import numpy as np
import pytest

from sonneteer.corpus import build_bundle
from sonneteer.embeddings import EmbeddingTable
from sonneteer.grammar import load_rules_file, load_tag_lexicon_file
from sonneteer.phonodict import load_cmu_dict
from sonneteer.poemgen import Resources, default_data_path

DATA = Path(__file__).parent / "data"
AUTHORS = ("brook", "ember", "harbor")


def synthetic_table(words, dim=16):
    """Deterministic per-word vectors; a stand-in for pretrained files."""
    vectors = {}
    for word in sorted(set(words)):
        seed = int.from_bytes(hashlib.sha256(word.encode()).digest()[:8], "big")
        vectors[word] = np.random.default_rng(seed).normal(size=dim)
    return EmbeddingTable(dim, vectors)


@pytest.fixture(scope="session")
def mini_dict():
    return load_cmu_dict(DATA / "mini_cmudict.txt")


@pytest.fixture(scope="session")
def lexicon():
    return load_tag_lexicon_file(default_data_path("tag_lexicon.txt"))


@pytest.fixture(scope="session")
def rules():
    return load_rules_file(default_data_path("pos_rules.txt"))


@pytest.fixture(scope="session")
def table(mini_dict):
    return synthetic_table(mini_dict.words())


@pytest.fixture(scope="session")
def bundles(mini_dict, table):
    out = {}
    for author in AUTHORS:
        text = (DATA / f"corpus_{author}.txt").read_text()
        out[author] = build_bundle(author, text, mini_dict, table, min_vocab=100)
    return out


@pytest.fixture(scope="session")
def resources(mini_dict, table, lexicon, rules, bundles):
    return Resources(mini_dict, table, lexicon, rules, dict(bundles))


@pytest.fixture(scope="session")
def sample_sonnet_text():
    return (DATA / "sample_sonnet.txt").read_text()


@pytest.fixture(scope="session")
def sample_short_text():
    return (DATA / "sample_short.txt").read_text()
