import hashlib
import json
from pathlib import Path

import numpy as np
import pytest

from gruen.backend import StubBackend
from gruen.config import MetricConfig
from gruen.focus import EmbeddingTable
from gruen.segmentation import tokenize_words

FIXTURES = Path(__file__).parent / "fixtures"


def stable_vector(word: str, dim: int = 8) -> np.ndarray:
    """Per-word embedding derived from a content hash; stable across runs."""
    seed = int.from_bytes(hashlib.sha256(word.encode()).digest()[:8], "little")
    rng = np.random.default_rng(seed)
    return rng.normal(size=dim)


def make_table(words, dim: int = 8, oov_policy: str = "skip") -> EmbeddingTable:
    return EmbeddingTable(
        dimension=dim,
        vectors={w: stable_vector(w, dim) for w in words},
        oov_policy=oov_policy,
    )


def write_embeddings_file(path: Path, words, dim: int = 8) -> Path:
    lines = ["%d %d" % (len(words), dim)]
    for word in sorted(set(words)):
        vec = stable_vector(word, dim)
        lines.append(word + " " + " ".join("%.6f" % x for x in vec))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def corpus_vocabulary(texts) -> set[str]:
    vocab = set()
    for text in texts:
        vocab.update(tokenize_words(text))
    return vocab


@pytest.fixture(scope="session")
def segmentation_corpus():
    with open(FIXTURES / "segmentation_corpus.json", encoding="utf-8") as f:
        return json.load(f)


@pytest.fixture
def stub_backend():
    return StubBackend(token_prob=0.5, acceptability=0.5, sop=0.5)


@pytest.fixture
def default_config():
    return MetricConfig()


# A small mixed-quality corpus used by pipeline/CLI/acceptance tests.
SMOKE_DOCS = [
    ("d01", "The cat sat on the mat. The dog ran across the yard."),
    ("d02", "The monkey took a bunch of bananas on the desk. It took a bunch of bananas on the desk."),
    ("d03", "A storm hit the coast overnight. Residents moved to higher ground. Cleanup began at dawn."),
    ("d04", "The committee approved the budget."),
    ("d05", ""),
    ("d06", "Dr. Smith arrived at the clinic. He examined the patient. Treatment began immediately."),
    ("d07", "Numbers rose 3.5 percent. Analysts were surprised. Nobody predicted the jump."),
    ("d08", "It rained. It rained. It rained."),
    ("d09", "Quantum xylophones dazzle nobody here. The ferry left the harbor at noon."),
    ("d10", "The festival drew large crowds. Vendors sold out by noon. Police reported no incidents."),
    ("d11", "One sentence only, nothing more to say here."),
    ("d12", "Prices fell sharply. The market recovered by Friday. Traders stayed cautious. Volume was thin."),
    ("d13", "She wrote the letter. She mailed the letter. She regretted the letter."),
    ("d14", "The bridge closed for repairs. Commuters found other routes."),
    ("d15", "A new species was described this week. The find excited biologists worldwide."),
    ("d16", "The recipe calls for two eggs. Beat them gently. Fold in the flour."),
    ("d17", "His speech ran long. The audience grew restless. Applause came anyway."),
    ("d18", "Exports climbed again. Imports held steady. The deficit narrowed slightly."),
    ("d19", "The orchestra tuned quietly. The conductor raised the baton. Silence fell."),
    ("d20", "Snow blanketed the valley. Roads stayed open. Schools closed early as a precaution."),
]


@pytest.fixture(scope="session")
def smoke_docs():
    return list(SMOKE_DOCS)


@pytest.fixture(scope="session")
def smoke_table():
    vocab = corpus_vocabulary(text for _, text in SMOKE_DOCS)
    return make_table(vocab)
