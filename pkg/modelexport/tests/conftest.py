import random

import pytest
import torch
from transformers import (
    BertConfig,
    BertForMaskedLM,
    BertForSequenceClassification,
    BertTokenizer,
)

TINY_VOCAB = [
    "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]",
    "the", "a", "cat", "dog", "bird", "fox",
    "sat", "ran", "slept", "ate",
    "on", "mat", "rug", "log", "den",
    ".", ",", "##s",
]

DETERMINERS = ["the", "a"]
NOUNS = ["cat", "dog", "bird", "fox"]
VERBS = ["sat", "ran", "slept", "ate"]
PLACES = ["mat", "rug", "log", "den"]


def tiny_config(num_labels=None):
    kwargs = dict(
        vocab_size=len(TINY_VOCAB),
        hidden_size=32,
        num_hidden_layers=2,
        num_attention_heads=2,
        intermediate_size=64,
        max_position_embeddings=64,
    )
    if num_labels is not None:
        kwargs["num_labels"] = num_labels
    return BertConfig(**kwargs)


@pytest.fixture(scope="session")
def tiny_tokenizer(tmp_path_factory):
    path = tmp_path_factory.mktemp("vocab") / "vocab.txt"
    path.write_text("\n".join(TINY_VOCAB) + "\n")
    return BertTokenizer(str(path), do_lower_case=True)


def make_masked_lm(seed=0):
    torch.manual_seed(seed)
    return BertForMaskedLM(tiny_config()).eval()


def make_classifier(seed=0):
    torch.manual_seed(seed)
    return BertForSequenceClassification(tiny_config(num_labels=2)).eval()


def grammatical_sentence(rng):
    return "%s %s %s on %s %s ." % (
        rng.choice(DETERMINERS),
        rng.choice(NOUNS),
        rng.choice(VERBS),
        rng.choice(DETERMINERS),
        rng.choice(PLACES),
    )


def ungrammatical_sentence(rng):
    words = grammatical_sentence(rng).split()
    body = words[:-1]
    while True:
        rng.shuffle(body)
        if body[0] not in DETERMINERS:
            break
    return " ".join(body + ["."])


def write_cola_tsv(path, n, seed):
    rng = random.Random(seed)
    with open(path, "w") as f:
        for k in range(n):
            label = k % 2
            sentence = grammatical_sentence(rng) if label else ungrammatical_sentence(rng)
            f.write("toy\t%d\t\t%s\n" % (label, sentence))
    return path


@pytest.fixture(scope="session")
def cola_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("cola")
    train = write_cola_tsv(root / "train.tsv", 240, seed=100)
    dev = write_cola_tsv(root / "dev.tsv", 80, seed=200)
    return train, dev


@pytest.fixture(scope="session")
def fixture_sentences():
    rng = random.Random(7)
    out = []
    for k in range(100):
        out.append(grammatical_sentence(rng) if k % 2 else ungrammatical_sentence(rng))
    return out
