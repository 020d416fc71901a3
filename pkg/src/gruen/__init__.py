"""Reference-less linguistic quality scoring and correlation harness."""

__version__ = "0.1.0"

from .backend import StubBackend, load_bundle
from .config import MetricConfig, StubConfig, load_config, save_config
from .evalstats import (
    CorrelationReport,
    JudgmentRecord,
    kendall_tau_b,
    load_judgments,
    pearson,
    spearman,
    williams_test,
)
from .focus import EmbeddingTable, load_embeddings, wmd, wms
from .pipeline import CorpusRecord, GruenScore, score_corpus, score_document
from .segmentation import Document, Sentence, segment, split_sentences, tokenize_words

__all__ = [
    "CorpusRecord",
    "CorrelationReport",
    "Document",
    "EmbeddingTable",
    "GruenScore",
    "JudgmentRecord",
    "MetricConfig",
    "Sentence",
    "StubBackend",
    "StubConfig",
    "kendall_tau_b",
    "load_bundle",
    "load_config",
    "load_embeddings",
    "load_judgments",
    "pearson",
    "save_config",
    "score_corpus",
    "score_document",
    "segment",
    "spearman",
    "split_sentences",
    "tokenize_words",
    "williams_test",
    "wmd",
    "wms",
]
