"""Pipeline: run all four sub-scorers and combine into the final score.

The combined score is the plain sum of the grammaticality score and the
three penalty scores, clamped into the configured bounds (default [0, 1]).
Corpus scoring preserves input order and isolates per-document failures.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable

from .coherence import coherence_score
from .config import MetricConfig, StubConfig
from .focus import EmbeddingTable, focus_score
from .grammaticality import grammaticality_score
from .redundancy import non_redundancy_score
from .segmentation import SentenceSplitter, segment

__all__ = [
    "GruenScore",
    "CorpusRecord",
    "MetricConfig",
    "StubConfig",
    "score_document",
    "score_corpus",
]


@dataclass(frozen=True)
class GruenScore:
    y_g: float
    y_r: float
    y_f: float
    y_c: float
    total: float
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    score: GruenScore | None = None
    error: str | None = None


def _clamp(value: float, low: float, high: float) -> float:
    return min(max(value, low), high)


def score_document(
    text: str,
    handle,
    table: EmbeddingTable,
    config: MetricConfig | None = None,
    splitter: SentenceSplitter | None = None,
) -> GruenScore:
    config = config or MetricConfig()
    doc = segment(text, splitter)
    if not doc.sentences:
        return GruenScore(
            y_g=0.0, y_r=0.0, y_f=0.0, y_c=0.0, total=0.0,
            warnings=("empty output",),
        )
    warnings: list[str] = []
    y_g, grammar_warnings = grammaticality_score(doc, handle, config)
    warnings.extend(grammar_warnings)
    y_r = non_redundancy_score(doc, config)
    y_f, focus_warnings = focus_score(doc, table, config)
    warnings.extend(focus_warnings)
    y_c = coherence_score(doc, handle, config)
    total = _clamp(y_g + y_r + y_f + y_c, config.clamp_low, config.clamp_high)
    return GruenScore(
        y_g=y_g, y_r=y_r, y_f=y_f, y_c=y_c, total=total, warnings=tuple(warnings)
    )


def score_corpus(
    items: Iterable[tuple[str, str]],
    handle,
    table: EmbeddingTable,
    config: MetricConfig | None = None,
    threads: int = 1,
    splitter: SentenceSplitter | None = None,
) -> list[CorpusRecord]:
    """Score (id, text) pairs in input order; failures become error records.

    Duplicate ids are rejected up front. Thread count only affects wall
    time: results are reduced in input order regardless of scheduling.
    """
    config = config or MetricConfig()
    splitter = splitter or SentenceSplitter()
    batch: list[tuple[str, str]] = []
    seen: set[str] = set()
    for doc_id, text in items:
        if doc_id in seen:
            raise ValueError("duplicate document id %r" % doc_id)
        seen.add(doc_id)
        batch.append((doc_id, text))

    def run(item: tuple[str, str]) -> CorpusRecord:
        doc_id, text = item
        try:
            return CorpusRecord(id=doc_id, score=score_document(text, handle, table, config, splitter))
        except Exception as exc:  # isolate the document, keep the stream going
            return CorpusRecord(id=doc_id, error="%s: %s" % (doc_id, exc))

    if threads <= 1:
        return [run(item) for item in batch]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, batch))
