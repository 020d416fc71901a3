"""Grammaticality scoring from sentence likelihood and grammar acceptance.

The likelihood side is the geometric-mean token probability under masked
scoring (bounded to [0, 1] and length-invariant); the acceptance side is a
classifier probability. The two are linearly combined per sentence and
averaged over the document.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import MetricConfig
from .segmentation import Document, Sentence


@dataclass(frozen=True)
class SentenceGrammarScore:
    likelihood: float
    acceptance: float
    combined: float


def sentence_likelihood(handle, sentence: Sentence) -> float:
    """Geometric-mean token probability exp(L/k) from per-token masked scoring."""
    if not sentence.tokens:
        raise ValueError("cannot score an empty sentence")
    tokens = list(sentence.tokens)
    log_total = sum(
        handle.masked_token_logprob(tokens, index) for index in range(len(tokens))
    )
    return math.exp(log_total / len(tokens))


def sentence_acceptance(handle, sentence: Sentence) -> float:
    if not sentence.text.strip():
        raise ValueError("cannot score an empty sentence")
    return handle.acceptability_prob(sentence.text)


def sentence_grammar(handle, sentence: Sentence, config: MetricConfig) -> SentenceGrammarScore:
    likelihood = sentence_likelihood(handle, sentence)
    acceptance = sentence_acceptance(handle, sentence)
    combined = (
        config.grammar_likelihood_weight * likelihood
        + config.grammar_acceptance_weight * acceptance
    )
    return SentenceGrammarScore(likelihood=likelihood, acceptance=acceptance, combined=combined)


def grammaticality_score(
    doc: Document, handle, config: MetricConfig
) -> tuple[float, list[str]]:
    """Mean combined grammar score over all sentences; 0 for an empty document."""
    if not doc.sentences:
        return 0.0, ["grammaticality: empty output"]
    per_sentence = [sentence_grammar(handle, s, config).combined for s in doc.sentences]
    return sum(per_sentence) / len(per_sentence), []
