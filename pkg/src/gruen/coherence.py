"""Structure/coherence scoring from sentence-order prediction loss.

Every prefix/suffix split of the document yields a positive example (the
segments in order) and a negative example (the segments swapped); the loss
is the mean logistic loss over all such examples and the score is its
weighted additive inverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .config import MetricConfig
from .segmentation import Document


class NotApplicableError(ValueError):
    """Raised when a document has too few sentences for order prediction."""


@dataclass(frozen=True)
class SegmentSplit:
    prefix: str
    suffix: str
    split_index: int  # sentences 1..i form the prefix


def enumerate_splits(doc: Document) -> list[SegmentSplit]:
    """All n-1 prefix/suffix splits, in index order; empty when n <= 1."""
    texts = [s.text for s in doc.sentences]
    return [
        SegmentSplit(
            prefix=" ".join(texts[:i]),
            suffix=" ".join(texts[i:]),
            split_index=i,
        )
        for i in range(1, len(texts))
    ]


def sop_loss(doc: Document, handle, prob_clamp: float = 1e-6) -> float:
    """Mean logistic loss over the positive and negative example per split."""
    splits = enumerate_splits(doc)
    if not splits:
        raise NotApplicableError("order prediction needs at least 2 sentences")

    def clamp(p: float) -> float:
        return min(max(p, prob_clamp), 1.0 - prob_clamp)

    total = 0.0
    for split in splits:
        p_pos = clamp(handle.sop_prob(split.prefix, split.suffix))
        p_neg = clamp(handle.sop_prob(split.suffix, split.prefix))
        total += -math.log(p_pos) - math.log(1.0 - p_neg)
    return total / (2 * len(splits))


def coherence_score(doc: Document, handle, config: MetricConfig) -> float:
    """Weighted additive inverse of the order-prediction loss; 0 when n <= 1."""
    if len(doc.sentences) <= 1:
        return 0.0
    loss = sop_loss(doc, handle, config.coherence_prob_clamp)
    return -config.coherence_weight * loss + 0.0  # +0.0 normalizes -0.0
