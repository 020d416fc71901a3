"""Inter-sentence redundancy scoring.

Four syntactic overlap features are computed for every unordered sentence
pair; each feature past its trigger threshold counts one penalty unit.
String features (A, C) compare case-insensitively on sentence text, word
features (B, D) on the lowercased token lists.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .config import MetricConfig
from .segmentation import Document, Sentence

FEATURE_LABELS = ("A", "B", "C", "D")


@dataclass(frozen=True)
class PairPenalty:
    i: int
    j: int
    triggered: frozenset[str]

    @property
    def m(self) -> int:
        return len(self.triggered)


def longest_common_substring_len(a: str, b: str) -> int:
    """Length of the longest contiguous character run shared by a and b."""
    a, b = a.lower(), b.lower()
    if not a or not b:
        return 0
    if len(a) > len(b):
        a, b = b, a
    best = 0
    prev = [0] * (len(b) + 1)
    for ca in a:
        cur = [0]
        for j, cb in enumerate(b, 1):
            run = prev[j - 1] + 1 if ca == cb else 0
            cur.append(run)
            if run > best:
                best = run
        prev = cur
    return best


def longest_common_word_seq_len(a: Sequence[str], b: Sequence[str]) -> int:
    """Length of the longest contiguous token run shared by a and b."""
    if not a or not b:
        return 0
    if len(a) > len(b):
        a, b = b, a
    best = 0
    prev = [0] * (len(b) + 1)
    for wa in a:
        cur = [0]
        for j, wb in enumerate(b, 1):
            run = prev[j - 1] + 1 if wa == wb else 0
            cur.append(run)
            if run > best:
                best = run
        prev = cur
    return best


def edit_distance(a: str, b: str) -> int:
    """Case-insensitive Levenshtein distance with unit costs."""
    a, b = a.lower(), b.lower()
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def common_word_count(a: Sequence[str], b: Sequence[str]) -> int:
    """Multiset intersection size of the two token lists."""
    counts_a, counts_b = Counter(a), Counter(b)
    return sum(min(n, counts_b[w]) for w, n in counts_a.items())


def pair_penalty(s_i: Sentence, s_j: Sentence, config: MetricConfig, i: int = 0, j: int = 1) -> PairPenalty:
    """Evaluate all four features for one sentence pair.

    Overlap features (A, B, D) trigger when the overlap reaches the
    threshold fraction of the shorter sentence; the edit-distance feature
    (C) triggers when the distance stays within the threshold fraction of
    the longer sentence, i.e. the pair is too similar either way.
    """
    min_chars = min(s_i.char_len, s_j.char_len)
    max_chars = max(s_i.char_len, s_j.char_len)
    min_words = min(s_i.word_count, s_j.word_count)

    triggered = set()
    if longest_common_substring_len(s_i.text, s_j.text) >= config.redundancy_threshold_a * min_chars:
        triggered.add("A")
    if longest_common_word_seq_len(s_i.tokens, s_j.tokens) >= config.redundancy_threshold_b * min_words:
        triggered.add("B")
    if edit_distance(s_i.text, s_j.text) <= config.redundancy_threshold_c * max_chars:
        triggered.add("C")
    if common_word_count(s_i.tokens, s_j.tokens) >= config.redundancy_threshold_d * min_words:
        triggered.add("D")
    return PairPenalty(i=i, j=j, triggered=frozenset(triggered))


def pair_penalties(doc: Document, config: MetricConfig) -> list[PairPenalty]:
    return [
        pair_penalty(doc.sentences[i], doc.sentences[j], config, i=i, j=j)
        for i, j in combinations(range(len(doc.sentences)), 2)
    ]


def non_redundancy_score(doc: Document, config: MetricConfig) -> float:
    """Total redundancy penalty over all sentence pairs; 0 when nothing triggers."""
    total = sum(p.m for p in pair_penalties(doc, config))
    return -config.redundancy_penalty * total + 0.0  # +0.0 normalizes -0.0
