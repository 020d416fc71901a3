"""Focus scoring through word-mover similarity of adjacent sentences.

Each sentence becomes a normalized bag-of-words distribution over its
embeddable tokens; the word-mover distance between two sentences is the
exact earth-mover cost between those distributions under Euclidean ground
cost, and the similarity transform maps it into (0, 1].
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import MetricConfig
from .segmentation import Document, Sentence
from .transport import solve_transport


class EmbeddingError(ValueError):
    """Embedding file cannot be parsed."""


class UnembeddableSentenceError(ValueError):
    """No token of the sentence has an embedding under the active policy."""


@dataclass(frozen=True)
class EmbeddingTable:
    dimension: int
    vectors: dict[str, np.ndarray]
    oov_policy: str = "skip"  # "skip" or "mean-vector"

    def __post_init__(self):
        if self.oov_policy not in ("skip", "mean-vector"):
            raise ValueError("unknown oov policy %r" % self.oov_policy)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def lookup(self, word: str) -> np.ndarray | None:
        vec = self.vectors.get(word)
        if vec is None and self.oov_policy == "mean-vector":
            return self.mean_vector()
        return vec

    def mean_vector(self) -> np.ndarray:
        # Cached on the instance despite frozen=True; the value is derived.
        cached = self.__dict__.get("_mean")
        if cached is None:
            cached = np.mean(list(self.vectors.values()), axis=0)
            object.__setattr__(self, "_mean", cached)
        return cached


@dataclass(frozen=True)
class NbowDistribution:
    words: tuple[str, ...]
    points: np.ndarray  # (len(words), dimension)
    weights: np.ndarray  # probabilities, sum to 1

    def __post_init__(self):
        if abs(float(self.weights.sum()) - 1.0) > 1e-9:
            raise ValueError("nbow weights must sum to 1")
        if np.any(self.weights < 0):
            raise ValueError("nbow weights must be non-negative")


def load_embeddings(
    path: str | Path,
    vocab_filter: set[str] | None = None,
    oov_policy: str = "skip",
) -> EmbeddingTable:
    """Parse word2vec text format ("word f1 ... fd" rows, optional count header)."""
    vectors: dict[str, np.ndarray] = {}
    dimension: int | None = None
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2:
                try:
                    int(parts[0]), int(parts[1])
                except ValueError:
                    pass
                else:
                    continue  # "count dimension" header
            word, values = parts[0], parts[1:]
            if dimension is None:
                if not values:
                    raise EmbeddingError("line %d: no vector components" % lineno)
                dimension = len(values)
            if len(values) != dimension:
                raise EmbeddingError(
                    "line %d: expected %d components, found %d"
                    % (lineno, dimension, len(values))
                )
            if vocab_filter is not None and word not in vocab_filter:
                continue
            try:
                vectors[word] = np.array([float(x) for x in values])
            except ValueError as exc:
                raise EmbeddingError("line %d: %s" % (lineno, exc)) from None
    if dimension is None:
        raise EmbeddingError("embedding file %s is empty" % path)
    return EmbeddingTable(dimension=dimension, vectors=vectors, oov_policy=oov_policy)


def nbow(sentence: Sentence, table: EmbeddingTable) -> NbowDistribution:
    """Frequency-weighted distribution over the sentence's embeddable tokens."""
    counts = Counter(sentence.tokens)
    words, points, weights = [], [], []
    for word, count in counts.items():
        vec = table.lookup(word)
        if vec is None:
            continue
        words.append(word)
        points.append(vec)
        weights.append(count)
    if not words:
        raise UnembeddableSentenceError(
            "no embeddable tokens in sentence: %r" % sentence.text
        )
    weight_arr = np.array(weights, dtype=float)
    return NbowDistribution(
        words=tuple(words),
        points=np.vstack(points),
        weights=weight_arr / weight_arr.sum(),
    )


def wmd(a: Sentence, b: Sentence, table: EmbeddingTable) -> float:
    """Exact word-mover distance between the two sentences' nbow distributions."""
    da, db = nbow(a, table), nbow(b, table)
    # Identical multisets over embeddable tokens transport at zero cost.
    if dict(zip(da.words, da.weights)) == dict(zip(db.words, db.weights)):
        return 0.0
    cost = np.linalg.norm(da.points[:, None, :] - db.points[None, :, :], axis=2)
    return solve_transport(cost, da.weights, db.weights).cost


def wms(a: Sentence, b: Sentence, table: EmbeddingTable, variant: str = "inverse") -> float:
    """Bounded similarity transform of wmd; 1.0 for identical distributions."""
    distance = wmd(a, b, table)
    if variant == "inverse":
        return 1.0 / (1.0 + distance)
    if variant == "exponential":
        return math.exp(-distance)
    raise ValueError("unknown wms variant %r" % variant)


def focus_score(
    doc: Document, table: EmbeddingTable, config: MetricConfig
) -> tuple[float, list[str]]:
    """Penalty per adjacent sentence pair whose similarity falls below threshold.

    Pairs with an unembeddable side are skipped and reported as warnings
    rather than penalized.
    """
    warnings: list[str] = []
    score = 0.0
    for i in range(len(doc.sentences) - 1):
        try:
            similarity = wms(
                doc.sentences[i], doc.sentences[i + 1], table, config.focus_wms_variant
            )
        except UnembeddableSentenceError:
            warnings.append("focus: skipped unembeddable adjacent pair (%d, %d)" % (i, i + 1))
            continue
        if similarity < config.focus_similarity_threshold:
            score -= config.focus_penalty
    return score + 0.0, warnings  # +0.0 normalizes -0.0
