"""Scoring backend contract and error taxonomy.

A backend handle exposes exactly three operations; every neural detail
(subword vocabularies, graph formats, sequence limits) stays behind this
surface so the scorers above it deal only in word tokens and text.
"""

from __future__ import annotations

from typing import Protocol, Sequence, runtime_checkable


@runtime_checkable
class BackendHandle(Protocol):
    def masked_token_logprob(self, tokens: Sequence[str], mask_index: int) -> float:
        """log p(tokens[mask_index] | all other tokens), in nats, <= 0."""
        ...

    def acceptability_prob(self, sentence_text: str) -> float:
        """Probability in [0, 1] that the sentence is grammatically acceptable."""
        ...

    def sop_prob(self, segment_a: str, segment_b: str) -> float:
        """Probability in [0, 1] that segment_a correctly precedes segment_b."""
        ...


class BundleError(Exception):
    """Base class for model bundle loading failures."""


class BundleComponentMissingError(BundleError):
    """A required component entry is absent from the manifest."""


class BundleFileMissingError(BundleError):
    """A file named by the manifest does not exist."""


class BundleIntegrityError(BundleError):
    """A file's content hash does not match the manifest."""


class BundleFormatError(BundleError):
    """Unsupported graph format or format version."""


class BackendUnavailableError(BundleError):
    """The runtime needed for the bundle's graph format is not installed."""
