"""Deterministic stub backend.

Pure arithmetic: every operation returns a configured constant, which makes
every downstream score an exact, hand-computable function of the
configuration. Used for tests and for running the pipeline without any
model bundle.
"""

from __future__ import annotations

import math
from typing import Sequence

from ..config import StubConfig


class StubBackend:
    def __init__(
        self,
        token_prob: float = 0.5,
        acceptability: float = 0.5,
        sop: float = 0.5,
    ):
        if not 0.0 < token_prob <= 1.0:
            raise ValueError("token_prob must lie in (0, 1]")
        for name, value in (("acceptability", acceptability), ("sop", sop)):
            if not 0.0 <= value <= 1.0:
                raise ValueError("%s must lie in [0, 1]" % name)
        self.token_prob = token_prob
        self.acceptability = acceptability
        self.sop = sop

    @classmethod
    def from_config(cls, stub: StubConfig) -> "StubBackend":
        return cls(
            token_prob=stub.token_prob,
            acceptability=stub.acceptability,
            sop=stub.sop,
        )

    def masked_token_logprob(self, tokens: Sequence[str], mask_index: int) -> float:
        if not 0 <= mask_index < len(tokens):
            raise IndexError(
                "mask_index %d out of range for %d tokens" % (mask_index, len(tokens))
            )
        return math.log(self.token_prob)

    def acceptability_prob(self, sentence_text: str) -> float:
        if not sentence_text.strip():
            raise ValueError("cannot score an empty sentence")
        return self.acceptability

    def sop_prob(self, segment_a: str, segment_b: str) -> float:
        if not segment_a.strip() or not segment_b.strip():
            raise ValueError("cannot score an empty segment")
        return self.sop
