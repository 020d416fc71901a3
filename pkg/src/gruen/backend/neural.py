"""Graph-runtime backend: scores text with the models from a bundle.

Each graph component runs through a format-specific runner (ONNX Runtime
session or TorchScript archive); all runners share one call shape:
(input_ids, attention_mask, token_type_ids) -> logits. Word-level masked
scoring masks all of a word's subword pieces jointly and sums their
log-probabilities, so a word never leaks its own pieces as context.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Sequence

import numpy as np

from .base import BackendUnavailableError, BundleFormatError
from .bundle import ModelBundle, read_bundle
from .wordpiece import WordpieceVocab


class _TorchscriptRunner:
    def __init__(self, path: Path):
        try:
            import torch
        except ImportError:
            raise BackendUnavailableError(
                "bundle uses torchscript graphs but torch is not installed"
            ) from None
        self._torch = torch
        self._module = torch.jit.load(str(path), map_location="cpu").eval()
        self._lock = threading.Lock()

    def __call__(self, input_ids, attention_mask, token_type_ids) -> np.ndarray:
        torch = self._torch
        args = [
            torch.from_numpy(np.asarray(a, dtype=np.int64))
            for a in (input_ids, attention_mask, token_type_ids)
        ]
        with self._lock, torch.no_grad():
            out = self._module(*args)
        return out.numpy()


class _OnnxRunner:
    def __init__(self, path: Path):
        try:
            import onnxruntime
        except ImportError:
            raise BackendUnavailableError(
                "bundle uses onnx graphs but onnxruntime is not installed"
            ) from None
        self._session = onnxruntime.InferenceSession(
            str(path), providers=["CPUExecutionProvider"]
        )
        self._input_names = [i.name for i in self._session.get_inputs()]

    def __call__(self, input_ids, attention_mask, token_type_ids) -> np.ndarray:
        feeds = dict(
            zip(
                self._input_names,
                (
                    np.asarray(input_ids, dtype=np.int64),
                    np.asarray(attention_mask, dtype=np.int64),
                    np.asarray(token_type_ids, dtype=np.int64),
                ),
            )
        )
        return self._session.run(None, feeds)[0]


_RUNNERS = {"torchscript": _TorchscriptRunner, "onnx": _OnnxRunner}


def _make_runner(component):
    runner_cls = _RUNNERS.get(component.format)
    if runner_cls is None:
        raise BundleFormatError("no runner for graph format %r" % component.format)
    return runner_cls(component.path)


class NeuralBackend:
    """BackendHandle over the three bundle graphs plus the subword vocab."""

    def __init__(self, bundle: ModelBundle):
        self.bundle = bundle
        settings = bundle.settings
        self.max_seq_len = int(settings["max_seq_len"])
        self.vocab = WordpieceVocab.load(
            bundle.component("tokenizer_vocab").path,
            do_lower_case=bool(settings["do_lower_case"]),
        )
        self._masked_lm = _make_runner(bundle.component("masked_lm"))
        self._acceptability = _make_runner(bundle.component("acceptability_classifier"))
        self._sop = _make_runner(bundle.component("sop_classifier"))
        self._acceptability_index = int(
            bundle.component("acceptability_classifier").extra.get(
                "positive_index", settings["acceptability_positive_index"]
            )
        )
        self._sop_index = int(
            bundle.component("sop_classifier").extra.get(
                "positive_index", settings["sop_positive_index"]
            )
        )

    # -- masked token scoring -------------------------------------------------

    def masked_token_logprob(self, tokens: Sequence[str], mask_index: int) -> float:
        if not 0 <= mask_index < len(tokens):
            raise IndexError(
                "mask_index %d out of range for %d tokens" % (mask_index, len(tokens))
            )
        pieces_per_word = [self.vocab.wordpiece(w) for w in tokens]
        flat: list[int] = []
        target_start = target_end = 0
        for w, pieces in enumerate(pieces_per_word):
            if w == mask_index:
                target_start = len(flat)
                target_end = target_start + len(pieces)
            flat.extend(pieces)

        window_start, window_end = _centered_window(
            len(flat), target_start, target_end, self.max_seq_len - 2
        )
        window = flat[window_start:window_end]
        true_ids = flat[target_start:target_end]
        offset = 1 - window_start  # position shift after prepending [CLS]

        ids = [self.vocab.cls_id] + window + [self.vocab.sep_id]
        positions = [p + offset for p in range(target_start, target_end)]
        for p in positions:
            ids[p] = self.vocab.mask_id

        logits = self._run(self._masked_lm, ids)[0]
        total = 0.0
        for p, true_id in zip(positions, true_ids):
            total += float(_log_softmax(logits[p])[true_id])
        return total

    # -- classifiers -----------------------------------------------------------

    def acceptability_prob(self, sentence_text: str) -> float:
        if not sentence_text.strip():
            raise ValueError("cannot score an empty sentence")
        body = self.vocab.encode_text(sentence_text)[: self.max_seq_len - 2]
        ids = [self.vocab.cls_id] + body + [self.vocab.sep_id]
        logits = self._run(self._acceptability, ids)[0]
        return float(_softmax(logits)[self._acceptability_index])

    def sop_prob(self, segment_a: str, segment_b: str) -> float:
        if not segment_a.strip() or not segment_b.strip():
            raise ValueError("cannot score an empty segment")
        a = self.vocab.encode_text(segment_a)
        b = self.vocab.encode_text(segment_b)
        a, b = _fit_pair(a, b, self.max_seq_len - 3)
        ids = [self.vocab.cls_id] + a + [self.vocab.sep_id] + b + [self.vocab.sep_id]
        types = [0] * (len(a) + 2) + [1] * (len(b) + 1)
        logits = self._run(self._sop, ids, token_type_ids=types)[0]
        return float(_softmax(logits)[self._sop_index])

    # -- plumbing ----------------------------------------------------------------

    def _run(self, runner, ids: list[int], token_type_ids: list[int] | None = None):
        arr = np.asarray([ids], dtype=np.int64)
        attention = np.ones_like(arr)
        types = (
            np.asarray([token_type_ids], dtype=np.int64)
            if token_type_ids is not None
            else np.zeros_like(arr)
        )
        return runner(arr, attention, types)


def load_bundle(path: str | Path) -> NeuralBackend:
    """Verify the bundle at path and return a ready scoring handle."""
    return NeuralBackend(read_bundle(path))


def _centered_window(length: int, target_start: int, target_end: int, budget: int):
    """Clip [0, length) to at most budget positions, centered on the target."""
    if length <= budget:
        return 0, length
    spare = budget - (target_end - target_start)
    if spare <= 0:  # degenerate: the word alone exceeds the budget
        return target_start, target_start + budget
    left = target_start - spare // 2
    right = target_end + (spare - spare // 2)
    if left < 0:
        right -= left
        left = 0
    if right > length:
        left -= right - length
        right = length
        left = max(left, 0)
    return left, right


def _fit_pair(a: list[int], b: list[int], budget: int):
    """Trim segment ends farthest from the split point until the pair fits."""
    if len(a) + len(b) <= budget:
        return a, b
    half = budget // 2
    keep_a = min(len(a), max(half, budget - len(b)))
    keep_b = budget - keep_a
    return a[len(a) - keep_a :], b[:keep_b]


def _softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - np.max(x)
    e = np.exp(shifted)
    return e / e.sum()


def _log_softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - np.max(x)
    return shifted - np.log(np.exp(shifted).sum())
