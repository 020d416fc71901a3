"""Bundle export: serialize the three scoring models to portable graphs.

The bundle directory layout is the scoring backend's external interface:
``manifest.json`` mapping each component to {file, sha256, format_version,
format, ...}, the graph files, and a single ``vocab.txt`` subword
vocabulary shared by all components. All graphs take (input_ids,
attention_mask, token_type_ids) and return logits.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

FORMAT_VERSION = 1


class ExportError(RuntimeError):
    pass


@dataclass
class Checkpoints:
    """The three model/tokenizer pairs going into one bundle."""

    masked_lm: torch.nn.Module
    acceptability: torch.nn.Module
    sop: torch.nn.Module
    tokenizer: object  # shared; export enforces a single subword vocabulary


class _LogitsOnly(torch.nn.Module):
    def __init__(self, inner):
        super().__init__()
        self.inner = inner

    def forward(self, input_ids, attention_mask, token_type_ids):
        return self.inner(
            input_ids=input_ids,
            attention_mask=attention_mask,
            token_type_ids=token_type_ids,
        ).logits


def _file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def ordered_vocab(tokenizer) -> list[str]:
    vocab = tokenizer.get_vocab()
    return [token for token, _ in sorted(vocab.items(), key=lambda kv: kv[1])]


def _trace(model, vocab_size: int, path: Path) -> None:
    wrapped = _LogitsOnly(model.eval())
    ids = torch.randint(0, vocab_size, (1, 8), dtype=torch.int64)
    example = (ids, torch.ones_like(ids), torch.zeros_like(ids))
    with torch.no_grad():
        traced = torch.jit.trace(wrapped, example)
    torch.jit.save(traced, str(path))


def _export_onnx(model, vocab_size: int, path: Path) -> None:
    try:
        import onnx  # noqa: F401
    except ImportError:
        raise ExportError(
            "graph_format 'onnx' needs the onnx toolchain installed"
        ) from None
    wrapped = _LogitsOnly(model.eval())
    ids = torch.randint(0, vocab_size, (1, 8), dtype=torch.int64)
    example = (ids, torch.ones_like(ids), torch.zeros_like(ids))
    torch.onnx.export(
        wrapped,
        example,
        str(path),
        input_names=["input_ids", "attention_mask", "token_type_ids"],
        output_names=["logits"],
        dynamic_axes={
            "input_ids": {0: "batch", 1: "seq"},
            "attention_mask": {0: "batch", 1: "seq"},
            "token_type_ids": {0: "batch", 1: "seq"},
            "logits": {0: "batch", 1: "seq"},
        },
        dynamo=False,
    )


def export_bundle(recipe, checkpoints: Checkpoints) -> Path:
    """Write the bundle directory and return its path."""
    out = Path(recipe.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    tokenizer = checkpoints.tokenizer
    vocab = ordered_vocab(tokenizer)
    for model_name, model in (
        ("masked_lm", checkpoints.masked_lm),
        ("acceptability_classifier", checkpoints.acceptability),
        ("sop_classifier", checkpoints.sop),
    ):
        embeddings = model.get_input_embeddings()
        if embeddings.num_embeddings != len(vocab):
            raise ExportError(
                "component %r embedding size %d does not match the shared "
                "vocabulary (%d tokens); all bundle components must share one "
                "subword vocabulary" % (model_name, embeddings.num_embeddings, len(vocab))
            )

    vocab_path = out / "vocab.txt"
    vocab_path.write_text("\n".join(vocab) + "\n", encoding="utf-8")

    suffix = ".pt" if recipe.graph_format == "torchscript" else ".onnx"
    serialize = _trace if recipe.graph_format == "torchscript" else _export_onnx

    manifest: dict = {}
    graph_components = {
        "masked_lm": (checkpoints.masked_lm, {}),
        "acceptability_classifier": (checkpoints.acceptability, {"positive_index": 1}),
        "sop_classifier": (
            checkpoints.sop,
            {"positive_index": recipe.sop_positive_index},
        ),
    }
    for name, (model, extra) in graph_components.items():
        path = out / (name + suffix)
        serialize(model, len(vocab), path)
        manifest[name] = {
            "file": path.name,
            "sha256": _file_sha256(path),
            "format": recipe.graph_format,
            "format_version": FORMAT_VERSION,
            **extra,
        }
    manifest["tokenizer_vocab"] = {
        "file": vocab_path.name,
        "sha256": _file_sha256(vocab_path),
        "format_version": FORMAT_VERSION,
    }
    manifest["settings"] = {
        "max_seq_len": int(
            min(recipe.max_seq_len, checkpoints.masked_lm.config.max_position_embeddings)
        ),
        "do_lower_case": bool(getattr(tokenizer, "do_lower_case", False)),
        "acceptability_positive_index": 1,
        "sop_positive_index": recipe.sop_positive_index,
    }
    manifest["provenance"] = {
        "masked_lm_checkpoint": recipe.masked_lm_checkpoint,
        "acceptability_base_checkpoint": recipe.acceptability_base_checkpoint,
        "sop_checkpoint": recipe.sop_checkpoint,
        "seed": recipe.seed,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return out


# ---------------------------------------------------------------------------
# parity against the training framework


def load_torchscript_graph(bundle_dir: str | Path, component: str):
    manifest = json.loads((Path(bundle_dir) / "manifest.json").read_text())
    entry = manifest[component]
    if entry["format"] != "torchscript":
        raise ExportError("parity runner only drives torchscript graphs")
    module = torch.jit.load(str(Path(bundle_dir) / entry["file"]), map_location="cpu")

    def run(ids, attention, types):
        with torch.no_grad():
            return module(ids, attention, types)

    return run


def masked_logprobs(run_fn, tokenizer, sentence: str, max_len: int = 128) -> list[float]:
    """Per-position masked log-probabilities with one engine behind run_fn.

    The same encoding and masking drive both the eager model and the
    exported graph, so any disagreement is attributable to serialization.
    """
    enc = tokenizer(sentence, truncation=True, max_length=max_len, return_tensors="pt")
    ids = enc["input_ids"]
    out: list[float] = []
    for pos in range(1, ids.shape[1] - 1):  # skip [CLS] and [SEP]
        masked = ids.clone()
        true_id = int(masked[0, pos])
        masked[0, pos] = tokenizer.mask_token_id
        logits = run_fn(masked, torch.ones_like(masked), torch.zeros_like(masked))
        row = logits[0, pos]
        logprob = float(row[true_id] - torch.logsumexp(row, dim=-1))
        out.append(logprob)
    return out


def classifier_prob(run_fn, tokenizer, sentence: str, index: int, max_len: int = 128) -> float:
    enc = tokenizer(sentence, truncation=True, max_length=max_len, return_tensors="pt")
    ids = enc["input_ids"]
    logits = run_fn(ids, torch.ones_like(ids), torch.zeros_like(ids))
    probs = torch.softmax(logits[0], dim=-1)
    return float(probs[index])


def eager_runner(model):
    wrapped = _LogitsOnly(model.eval())

    def run(ids, attention, types):
        with torch.no_grad():
            return wrapped(ids, attention, types)

    return run


def masked_lm_parity(bundle_dir, model, tokenizer, sentences) -> float:
    """Max |Δ| between exported-graph and in-framework masked log-probs."""
    graph = load_torchscript_graph(bundle_dir, "masked_lm")
    eager = eager_runner(model)
    worst = 0.0
    for sentence in sentences:
        got = masked_logprobs(graph, tokenizer, sentence)
        want = masked_logprobs(eager, tokenizer, sentence)
        for g, w in zip(got, want):
            worst = max(worst, abs(g - w))
    return worst


def acceptability_parity(bundle_dir, model, tokenizer, sentences) -> float:
    graph = load_torchscript_graph(bundle_dir, "acceptability_classifier")
    eager = eager_runner(model)
    worst = 0.0
    for sentence in sentences:
        got = classifier_prob(graph, tokenizer, sentence, index=1)
        want = classifier_prob(eager, tokenizer, sentence, index=1)
        worst = max(worst, abs(got - want))
    return worst
