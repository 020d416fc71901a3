"""Acceptability fine-tuning on grammatical/ungrammatical sentence pairs.

The data format is the published 4-column TSV (source code, binary label,
author annotation, sentence) without a header row. Training is a plain
seeded loop, so a fixed recipe reproduces the same dev score bit for bit on
the same software stack.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer


class ColaFormatError(ValueError):
    """Data file does not match the published tabular format."""


@dataclass
class FinetuneResult:
    model: torch.nn.Module
    tokenizer: object
    dev_mcc: float
    epoch_mccs: list[float]


def load_cola_tsv(path: str | Path) -> list[tuple[str, int]]:
    """Parse (sentence, label) pairs from the 4-column tabular format."""
    rows: list[tuple[str, int]] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) < 4:
                raise ColaFormatError(
                    "%s line %d: expected 4 tab-separated columns" % (path, lineno)
                )
            try:
                label = int(parts[1])
            except ValueError:
                raise ColaFormatError(
                    "%s line %d: label %r is not an integer" % (path, lineno, parts[1])
                ) from None
            if label not in (0, 1):
                raise ColaFormatError(
                    "%s line %d: label must be 0 or 1" % (path, lineno)
                )
            rows.append((parts[3], label))
    if not rows:
        raise ColaFormatError("%s contains no examples" % path)
    return rows


def matthews_corrcoef(y_true: list[int], y_pred: list[int]) -> float:
    """Binary MCC from confusion counts; 0.0 when any marginal is empty."""
    tp = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 1)
    tn = sum(1 for t, p in zip(y_true, y_pred) if t == 0 and p == 0)
    fp = sum(1 for t, p in zip(y_true, y_pred) if t == 0 and p == 1)
    fn = sum(1 for t, p in zip(y_true, y_pred) if t == 1 and p == 0)
    denom = math.sqrt(
        float(tp + fp) * float(tp + fn) * float(tn + fp) * float(tn + fn)
    )
    if denom == 0.0:
        return 0.0
    return (tp * tn - fp * fn) / denom


def _encode_batch(tokenizer, sentences, max_len, device):
    enc = tokenizer(
        list(sentences),
        padding=True,
        truncation=True,
        max_length=max_len,
        return_tensors="pt",
    )
    return {k: v.to(device) for k, v in enc.items()}


def evaluate_mcc(model, tokenizer, rows, max_len=128, batch_size=64, device="cpu") -> float:
    model.eval()
    predictions: list[int] = []
    with torch.no_grad():
        for start in range(0, len(rows), batch_size):
            batch = rows[start : start + batch_size]
            enc = _encode_batch(tokenizer, [s for s, _ in batch], max_len, device)
            logits = model(**enc).logits
            predictions.extend(logits.argmax(dim=-1).tolist())
    return matthews_corrcoef([label for _, label in rows], predictions)


def finetune_acceptability(recipe, model=None, tokenizer=None) -> FinetuneResult:
    """Fine-tune a binary acceptability classifier and report its dev MCC.

    model/tokenizer default to the recipe's base checkpoint; passing them in
    lets callers reuse locally constructed models (tests, offline runs).
    """
    if recipe.cola_train_path is None or recipe.cola_dev_path is None:
        raise ColaFormatError("recipe lacks cola_train_path/cola_dev_path")
    train_rows = load_cola_tsv(recipe.cola_train_path)
    dev_rows = load_cola_tsv(recipe.cola_dev_path)

    torch.manual_seed(recipe.seed)
    np.random.seed(recipe.seed)
    shuffler = random.Random(recipe.seed)

    device = torch.device(recipe.device)
    if tokenizer is None:
        tokenizer = AutoTokenizer.from_pretrained(recipe.acceptability_base_checkpoint)
    if model is None:
        model = AutoModelForSequenceClassification.from_pretrained(
            recipe.acceptability_base_checkpoint, num_labels=2
        )
    model.to(device)

    optimizer = torch.optim.AdamW(model.parameters(), lr=recipe.learning_rate)
    max_len = min(recipe.max_seq_len, 128)

    epoch_mccs: list[float] = []
    order = list(range(len(train_rows)))
    for _ in range(recipe.epochs):
        model.train()
        shuffler.shuffle(order)
        for start in range(0, len(order), recipe.batch_size):
            batch = [train_rows[k] for k in order[start : start + recipe.batch_size]]
            enc = _encode_batch(tokenizer, [s for s, _ in batch], max_len, device)
            labels = torch.tensor([label for _, label in batch], device=device)
            loss = model(**enc, labels=labels).loss
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
        epoch_mccs.append(
            evaluate_mcc(model, tokenizer, dev_rows, max_len=max_len, device=device)
        )

    return FinetuneResult(
        model=model,
        tokenizer=tokenizer,
        dev_mcc=epoch_mccs[-1],
        epoch_mccs=epoch_mccs,
    )
