"""Export recipe: every knob of the fine-tune/export pipeline in one document.

A recipe pins the base checkpoints, data paths, and hyperparameters so that
a bundle can be rebuilt reproducibly (fixed seed, identical software stack).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path


@dataclass
class ExportRecipe:
    # base checkpoints (hub ids or local directories)
    masked_lm_checkpoint: str = "bert-base-cased"
    sop_checkpoint: str = "bert-base-cased"
    acceptability_base_checkpoint: str | None = None  # defaults to masked_lm_checkpoint

    # acceptability fine-tuning data (published 4-column TSV, no header)
    cola_train_path: str | None = None
    cola_dev_path: str | None = None

    # fine-tune hyperparameters
    epochs: int = 3
    learning_rate: float = 2e-5
    batch_size: int = 32
    seed: int = 42
    max_seq_len: int = 512
    device: str = "cpu"

    # bundle output
    output_dir: str = "bundle"
    graph_format: str = "torchscript"  # or "onnx" (needs the onnx toolchain)
    sop_positive_index: int = 0  # logit index meaning "segments in order"

    def __post_init__(self):
        if self.acceptability_base_checkpoint is None:
            self.acceptability_base_checkpoint = self.masked_lm_checkpoint
        if self.epochs < 1 or self.batch_size < 1:
            raise ValueError("epochs and batch_size must be positive")
        if self.graph_format not in ("torchscript", "onnx"):
            raise ValueError("graph_format must be 'torchscript' or 'onnx'")


def load_recipe(path: str | Path) -> ExportRecipe:
    with open(path, encoding="utf-8") as handle:
        return ExportRecipe(**json.load(handle))


def save_recipe(recipe: ExportRecipe, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(asdict(recipe), handle, indent=2, sort_keys=True)
        handle.write("\n")
