"""Command line for the fine-tune/export pipeline."""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict
from pathlib import Path

from .cola import ColaFormatError, finetune_acceptability
from .embeddings import EmbeddingExportError, export_embeddings
from .export import Checkpoints, ExportError, export_bundle
from .recipe import ExportRecipe, load_recipe, save_recipe


def cmd_recipe_init(args) -> int:
    save_recipe(ExportRecipe(), args.out)
    print("wrote default recipe to %s" % args.out)
    return 0


def cmd_finetune(args) -> int:
    recipe = load_recipe(args.recipe)
    try:
        result = finetune_acceptability(recipe)
    except ColaFormatError as exc:
        print("gruen-export: error: %s" % exc, file=sys.stderr)
        return 1
    out = Path(args.out)
    result.model.save_pretrained(out)
    result.tokenizer.save_pretrained(out)
    print("dev MCC: %.4f (per epoch: %s)" % (
        result.dev_mcc, ", ".join("%.4f" % m for m in result.epoch_mccs)
    ))
    print("saved checkpoint to %s" % out)
    return 0


def cmd_export(args) -> int:
    import torch  # deferred: slow import
    from transformers import (
        AutoModelForMaskedLM,
        AutoModelForSequenceClassification,
        AutoTokenizer,
    )

    recipe = load_recipe(args.recipe)
    tokenizer = AutoTokenizer.from_pretrained(recipe.masked_lm_checkpoint)
    masked_lm = AutoModelForMaskedLM.from_pretrained(recipe.masked_lm_checkpoint)
    acceptability_source = args.acceptability_checkpoint or recipe.acceptability_base_checkpoint
    acceptability = AutoModelForSequenceClassification.from_pretrained(
        acceptability_source, num_labels=2
    )
    sop = AutoModelForSequenceClassification.from_pretrained(
        recipe.sop_checkpoint, num_labels=2
    )
    try:
        out = export_bundle(
            recipe,
            Checkpoints(
                masked_lm=masked_lm,
                acceptability=acceptability,
                sop=sop,
                tokenizer=tokenizer,
            ),
        )
    except ExportError as exc:
        print("gruen-export: error: %s" % exc, file=sys.stderr)
        return 1
    print("wrote bundle to %s" % out)
    return 0


def cmd_embeddings(args) -> int:
    vocab = [
        line.strip()
        for line in Path(args.vocab).read_text("utf-8").splitlines()
        if line.strip()
    ]
    try:
        count = export_embeddings(args.source, vocab, args.out)
    except EmbeddingExportError as exc:
        print("gruen-export: error: %s" % exc, file=sys.stderr)
        return 1
    print("wrote %d vectors to %s" % (count, args.out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gruen-export", description="Build model bundles for the scoring engine"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recipe", help="recipe helpers")
    p.add_argument("action", choices=("init",))
    p.add_argument("--out", default="export-recipe.json")
    p.set_defaults(func=cmd_recipe_init)

    p = sub.add_parser("finetune", help="fine-tune the acceptability classifier")
    p.add_argument("--recipe", required=True)
    p.add_argument("--out", required=True, help="checkpoint output directory")
    p.set_defaults(func=cmd_finetune)

    p = sub.add_parser("export", help="export the bundle from checkpoints")
    p.add_argument("--recipe", required=True)
    p.add_argument(
        "--acceptability-checkpoint",
        help="fine-tuned checkpoint dir (default: recipe base, untuned)",
    )
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("embeddings", help="filter a word2vec text file to a vocabulary")
    p.add_argument("--source", required=True)
    p.add_argument("--vocab", required=True, help="one word per line")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embeddings)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
