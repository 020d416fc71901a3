"""Fine-tune and export the model bundle consumed by the scoring backend."""

__version__ = "0.1.0"

from .cola import FinetuneResult, finetune_acceptability, load_cola_tsv, matthews_corrcoef
from .embeddings import export_embeddings
from .export import Checkpoints, ExportError, export_bundle
from .recipe import ExportRecipe, load_recipe, save_recipe

__all__ = [
    "Checkpoints",
    "ExportError",
    "ExportRecipe",
    "FinetuneResult",
    "export_bundle",
    "export_embeddings",
    "finetune_acceptability",
    "load_cola_tsv",
    "load_recipe",
    "matthews_corrcoef",
    "save_recipe",
]
