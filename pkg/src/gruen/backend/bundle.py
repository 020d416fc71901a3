"""Model bundle layout: manifest parsing and integrity verification.

A bundle directory holds ``manifest.json`` mapping each component name to
``{file, sha256, format_version}`` (plus optional ``format`` and
component-specific keys), the serialized graphs, and the subword
vocabulary. A reserved top-level ``settings`` section carries shared
inference settings.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

from .base import (
    BundleComponentMissingError,
    BundleFileMissingError,
    BundleFormatError,
    BundleIntegrityError,
)

REQUIRED_COMPONENTS = (
    "masked_lm",
    "acceptability_classifier",
    "sop_classifier",
    "tokenizer_vocab",
)
GRAPH_FORMATS = ("onnx", "torchscript")
SUPPORTED_FORMAT_VERSION = 1

DEFAULT_SETTINGS = {
    "max_seq_len": 512,
    "do_lower_case": False,
    "acceptability_positive_index": 1,
    "sop_positive_index": 0,
}


@dataclass(frozen=True)
class BundleComponent:
    name: str
    path: Path
    sha256: str
    format: str
    format_version: int
    extra: dict = field(default_factory=dict)


@dataclass(frozen=True)
class ModelBundle:
    bundle_dir: Path
    components: dict[str, BundleComponent]
    settings: dict

    def component(self, name: str) -> BundleComponent:
        return self.components[name]


def file_sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def read_bundle(bundle_dir: str | Path) -> ModelBundle:
    """Parse and verify a bundle directory; every failure mode is distinct."""
    bundle_dir = Path(bundle_dir)
    manifest_path = bundle_dir / "manifest.json"
    if not manifest_path.is_file():
        raise BundleFileMissingError("no manifest.json in %s" % bundle_dir)
    try:
        manifest = json.loads(manifest_path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise BundleFormatError("manifest.json does not parse: %s" % exc) from None

    settings = dict(DEFAULT_SETTINGS)
    settings.update(manifest.get("settings", {}))

    components: dict[str, BundleComponent] = {}
    for name in REQUIRED_COMPONENTS:
        entry = manifest.get(name)
        if entry is None:
            raise BundleComponentMissingError(
                "manifest lacks required component %r" % name
            )
        for key in ("file", "sha256", "format_version"):
            if key not in entry:
                raise BundleFormatError(
                    "component %r entry lacks %r" % (name, key)
                )
        if entry["format_version"] != SUPPORTED_FORMAT_VERSION:
            raise BundleFormatError(
                "component %r declares format_version %r; supported: %d"
                % (name, entry["format_version"], SUPPORTED_FORMAT_VERSION)
            )
        default_format = "wordpiece" if name == "tokenizer_vocab" else "onnx"
        fmt = entry.get("format", default_format)
        if name != "tokenizer_vocab" and fmt not in GRAPH_FORMATS:
            raise BundleFormatError(
                "component %r declares unknown graph format %r" % (name, fmt)
            )
        path = bundle_dir / entry["file"]
        if not path.is_file():
            raise BundleFileMissingError(
                "component %r file missing: %s" % (name, path)
            )
        actual = file_sha256(path)
        if actual != entry["sha256"]:
            raise BundleIntegrityError(
                "component %r hash mismatch: manifest %s, file %s"
                % (name, entry["sha256"], actual)
            )
        extra = {
            k: v
            for k, v in entry.items()
            if k not in ("file", "sha256", "format", "format_version")
        }
        components[name] = BundleComponent(
            name=name,
            path=path,
            sha256=actual,
            format=fmt,
            format_version=entry["format_version"],
            extra=extra,
        )
    return ModelBundle(bundle_dir=bundle_dir, components=components, settings=settings)
