"""Embedding table filtering: cut a large word2vec text file down to a vocabulary."""

from __future__ import annotations

from pathlib import Path


class EmbeddingExportError(ValueError):
    pass


def export_embeddings(source_path: str | Path, vocab, out_path: str | Path) -> int:
    """Write the source rows whose word is in vocab; returns the row count.

    Output is word2vec text format with a count header and 6-decimal
    components, loadable by the scoring engine's embedding reader.
    """
    wanted = set(vocab)
    if not wanted:
        raise EmbeddingExportError("vocabulary filter is empty")
    kept: list[tuple[str, list[float]]] = []
    dimension: int | None = None
    with open(source_path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            parts = line.rstrip("\n").split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue  # count header
            word, values = parts[0], parts[1:]
            if dimension is None:
                dimension = len(values)
            if len(values) != dimension:
                raise EmbeddingExportError(
                    "%s line %d: expected %d components, found %d"
                    % (source_path, lineno, dimension, len(values))
                )
            if word in wanted:
                try:
                    kept.append((word, [float(v) for v in values]))
                except ValueError as exc:
                    raise EmbeddingExportError(
                        "%s line %d: %s" % (source_path, lineno, exc)
                    ) from None
    if not kept:
        raise EmbeddingExportError(
            "no overlap between the source vectors and the vocabulary filter"
        )
    with open(out_path, "w", encoding="utf-8") as out:
        out.write("%d %d\n" % (len(kept), dimension))
        for word, values in kept:
            out.write(word + " " + " ".join("%.6f" % v for v in values) + "\n")
    return len(kept)
