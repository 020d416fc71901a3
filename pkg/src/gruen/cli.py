"""Command-line surface for batch scoring and the correlation harness.

Exit codes: 0 full success, 1 fatal setup or parse error, 2 completed with
partial failures (embedded per-record). Every fatal diagnostic is a single
stderr line prefixed "gruen: error:".
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .backend import BundleError, StubBackend, load_bundle
from .config import MetricConfig, config_to_dict, load_config, save_config
from .evalstats import (
    CorrelationError,
    JudgmentParseError,
    correlate,
    load_judgments,
    williams_compare,
)
from .focus import EmbeddingError, load_embeddings
from .pipeline import score_corpus
from .plots import make_bins, render_pairs_figure

ENV_BUNDLE = "GRUEN_BUNDLE"


class _Fatal(Exception):
    pass


def _fail(message: str) -> "_Fatal":
    return _Fatal(message)


def _sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _sha256_file(path: Path) -> str:
    return _sha256_bytes(path.read_bytes())


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


# ---------------------------------------------------------------------------
# score


def _read_input_jsonl(path: Path) -> list[tuple[str, str]]:
    items: list[tuple[str, str]] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                items.append((str(doc["id"]), str(doc["text"])))
            except (KeyError, ValueError) as exc:
                raise _fail("input line %d: %s" % (lineno, exc)) from None
    return items


def cmd_score(args: argparse.Namespace) -> int:
    started = _utcnow()
    config = MetricConfig()
    config_hash = _sha256_bytes(
        json.dumps(config_to_dict(config), sort_keys=True).encode()
    )
    if args.config:
        config_path = Path(args.config)
        if not config_path.is_file():
            raise _fail("config file not found: %s" % config_path)
        try:
            config = load_config(config_path)
        except (ValueError, TypeError) as exc:
            raise _fail("config: %s" % exc) from None
        config_hash = _sha256_file(config_path)

    bundle_arg = args.bundle or os.environ.get(ENV_BUNDLE)
    if not bundle_arg:
        raise _fail("no --bundle given and %s is unset" % ENV_BUNDLE)
    if bundle_arg == "stub":
        handle = StubBackend.from_config(config.stub)
        bundle_hash = None
    else:
        try:
            handle = load_bundle(bundle_arg)
        except BundleError as exc:
            raise _fail("bundle: %s" % exc) from None
        bundle_hash = _sha256_file(Path(bundle_arg) / "manifest.json")

    embeddings_path = Path(args.embeddings)
    if not embeddings_path.is_file():
        raise _fail("embeddings file not found: %s" % embeddings_path)
    try:
        table = load_embeddings(embeddings_path)
    except EmbeddingError as exc:
        raise _fail("embeddings: %s" % exc) from None

    input_path = Path(args.input)
    if not input_path.is_file():
        raise _fail("input file not found: %s" % input_path)
    items = _read_input_jsonl(input_path)
    try:
        records = score_corpus(items, handle, table, config, threads=args.threads)
    except ValueError as exc:
        raise _fail(str(exc)) from None

    failures = 0
    out_path = Path(args.output)
    with open(out_path, "w", encoding="utf-8") as out:
        for record in records:
            if record.error is not None:
                failures += 1
                payload = {"id": record.id, "error": record.error}
            else:
                s = record.score
                payload = {
                    "id": record.id,
                    "y_g": s.y_g,
                    "y_r": s.y_r,
                    "y_f": s.y_f,
                    "y_c": s.y_c,
                    "gruen": s.total,
                    "warnings": list(s.warnings),
                }
            out.write(json.dumps(payload) + "\n")

    manifest = {
        "tool_version": __version__,
        "backend": "stub" if bundle_arg == "stub" else "bundle",
        "config_sha256": config_hash,
        "bundle_sha256": bundle_hash,
        "embeddings_sha256": _sha256_file(embeddings_path),
        "documents": len(records),
        "failures": failures,
        "started_at": started,
        "finished_at": _utcnow(),
    }
    manifest_path = out_path.with_name(out_path.name + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return 2 if failures else 0


# ---------------------------------------------------------------------------
# corr / williams


def cmd_corr(args: argparse.Namespace) -> int:
    try:
        records = load_judgments(args.judgments)
        report = correlate(
            records,
            level=args.level,
            metrics=args.metrics.split(",") if args.metrics else None,
            dimensions=args.dimensions.split(",") if args.dimensions else None,
        )
    except (JudgmentParseError, CorrelationError, OSError) as exc:
        raise _fail(str(exc)) from None
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(report.format_table())
    return 0


def cmd_williams(args: argparse.Namespace) -> int:
    try:
        records = load_judgments(args.judgments)
        result = williams_compare(
            records,
            metric_a=args.metric_a,
            metric_b=args.metric_b,
            dimension=args.dimension,
            coef=args.coef,
            two_sided=args.two_sided,
        )
    except (JudgmentParseError, CorrelationError, OSError) as exc:
        raise _fail(str(exc)) from None
    if args.json:
        print(json.dumps(result, indent=2))
    else:
        for key in ("r12", "r13", "r23"):
            print("%s (%s): %.6f" % (key, result["coef"], result[key]))
        print("n: %d" % result["n"])
        print("t: %.6f" % result["t"])
        print("p: %.6g" % result["p"])
    return 0


# ---------------------------------------------------------------------------
# plotdata


def cmd_plotdata(args: argparse.Namespace) -> int:
    try:
        judgments = load_judgments(args.judgments)
    except (JudgmentParseError, OSError) as exc:
        raise _fail(str(exc)) from None

    scores: dict[str, float] = {}
    scores_path = Path(args.scores)
    if not scores_path.is_file():
        raise _fail("scores file not found: %s" % scores_path)
    with open(scores_path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
            except ValueError as exc:
                raise _fail("scores line %d: %s" % (lineno, exc)) from None
            if args.metric_field in doc:
                scores[str(doc["id"])] = float(doc[args.metric_field])

    dimensions = sorted({d for r in judgments for d in r.human})
    dimension = args.dimension
    if dimension is None:
        if len(dimensions) != 1:
            raise _fail("dimension is ambiguous; pick one of %s" % dimensions)
        dimension = dimensions[0]

    pairs: list[tuple[str, float, float]] = []
    unjoined: list[str] = []
    judged_ids = set()
    for record in judgments:
        judged_ids.add(record.instance_id)
        if dimension not in record.human:
            continue
        if record.instance_id in scores:
            pairs.append(
                (record.instance_id, record.human[dimension], scores[record.instance_id])
            )
        else:
            unjoined.append(record.instance_id)
    unjoined.extend(sorted(set(scores) - judged_ids))

    out_path = Path(args.out)
    with open(out_path, "w", encoding="utf-8", newline="") as out:
        writer = csv.writer(out)
        writer.writerow(["instance_id", "human", "metric"])
        for instance_id, h, m in pairs:
            writer.writerow([instance_id, repr(h), repr(m)])

    human = [h for _, h, _ in pairs]
    metric = [m for _, _, m in pairs]
    bins = make_bins(human, metric)
    bins_path = out_path.with_name(out_path.stem + ".bins.csv")
    with open(bins_path, "w", encoding="utf-8", newline="") as out:
        writer = csv.writer(out)
        writer.writerow(["bin_low", "bin_high", "mean_metric", "count"])
        for b in bins:
            writer.writerow([repr(b.low), repr(b.high), repr(b.mean_metric), b.count])

    if not args.no_fig and pairs:
        fig_path = args.fig or str(out_path.with_suffix(".png"))
        render_pairs_figure(
            human, metric, bins, fig_path,
            xlabel="human %s" % dimension,
            ylabel=args.metric_field,
        )

    if unjoined:
        print(
            "gruen: warning: %d unjoined ids: %s"
            % (len(unjoined), ",".join(unjoined[:10])),
            file=sys.stderr,
        )
        return 2
    return 0


# ---------------------------------------------------------------------------
# config


def cmd_config(args: argparse.Namespace) -> int:
    if args.action != "init":
        raise _fail("unknown config action %r" % args.action)
    save_config(MetricConfig(), args.out)
    print("wrote default config to %s" % args.out)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gruen",
        description="Reference-less linguistic quality scoring and correlation harness",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", help="score a JSONL corpus of {id, text} documents")
    p.add_argument("--input", required=True, help="input JSONL of {id, text}")
    p.add_argument("--bundle", help="model bundle dir, or 'stub' (default: $%s)" % ENV_BUNDLE)
    p.add_argument("--embeddings", required=True, help="word2vec text embeddings")
    p.add_argument("--config", help="JSON metric config (default: built-in constants)")
    p.add_argument("--output", required=True, help="output JSONL path")
    p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("corr", help="correlate metric columns with human judgments")
    p.add_argument("--judgments", required=True)
    p.add_argument("--level", choices=("instance", "system"), default="instance")
    p.add_argument("--dimensions", help="comma-separated human dimensions (default all)")
    p.add_argument("--metrics", help="comma-separated metric names (default all)")
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.set_defaults(func=cmd_corr)

    p = sub.add_parser("williams", help="significance of one metric over another")
    p.add_argument("--judgments", required=True)
    p.add_argument("--metric-a", required=True)
    p.add_argument("--metric-b", required=True)
    p.add_argument("--dimension", required=True)
    p.add_argument("--coef", choices=("pearson", "spearman"), default="pearson")
    p.add_argument("--two-sided", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_williams)

    p = sub.add_parser("plotdata", help="join scores with judgments; emit CSV + figure")
    p.add_argument("--scores", required=True, help="JSONL produced by 'score'")
    p.add_argument("--judgments", required=True)
    p.add_argument("--dimension", help="human dimension (default: the only one)")
    p.add_argument("--metric-field", default="gruen", help="score field to plot")
    p.add_argument("--out", required=True, help="output CSV of (id, human, metric)")
    p.add_argument("--fig", help="figure path (default: out with .png)")
    p.add_argument("--no-fig", action="store_true", help="skip figure rendering")
    p.set_defaults(func=cmd_plotdata)

    p = sub.add_parser("config", help="configuration helpers")
    p.add_argument("action", choices=("init",))
    p.add_argument("--out", default="gruen-config.json")
    p.set_defaults(func=cmd_config)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Fatal as exc:
        print("gruen: error: %s" % exc, file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
