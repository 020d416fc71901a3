"""Correlation harness for validating metrics against human judgments.

Ingests per-instance judgment files (CSV or JSONL), computes Spearman,
Kendall tau-b and Pearson coefficients at instance or system level, and
runs the Williams test for the difference of two dependent correlations
that share the human column.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import betainc

from .config import MetricConfig


class JudgmentParseError(ValueError):
    """Judgment file violates the expected schema."""


class CorrelationError(ValueError):
    """Correlation is undefined or its preconditions are violated."""


# ---------------------------------------------------------------------------
# coefficients


def _as_vectors(x: Sequence[float], y: Sequence[float]):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise CorrelationError("inputs must be equal-length vectors")
    if len(x) < 2:
        raise CorrelationError("need at least 2 observations")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise CorrelationError("inputs must be finite")
    return x, y


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    x, y = _as_vectors(x, y)
    dx = x - x.mean()
    dy = y - y.mean()
    sx = math.sqrt(float(dx @ dx))
    sy = math.sqrt(float(dy @ dy))
    if sx == 0.0 or sy == 0.0:
        raise CorrelationError("undefined correlation: constant input")
    r = float(dx @ dy) / (sx * sy)
    return min(1.0, max(-1.0, r))


def midranks(values: Sequence[float]) -> list[float]:
    """Ranks starting at 1; tied values share the average of their ranks."""
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr), dtype=float)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks.tolist()


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of the mid-ranks."""
    x, y = _as_vectors(x, y)
    return pearson(midranks(x), midranks(y))


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> float:
    """Tau-b over all pairs: (C - D) / sqrt((C+D+Tx)(C+D+Ty)).

    Tx counts pairs tied on x only, Ty pairs tied on y only; pairs tied on
    both sides are excluded from every term.
    """
    x, y = _as_vectors(x, y)
    concordant = discordant = ties_x = ties_y = 0
    for i in range(len(x) - 1):
        sx = np.sign(x[i + 1 :] - x[i])
        sy = np.sign(y[i + 1 :] - y[i])
        prod = sx * sy
        concordant += int((prod > 0).sum())
        discordant += int((prod < 0).sum())
        ties_x += int(((sx == 0) & (sy != 0)).sum())
        ties_y += int(((sy == 0) & (sx != 0)).sum())
    denom = math.sqrt(
        (concordant + discordant + ties_x) * (concordant + discordant + ties_y)
    )
    if denom == 0.0:
        raise CorrelationError("undefined correlation: constant input")
    return (concordant - discordant) / denom


def student_t_sf(t: float, df: int) -> float:
    """Upper-tail probability of Student's t via the regularized incomplete beta."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if t < 0:
        return 1.0 - student_t_sf(-t, df)
    return 0.5 * float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def williams_test(
    r12: float, r13: float, r23: float, n: int, two_sided: bool = False
) -> tuple[float, float]:
    """Test whether two dependent correlations sharing variable 1 differ.

    r12 and r13 are the correlations being compared (metric A vs the shared
    column, metric B vs the shared column); r23 correlates the two metrics.
    Returns (t, p) with a one-sided upper-tail p by default, so r12 > r13
    gives p < 0.5.
    """
    if n < 4:
        raise CorrelationError("williams test needs n >= 4, got %d" % n)
    if r12 == r13:
        # Zero numerator: no difference to test. Handled before the
        # admissibility checks so identical metric columns (r23 = 1,
        # degenerate denominator) still get the exact answer.
        return 0.0, 1.0 if two_sided else 0.5
    for name, r in (("r12", r12), ("r13", r13), ("r23", r23)):
        if not -1.0 < r < 1.0:
            raise CorrelationError("%s must lie in (-1, 1), got %r" % (name, r))
    k = 1.0 - r12**2 - r13**2 - r23**2 + 2.0 * r12 * r13 * r23
    if k <= 0.0:
        raise CorrelationError("inadmissible correlation triple (K <= 0)")
    rbar = (r12 + r13) / 2.0
    t = (r12 - r13) * math.sqrt((n - 1) * (1.0 + r23)) / math.sqrt(
        2.0 * k * (n - 1) / (n - 3) + rbar**2 * (1.0 - r23) ** 3
    )
    df = n - 3
    p = 2.0 * student_t_sf(abs(t), df) if two_sided else student_t_sf(t, df)
    return t, p


# ---------------------------------------------------------------------------
# judgment records


@dataclass(frozen=True)
class JudgmentRecord:
    instance_id: str
    system_id: str | None = None
    human: dict[str, float] = field(default_factory=dict)
    metrics: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class CorrelationCell:
    metric: str
    dimension: str
    spearman: float
    kendall: float
    pearson: float
    n: int


@dataclass(frozen=True)
class CorrelationReport:
    level: str
    cells: tuple[CorrelationCell, ...]

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "cells": [vars(c).copy() for c in self.cells],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "CorrelationReport":
        return cls(
            level=doc["level"],
            cells=tuple(CorrelationCell(**c) for c in doc["cells"]),
        )

    def format_table(self) -> str:
        headers = ("metric", "dimension", "n", "spearman", "kendall", "pearson")
        rows = [
            (
                c.metric,
                c.dimension,
                str(c.n),
                "%.4f" % c.spearman,
                "%.4f" % c.kendall,
                "%.4f" % c.pearson,
            )
            for c in self.cells
        ]
        widths = [
            max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
            for i, h in enumerate(headers)
        ]
        lines = ["level: %s" % self.level]
        lines.append("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
        for row in rows:
            lines.append("  ".join(v.ljust(w) for v, w in zip(row, widths)))
        return "\n".join(lines)


def load_judgments(path: str | Path, fmt: str | None = None) -> list[JudgmentRecord]:
    """Load judgment records from CSV (header-driven) or JSONL."""
    path = Path(path)
    if fmt is None:
        fmt = "jsonl" if path.suffix.lower() in (".jsonl", ".ndjson", ".json") else "csv"
    if fmt == "csv":
        records = _load_csv(path)
    elif fmt == "jsonl":
        records = _load_jsonl(path)
    else:
        raise ValueError("unknown judgments format %r" % fmt)
    return records


def _check_duplicates(ids_with_lines: list[tuple[str, int]]) -> None:
    first: dict[str, int] = {}
    for instance_id, line in ids_with_lines:
        if instance_id in first:
            raise JudgmentParseError(
                "duplicate instance_id %r on lines %d and %d"
                % (instance_id, first[instance_id], line)
            )
        first[instance_id] = line


def _load_csv(path: Path) -> list[JudgmentRecord]:
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise JudgmentParseError("%s is empty" % path) from None
        if "instance_id" not in header:
            raise JudgmentParseError("missing mandatory column 'instance_id'")
        human_cols = [(i, c[len("human:") :]) for i, c in enumerate(header) if c.startswith("human:")]
        metric_cols = [(i, c[len("metric:") :]) for i, c in enumerate(header) if c.startswith("metric:")]
        known = {"instance_id", "system_id"}
        stray = [c for c in header if c not in known and not c.startswith(("human:", "metric:"))]
        if stray:
            raise JudgmentParseError("unrecognized columns: %s" % stray)
        id_col = header.index("instance_id")
        sys_col = header.index("system_id") if "system_id" in header else None

        records: list[JudgmentRecord] = []
        ids_with_lines: list[tuple[str, int]] = []
        bad_rows: list[str] = []
        for lineno, row in enumerate(reader, 2):
            if not row:
                continue
            human: dict[str, float] = {}
            metrics: dict[str, float] = {}
            try:
                for col, name in human_cols:
                    if row[col].strip():
                        human[name] = float(row[col])
                for col, name in metric_cols:
                    if row[col].strip():
                        metrics[name] = float(row[col])
            except (ValueError, IndexError) as exc:
                bad_rows.append("line %d: %s" % (lineno, exc))
                continue
            instance_id = row[id_col]
            ids_with_lines.append((instance_id, lineno))
            records.append(
                JudgmentRecord(
                    instance_id=instance_id,
                    system_id=row[sys_col] if sys_col is not None and row[sys_col] else None,
                    human=human,
                    metrics=metrics,
                )
            )
        if bad_rows:
            raise JudgmentParseError("unparseable rows: " + "; ".join(bad_rows))
        _check_duplicates(ids_with_lines)
        return records


def _load_jsonl(path: Path) -> list[JudgmentRecord]:
    records: list[JudgmentRecord] = []
    ids_with_lines: list[tuple[str, int]] = []
    bad_rows: list[str] = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                doc = json.loads(line)
                instance_id = str(doc["instance_id"])
                human = {k: float(v) for k, v in doc.get("human", {}).items() if v is not None}
                metrics = {k: float(v) for k, v in doc.get("metrics", {}).items() if v is not None}
            except (KeyError, TypeError, ValueError) as exc:
                bad_rows.append("line %d: %s" % (lineno, exc))
                continue
            ids_with_lines.append((instance_id, lineno))
            records.append(
                JudgmentRecord(
                    instance_id=instance_id,
                    system_id=doc.get("system_id"),
                    human=human,
                    metrics=metrics,
                )
            )
    if bad_rows:
        raise JudgmentParseError("unparseable rows: " + "; ".join(bad_rows))
    _check_duplicates(ids_with_lines)
    return records


# ---------------------------------------------------------------------------
# reports


def _available(records: Iterable[JudgmentRecord], attr: str) -> list[str]:
    names: set[str] = set()
    for record in records:
        names.update(getattr(record, attr))
    return sorted(names)


def paired_values(
    records: Sequence[JudgmentRecord], metric: str, dimension: str
) -> tuple[list[float], list[float]]:
    """Metric and human vectors over records carrying both values."""
    xs, ys = [], []
    for record in records:
        if metric in record.metrics and dimension in record.human:
            xs.append(record.metrics[metric])
            ys.append(record.human[dimension])
    return xs, ys


def system_means(
    records: Sequence[JudgmentRecord],
) -> dict[str, JudgmentRecord]:
    """Collapse records to one pseudo-record of per-system column means."""
    by_system: dict[str, list[JudgmentRecord]] = {}
    for record in records:
        if not record.system_id:
            raise CorrelationError(
                "record %r lacks system_id; system-level correlation needs one"
                % record.instance_id
            )
        by_system.setdefault(record.system_id, []).append(record)
    if len(by_system) < 2:
        raise CorrelationError("system-level correlation needs at least 2 systems")

    collapsed: dict[str, JudgmentRecord] = {}
    for system_id, group in sorted(by_system.items()):
        human: dict[str, float] = {}
        metrics: dict[str, float] = {}
        for dim in _available(group, "human"):
            values = [r.human[dim] for r in group if dim in r.human]
            if values:
                human[dim] = sum(values) / len(values)
        for met in _available(group, "metrics"):
            values = [r.metrics[met] for r in group if met in r.metrics]
            if values:
                metrics[met] = sum(values) / len(values)
        collapsed[system_id] = JudgmentRecord(
            instance_id=system_id, system_id=system_id, human=human, metrics=metrics
        )
    return collapsed


def correlate(
    records: Sequence[JudgmentRecord],
    level: str = "instance",
    metrics: Sequence[str] | None = None,
    dimensions: Sequence[str] | None = None,
) -> CorrelationReport:
    """Correlation report over all requested (metric, dimension) cells.

    Records missing either value of a cell are dropped pairwise for that
    cell; the surviving count is reported as n.
    """
    if level not in ("instance", "system"):
        raise ValueError("level must be 'instance' or 'system'")
    pool: Sequence[JudgmentRecord] = records
    if level == "system":
        pool = list(system_means(records).values())
    metrics = list(metrics) if metrics else _available(pool, "metrics")
    dimensions = list(dimensions) if dimensions else _available(pool, "human")
    cells = []
    for metric in metrics:
        for dimension in dimensions:
            xs, ys = paired_values(pool, metric, dimension)
            if len(xs) < 2:
                raise CorrelationError(
                    "fewer than 2 paired observations for metric %r / dimension %r"
                    % (metric, dimension)
                )
            cells.append(
                CorrelationCell(
                    metric=metric,
                    dimension=dimension,
                    spearman=spearman(xs, ys),
                    kendall=kendall_tau_b(xs, ys),
                    pearson=pearson(xs, ys),
                    n=len(xs),
                )
            )
    return CorrelationReport(level=level, cells=tuple(cells))


def system_level(
    records: Sequence[JudgmentRecord],
    metrics: Sequence[str] | None = None,
    dimensions: Sequence[str] | None = None,
) -> CorrelationReport:
    return correlate(records, level="system", metrics=metrics, dimensions=dimensions)


def williams_compare(
    records: Sequence[JudgmentRecord],
    metric_a: str,
    metric_b: str,
    dimension: str,
    coef: str = "pearson",
    two_sided: bool = False,
) -> dict:
    """Williams test between two metric columns against one human column.

    With coef='spearman' all three columns are rank-transformed first and
    Pearson is applied to the ranks (the standard approximation for
    comparing dependent rank correlations).
    """
    rows = [
        (r.metrics[metric_a], r.metrics[metric_b], r.human[dimension])
        for r in records
        if metric_a in r.metrics and metric_b in r.metrics and dimension in r.human
    ]
    if not rows:
        raise CorrelationError("no records carry both metrics and the dimension")
    a, b, h = (list(col) for col in zip(*rows))
    if coef == "spearman":
        a, b, h = midranks(a), midranks(b), midranks(h)
    elif coef != "pearson":
        raise ValueError("coef must be 'pearson' or 'spearman'")
    r12 = pearson(a, h)
    r13 = pearson(b, h)
    r23 = pearson(a, b)
    t, p = williams_test(r12, r13, r23, len(rows), two_sided=two_sided)
    return {
        "metric_a": metric_a,
        "metric_b": metric_b,
        "dimension": dimension,
        "coef": coef,
        "r12": r12,
        "r13": r13,
        "r23": r23,
        "n": len(rows),
        "t": t,
        "p": p,
    }


# ---------------------------------------------------------------------------
# config tuning


@dataclass(frozen=True)
class TuneResult:
    config: MetricConfig
    overrides: dict
    spearman: float
    ties: int  # grid points sharing the best correlation, winner included


def tune_config(
    records: Sequence[JudgmentRecord],
    texts: dict[str, str],
    search_space: dict[str, Sequence],
    score_fn: Callable[[str, MetricConfig], float],
    dimension: str | None = None,
    base_config: MetricConfig | None = None,
) -> TuneResult:
    """Exhaustive grid search maximizing Spearman correlation with a human column.

    score_fn(text, config) must return the metric total for one text. Ties
    keep the first grid point in declaration order.
    """
    if not search_space or any(len(v) == 0 for v in search_space.values()):
        raise ValueError("empty search space")
    if dimension is None:
        dims = _available(records, "human")
        if len(dims) != 1:
            raise ValueError(
                "dimension is ambiguous; specify one of %s" % dims
            )
        dimension = dims[0]
    usable = [r for r in records if dimension in r.human]
    missing = [r.instance_id for r in usable if r.instance_id not in texts]
    if missing:
        raise ValueError("records without scoreable texts: %s" % missing[:5])
    if len(usable) < 2:
        raise CorrelationError("need at least 2 records with the dimension")

    base = base_config or MetricConfig()
    keys = list(search_space.keys())
    best: TuneResult | None = None
    ties = 0
    for combo in itertools.product(*(search_space[k] for k in keys)):
        overrides = dict(zip(keys, combo))
        config = base.override(**overrides)
        metric_vec = [score_fn(texts[r.instance_id], config) for r in usable]
        human_vec = [r.human[dimension] for r in usable]
        try:
            rho = spearman(metric_vec, human_vec)
        except CorrelationError:
            continue  # constant metric column under this config
        if best is None or rho > best.spearman:
            best = TuneResult(config=config, overrides=overrides, spearman=rho, ties=1)
            ties = 1
        elif rho == best.spearman:
            ties += 1
            best = TuneResult(
                config=best.config,
                overrides=best.overrides,
                spearman=best.spearman,
                ties=ties,
            )
    if best is None:
        raise CorrelationError("no grid point produced a defined correlation")
    return best
