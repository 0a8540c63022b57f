"""Agreement metrics between engine scores and HR ground truth.

Correlations (Pearson, and Spearman as Pearson over average ranks) are
computed on top-and-bottom percentile subsets of the HR final score; mean
absolute error is computed on the full record set. A constant series is an
error, not a zero correlation: surfacing the undefined case beats inventing
a value.

The percentile cut is nearest-rank with ties included: for percent p over n
records, k = ceil(p n / 100), and the subset is every record whose HR final
is <= the k-th smallest or >= the k-th largest. On 20 distinct scores, p=10
keeps exactly the 2 lowest and 2 highest.
"""

from __future__ import annotations

import csv
import logging
import math
from array import array
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from . import _kernels as kernels
from .errors import (
    DegenerateSeriesError,
    DomainValidationError,
    EmptyInputError,
    InsufficientDataError,
    LengthMismatchError,
    MetricsError,
)
from .models import (
    SCORE_CATEGORIES,
    JobPosition,
    ScoreVector,
    ScoringWeights,
    final_score,
)

logger = logging.getLogger(__name__)

MIN_CORRELATION_N = 3
HISTOGRAM_BINS = 10


# ------------------------------------------------------------------
# Core statistics
# ------------------------------------------------------------------

def _check_pair(x: Sequence[float], y: Sequence[float], minimum: int) -> None:
    if len(x) != len(y):
        raise LengthMismatchError(len(x), len(y))
    if len(x) == 0:
        raise EmptyInputError("series must be non-empty")
    if len(x) < minimum:
        raise InsufficientDataError(percentile=float("nan"), n=len(x), needed=minimum)
    for series in (x, y):
        for v in series:
            if not math.isfinite(float(v)):
                raise DomainValidationError(f"series contains a non-finite value: {v!r}")


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation of two equal-length series (n >= 3)."""
    _check_pair(x, y, MIN_CORRELATION_N)
    r = kernels.pearson(array("d", (float(v) for v in x)), array("d", (float(v) for v in y)))
    if math.isnan(r):
        raise DegenerateSeriesError("pearson is undefined for a constant series")
    # Guard against accumulated rounding nudging |r| past 1.
    return max(-1.0, min(1.0, r))


def average_ranks(values: Sequence[float]) -> list[float]:
    """1-based ranks; tied values share the average of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        shared = (i + j + 2) / 2
        for k in range(i, j + 1):
            ranks[order[k]] = shared
        i = j + 1
    return ranks


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Pearson correlation of the average-rank vectors."""
    _check_pair(x, y, MIN_CORRELATION_N)
    return pearson(average_ranks([float(v) for v in x]), average_ranks([float(v) for v in y]))


def mae(x: Sequence[float], y: Sequence[float]) -> float:
    """Mean absolute error between two equal-length series (n >= 1)."""
    _check_pair(x, y, minimum=1)
    return kernels.mae(array("d", (float(v) for v in x)), array("d", (float(v) for v in y)))


# ------------------------------------------------------------------
# Records and percentile subsets
# ------------------------------------------------------------------

@dataclass(frozen=True)
class EvaluationRecord:
    """One candidate's HR-labeled scores next to the engine's."""

    resume_id: str
    hr_scores: ScoreVector
    ai_scores: ScoreVector
    hr_final: float
    ai_final: float
    job: JobPosition


def make_record(
    resume_id: str,
    hr_scores: ScoreVector,
    ai_scores: ScoreVector,
    job: JobPosition,
    weights: ScoringWeights,
) -> EvaluationRecord:
    """Build a record whose finals are, by construction, consistent with
    the component scores under the given weights."""
    return EvaluationRecord(
        resume_id=resume_id,
        hr_scores=hr_scores,
        ai_scores=ai_scores,
        hr_final=final_score(hr_scores, weights, job).value,
        ai_final=final_score(ai_scores, weights, job).value,
        job=job,
    )


def percentile_subset(
    records: Sequence[EvaluationRecord], p: float
) -> list[EvaluationRecord]:
    """Records in the top or bottom p percent of HR finals, ties included.

    Nearest-rank cut: k = ceil(p n / 100); keep hr_final <= k-th smallest or
    >= k-th largest. Input order is preserved in the returned subset.
    """
    if not records:
        raise EmptyInputError("percentile_subset needs at least one record")
    if not 0 < p <= 50:
        raise MetricsError(f"percentile must be in (0, 50], got {p}")
    finals = sorted(record.hr_final for record in records)
    n = len(finals)
    k = math.ceil(p * n / 100.0)
    low_cut = finals[k - 1]
    high_cut = finals[n - k]
    return [r for r in records if r.hr_final <= low_cut or r.hr_final >= high_cut]


# ------------------------------------------------------------------
# Run-level report
# ------------------------------------------------------------------

@dataclass(frozen=True)
class CategoryMetrics:
    """Full-set agreement for one score category; None when undefined."""

    pc: float | None
    sc: float | None
    mae: float


@dataclass(frozen=True)
class Histogram:
    """Unit-width bins over [0, 10]; a 10.0 lands in the last bin."""

    bin_edges: tuple[float, ...]
    hr_counts: tuple[int, ...]
    ai_counts: tuple[int, ...]


@dataclass(frozen=True)
class MetricsReport:
    """Everything one evaluation run measured."""

    n_total: int
    percentiles: tuple[float, ...]
    pc: dict[float, float | None]
    sc: dict[float, float | None]
    n_subset: dict[float, int]
    mae: float
    per_category: dict[str, CategoryMetrics]
    mean_hr: float
    mean_ai: float
    histogram: Histogram
    issues: tuple[str, ...] = ()


def _bin_counts(values: Iterable[float]) -> tuple[int, ...]:
    counts = [0] * HISTOGRAM_BINS
    for v in values:
        if not 0.0 <= v <= 10.0:
            raise DomainValidationError(f"final score {v} outside [0, 10]")
        counts[min(int(math.floor(v)), HISTOGRAM_BINS - 1)] += 1
    return tuple(counts)


def _correlation_pair(
    x: Sequence[float], y: Sequence[float]
) -> tuple[float | None, float | None, str | None]:
    """(pearson, spearman, problem) with None values when undefined."""
    try:
        return pearson(x, y), spearman(x, y), None
    except DegenerateSeriesError as exc:
        return None, None, str(exc)


def evaluate_run(
    records: Sequence[EvaluationRecord],
    percentiles: Sequence[float],
    weights: ScoringWeights | None = None,
) -> MetricsReport:
    """Measure engine-vs-HR agreement per the percentile protocol.

    Per-percentile problems (subset below 3 records, constant series) are
    reported in ``issues`` while the remaining percentiles still compute.
    When ``weights`` is given, each record's finals are checked against its
    component scores first.
    """
    if not records:
        raise EmptyInputError("evaluate_run needs at least one record")
    if not percentiles:
        raise MetricsError("evaluate_run needs at least one percentile")
    if weights is not None:
        for record in records:
            for label, scores, final in (
                ("hr", record.hr_scores, record.hr_final),
                ("ai", record.ai_scores, record.ai_final),
            ):
                expected = final_score(scores, weights, record.job).value
                if abs(expected - final) > 1e-9:
                    raise DomainValidationError(
                        f"record {record.resume_id!r}: {label}_final {final} does not "
                        f"match its scores under the configured weights ({expected})"
                    )

    hr_finals = [r.hr_final for r in records]
    ai_finals = [r.ai_final for r in records]
    issues: list[str] = []

    pc: dict[float, float | None] = {}
    sc: dict[float, float | None] = {}
    n_subset: dict[float, int] = {}
    for p in percentiles:
        subset = percentile_subset(records, p)
        n_subset[p] = len(subset)
        if len(subset) < MIN_CORRELATION_N:
            pc[p] = None
            sc[p] = None
            issues.append(
                f"percentile {_p_label(p)}: subset has {len(subset)} record(s), "
                f"needs >= {MIN_CORRELATION_N}"
            )
            continue
        pc_p, sc_p, problem = _correlation_pair(
            [r.hr_final for r in subset], [r.ai_final for r in subset]
        )
        pc[p] = pc_p
        sc[p] = sc_p
        if problem:
            issues.append(f"percentile {_p_label(p)}: {problem}")

    per_category: dict[str, CategoryMetrics] = {}
    for category in SCORE_CATEGORIES:
        hr_cat = [getattr(r.hr_scores, category) for r in records]
        ai_cat = [getattr(r.ai_scores, category) for r in records]
        cat_mae = mae(hr_cat, ai_cat)
        if len(records) < MIN_CORRELATION_N:
            per_category[category] = CategoryMetrics(pc=None, sc=None, mae=cat_mae)
            issues.append(f"category {category}: too few records for correlation")
            continue
        pc_c, sc_c, problem = _correlation_pair(hr_cat, ai_cat)
        per_category[category] = CategoryMetrics(pc=pc_c, sc=sc_c, mae=cat_mae)
        if problem:
            issues.append(f"category {category}: {problem}")

    return MetricsReport(
        n_total=len(records),
        percentiles=tuple(percentiles),
        pc=pc,
        sc=sc,
        n_subset=n_subset,
        mae=mae(hr_finals, ai_finals),
        per_category=per_category,
        mean_hr=math.fsum(hr_finals) / len(records),
        mean_ai=math.fsum(ai_finals) / len(records),
        histogram=Histogram(
            bin_edges=tuple(float(i) for i in range(HISTOGRAM_BINS + 1)),
            hr_counts=_bin_counts(hr_finals),
            ai_counts=_bin_counts(ai_finals),
        ),
        issues=tuple(issues),
    )


# ------------------------------------------------------------------
# Emission: JSON dict, text table, CSV series
# ------------------------------------------------------------------

def _p_label(p: float) -> str:
    return str(int(p)) if float(p).is_integer() else str(p)


def report_to_dict(report: MetricsReport) -> dict:
    """JSON-ready form of a report; percentile keys become strings."""
    return {
        "n_total": report.n_total,
        "percentiles": [_p_label(p) for p in report.percentiles],
        "pc": {_p_label(p): report.pc[p] for p in report.percentiles},
        "sc": {_p_label(p): report.sc[p] for p in report.percentiles},
        "n_subset": {_p_label(p): report.n_subset[p] for p in report.percentiles},
        "mae": report.mae,
        "per_category": {
            category: {"pc": m.pc, "sc": m.sc, "mae": m.mae}
            for category, m in report.per_category.items()
        },
        "mean_hr": report.mean_hr,
        "mean_ai": report.mean_ai,
        "histogram": {
            "bin_edges": list(report.histogram.bin_edges),
            "hr_counts": list(report.histogram.hr_counts),
            "ai_counts": list(report.histogram.ai_counts),
        },
        "issues": list(report.issues),
    }


def _p_value(label: str) -> float:
    value = float(label)
    return int(value) if value.is_integer() else value


def report_from_dict(data: dict) -> MetricsReport:
    """Inverse of report_to_dict, for re-rendering a saved report."""
    percentiles = tuple(_p_value(p) for p in data["percentiles"])
    labels = {p: _p_label(p) for p in percentiles}
    histogram = data["histogram"]
    return MetricsReport(
        n_total=int(data["n_total"]),
        percentiles=percentiles,
        pc={p: data["pc"][labels[p]] for p in percentiles},
        sc={p: data["sc"][labels[p]] for p in percentiles},
        n_subset={p: int(data["n_subset"][labels[p]]) for p in percentiles},
        mae=float(data["mae"]),
        per_category={
            category: CategoryMetrics(pc=m["pc"], sc=m["sc"], mae=float(m["mae"]))
            for category, m in data["per_category"].items()
        },
        mean_hr=float(data["mean_hr"]),
        mean_ai=float(data["mean_ai"]),
        histogram=Histogram(
            bin_edges=tuple(float(e) for e in histogram["bin_edges"]),
            hr_counts=tuple(int(c) for c in histogram["hr_counts"]),
            ai_counts=tuple(int(c) for c in histogram["ai_counts"]),
        ),
        issues=tuple(data.get("issues", ())),
    )


def table_columns(report: MetricsReport) -> list[str]:
    """Column labels, widest percentile first, MAE last: for percentiles
    {10, 15, 20} exactly PC_20 SC_20 PC_15 SC_15 PC_10 SC_10 MAE."""
    columns: list[str] = []
    for p in sorted(report.percentiles, reverse=True):
        columns.append(f"PC_{_p_label(p)}")
        columns.append(f"SC_{_p_label(p)}")
    columns.append("MAE")
    return columns


def render_table(report: MetricsReport, label: str = "engine") -> str:
    """Plain-text agreement table, one row per run."""
    columns = table_columns(report)
    values: list[str] = []
    for p in sorted(report.percentiles, reverse=True):
        for cell in (report.pc[p], report.sc[p]):
            values.append("n/a" if cell is None else f"{cell:.2f}")
    values.append(f"{report.mae:.2f}")
    header = ["run"] + columns
    row = [label] + values
    widths = [max(len(h), len(v)) for h, v in zip(header, row)]
    lines = [
        "  ".join(h.rjust(w) for h, w in zip(header, widths)),
        "  ".join("-" * w for w in widths),
        "  ".join(v.rjust(w) for v, w in zip(row, widths)),
    ]
    return "\n".join(lines) + "\n"


def write_histogram_csv(report: MetricsReport, path: str | Path) -> None:
    """Per-bin counts of HR and engine finals, for distribution plots."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_low", "bin_high", "hr_count", "ai_count"])
        edges = report.histogram.bin_edges
        for i in range(len(edges) - 1):
            writer.writerow([
                edges[i], edges[i + 1],
                report.histogram.hr_counts[i], report.histogram.ai_counts[i],
            ])


def write_scatter_csv(records: Sequence[EvaluationRecord], path: str | Path) -> None:
    """(hr_final, ai_final) pairs per resume, for agreement scatter plots."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["resume_id", "hr_final", "ai_final"])
        for record in records:
            writer.writerow([record.resume_id, record.hr_final, record.ai_final])


def write_category_scatter_csv(records: Sequence[EvaluationRecord], path: str | Path) -> None:
    """Per-category (hr, ai) pairs per resume, for the category comparison."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["resume_id", "category", "hr", "ai"])
        for record in records:
            for category in SCORE_CATEGORIES:
                writer.writerow([
                    record.resume_id,
                    category,
                    getattr(record.hr_scores, category),
                    getattr(record.ai_scores, category),
                ])
