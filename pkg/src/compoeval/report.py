"""Aggregation of evaluation results into tables and SVG charts.

Aggregation is a count-weighted mean over any combination of grouping
keys and is permutation-invariant over the input.  The fixed-shape
emitters pin the row/column schemas of the summary tables; plots are
dependency-free SVG.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError
from .metrics import (
    METRIC_CONSISTENCY,
    METRIC_OVERGEN,
    METRIC_SYNONYM,
    EvalResult,
    OvergenCurve,
)
from .suites import (
    COND_NP,
    COND_S1PRIME,
    COND_S3,
    COND_VP,
    NATURAL,
    SEMI_NATURAL,
    SYNTHETIC,
)

GROUP_KEYS = (
    "condition",
    "data_type",
    "training_size",
    "checkpoint",
    "template_id",
    "unit",
    "metric",
    "flag",
)

DEFAULT_SIZES = ("small", "medium", "full")

FORMATS = ("tsv", "jsonl", "markdown")


@dataclass(frozen=True)
class AggregateRow:
    key: tuple
    value: float
    count: int


@dataclass(frozen=True)
class AggregateTable:
    group_by: tuple
    rows: tuple


def aggregate(results: list[EvalResult], group_by) -> AggregateTable:
    """Mean verdict and count per group-key combination."""
    if not results:
        raise ValidationError("cannot aggregate an empty result list")
    group_by = tuple(group_by)
    for key in group_by:
        if key not in GROUP_KEYS:
            raise ValidationError(f"unknown grouping key {key!r}")
    buckets: dict[tuple, list[int]] = {}
    for r in results:
        key = tuple(getattr(r, k) for k in group_by)
        bucket = buckets.setdefault(key, [0, 0])
        bucket[0] += 1 if r.verdict else 0
        bucket[1] += 1
    rows = [
        AggregateRow(key, hits / total, total)
        for key, (hits, total) in buckets.items()
    ]
    rows.sort(key=lambda row: tuple(str(v) for v in row.key))
    return AggregateTable(group_by, tuple(rows))


def template_means(results, group_by=("data_type", "condition")) -> AggregateTable:
    """Per-template scores averaged with equal template weight.

    Matches the convention of reporting templates individually plus their
    unweighted mean.
    """
    per_template = aggregate(results, tuple(group_by) + ("template_id",))
    outer: dict[tuple, list] = {}
    for row in per_template.rows:
        outer.setdefault(row.key[:-1], []).append(row)
    rows = []
    for key, bucket in outer.items():
        mean = sum(r.value for r in bucket) / len(bucket)
        rows.append(AggregateRow(key, mean, sum(r.count for r in bucket)))
    rows.sort(key=lambda row: tuple(str(v) for v in row.key))
    return AggregateTable(tuple(group_by), tuple(rows))


def _cell(value) -> str:
    return "" if value is None else str(value)


def emit(table: AggregateTable, fmt: str, path) -> None:
    """Write an aggregate table losslessly as tsv, jsonl or markdown."""
    if fmt not in FORMATS:
        raise ValidationError(f"unknown format {fmt!r}; choose from {FORMATS}")
    header = list(table.group_by) + ["value", "count"]
    lines = []
    if fmt == "tsv":
        lines.append("\t".join(header))
        for row in table.rows:
            cells = [_cell(v) for v in row.key] + [repr(row.value), str(row.count)]
            lines.append("\t".join(cells))
    elif fmt == "jsonl":
        import json

        for row in table.rows:
            d = dict(zip(table.group_by, row.key))
            d["value"] = row.value
            d["count"] = row.count
            lines.append(json.dumps(d, ensure_ascii=False))
    else:
        lines.append("| " + " | ".join(header) + " |")
        lines.append("|" + "|".join(" --- " for _ in header) + "|")
        for row in table.rows:
            cells = [_cell(v) for v in row.key] + [f"{row.value:.3f}", str(row.count)]
            lines.append("| " + " | ".join(cells) + " |")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_table(path) -> AggregateTable:
    """Parse a TSV written by emit(); inverse up to key stringification."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValidationError(f"empty table file {path}")
    header = lines[0].split("\t")
    if header[-2:] != ["value", "count"]:
        raise ValidationError("not an aggregate table: missing value/count columns")
    group_by = tuple(header[:-2])
    rows = []
    for line in lines[1:]:
        if not line:
            continue
        cells = line.split("\t")
        key = tuple(None if c == "" else c for c in cells[:-2])
        rows.append(AggregateRow(key, float(cells[-2]), int(cells[-1])))
    return AggregateTable(group_by, tuple(rows))


# --- paper-shaped tables ----------------------------------------------------


def _mean(results) -> float | None:
    if not results:
        return None
    return sum(r.verdict for r in results) / len(results)


def _fmt(value) -> str:
    return "" if value is None else f"{value:.3f}"


def systematicity_table(results, sizes=DEFAULT_SIZES) -> str:
    """Consistency per (data, condition), one column per training size."""
    rows_spec = [
        (SYNTHETIC, COND_NP),
        (SYNTHETIC, COND_VP),
        (SEMI_NATURAL, COND_NP),
        (SYNTHETIC, COND_S1PRIME),
        (SYNTHETIC, COND_S3),
        (SEMI_NATURAL, COND_S1PRIME),
        (SEMI_NATURAL, COND_S3),
        (NATURAL, COND_S1PRIME),
        (NATURAL, COND_S3),
    ]
    pool = [r for r in results if r.metric == METRIC_CONSISTENCY]
    lines = ["data\tcondition\t" + "\t".join(sizes)]
    for data_type, condition in rows_spec:
        cells = []
        for size in sizes:
            cells.append(
                _fmt(
                    _mean(
                        [
                            r
                            for r in pool
                            if r.data_type == data_type
                            and r.condition == condition
                            and r.training_size == size
                        ]
                    )
                )
            )
        lines.append(f"{data_type}\t{condition}\t" + "\t".join(cells))
    return "\n".join(lines) + "\n"


def substitutivity_table(results, sizes=DEFAULT_SIZES) -> str:
    """Full and synonym-only consistency per data type and training size."""
    rows_spec = [
        (SYNTHETIC, METRIC_CONSISTENCY),
        (SYNTHETIC, METRIC_SYNONYM),
        (SEMI_NATURAL, METRIC_CONSISTENCY),
        (SEMI_NATURAL, METRIC_SYNONYM),
        (NATURAL, METRIC_CONSISTENCY),
        (NATURAL, METRIC_SYNONYM),
    ]
    lines = ["data\tmetric\t" + "\t".join(sizes)]
    for data_type, metric in rows_spec:
        cells = []
        for size in sizes:
            cells.append(
                _fmt(
                    _mean(
                        [
                            r
                            for r in results
                            if r.metric == metric
                            and r.data_type == data_type
                            and r.training_size == size
                            and r.condition == "synonym"
                        ]
                    )
                )
            )
        lines.append(f"{data_type}\t{metric}\t" + "\t".join(cells))
    return "\n".join(lines) + "\n"


def overgeneralisation_table(
    results,
    idiom_order,
    sizes=DEFAULT_SIZES,
    data_types=(SYNTHETIC, SEMI_NATURAL, NATURAL),
) -> str:
    """Maximum overgeneralisation over training, one column per idiom."""
    pool = [r for r in results if r.metric == METRIC_OVERGEN]
    lines = ["data\tmodel\t" + "\t".join(idiom_order)]
    for data_type in data_types:
        for size in sizes:
            cells = []
            for idiom in idiom_order:
                matching = [
                    r
                    for r in pool
                    if r.data_type == data_type
                    and r.training_size == size
                    and r.unit == idiom
                ]
                if not matching:
                    cells.append("")
                    continue
                by_checkpoint: dict[str, list] = {}
                for r in matching:
                    by_checkpoint.setdefault(r.checkpoint, []).append(r)
                peak = max(_mean(bucket) for bucket in by_checkpoint.values())
                cells.append(_fmt(peak))
            lines.append(f"{data_type}\t{size}\t" + "\t".join(cells))
    return "\n".join(lines) + "\n"


# --- SVG charts -------------------------------------------------------------

_COLORS = (
    "#4477aa",
    "#ee6677",
    "#228833",
    "#ccbb44",
    "#66ccee",
    "#aa3377",
    "#bbbbbb",
)


def _esc(text: str) -> str:
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def plot_curves(
    curves: list[OvergenCurve],
    title: str = "",
    width: int = 720,
    height: int = 420,
) -> str:
    """SVG line chart: one polyline per curve plus their pointwise mean.

    The x axis carries the checkpoint labels, the y axis the rate in
    [0, 1].
    """
    if not curves:
        raise ValidationError("plot_curves needs at least one curve")
    checkpoints = curves[0].checkpoints
    for c in curves:
        if c.checkpoints != checkpoints:
            raise ValidationError("curves must share one checkpoint schedule")
    margin_left, margin_right, margin_top, margin_bottom = 60, 180, 40, 60
    plot_w = width - margin_left - margin_right
    plot_h = height - margin_top - margin_bottom

    def x_px(i):
        if len(checkpoints) == 1:
            return margin_left + plot_w / 2
        return margin_left + i * plot_w / (len(checkpoints) - 1)

    def y_px(rate):
        return margin_top + (1.0 - rate) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="24" text-anchor="middle" '
            f'font-family="sans-serif" font-size="16">{_esc(title)}</text>'
        )
    # axes and ticks
    x0, y0 = margin_left, margin_top + plot_h
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0 + plot_w}" y2="{y0}" stroke="black"/>'
    )
    parts.append(
        f'<line x1="{x0}" y1="{margin_top}" x2="{x0}" y2="{y0}" stroke="black"/>'
    )
    for i in range(6):
        rate = i / 5
        y = y_px(rate)
        parts.append(
            f'<line x1="{x0 - 4}" y1="{y:.1f}" x2="{x0}" y2="{y:.1f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x0 - 8}" y="{y + 4:.1f}" text-anchor="end" '
            f'font-family="sans-serif" font-size="11">{rate:.1f}</text>'
        )
    for i, label in enumerate(checkpoints):
        x = x_px(i)
        parts.append(
            f'<line x1="{x:.1f}" y1="{y0}" x2="{x:.1f}" y2="{y0 + 4}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x:.1f}" y="{y0 + 18}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="11">{_esc(label)}</text>'
        )
    parts.append(
        f'<text x="{x0 + plot_w / 2:.1f}" y="{height - 14}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13">checkpoint</text>'
    )
    parts.append(
        f'<text x="16" y="{margin_top + plot_h / 2:.1f}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="13" '
        f'transform="rotate(-90 16 {margin_top + plot_h / 2:.1f})">rate</text>'
    )

    def polyline(rates, color, stroke_width, dash=None):
        points = " ".join(
            f"{x_px(i):.2f},{y_px(r):.2f}" for i, r in enumerate(rates)
        )
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        return (
            f'<polyline fill="none" stroke="{color}" '
            f'stroke-width="{stroke_width}"{dash_attr} points="{points}"/>'
        )

    legend_x = margin_left + plot_w + 16
    legend_y = margin_top + 10
    for idx, curve in enumerate(curves):
        color = _COLORS[idx % len(_COLORS)]
        parts.append(polyline(curve.rates, color, 1.5))
        ly = legend_y + idx * 18
        parts.append(
            f'<line x1="{legend_x}" y1="{ly}" x2="{legend_x + 18}" y2="{ly}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{legend_x + 24}" y="{ly + 4}" font-family="sans-serif" '
            f'font-size="11">{_esc(curve.idiom)}</text>'
        )
    mean_rates = [
        math.fsum(c.rates[i] for c in curves) / len(curves)
        for i in range(len(checkpoints))
    ]
    parts.append(polyline(mean_rates, "#000000", 2.5, dash="6 3"))
    ly = legend_y + len(curves) * 18
    parts.append(
        f'<line x1="{legend_x}" y1="{ly}" x2="{legend_x + 18}" y2="{ly}" '
        f'stroke="#000000" stroke-width="2.5" stroke-dasharray="6 3"/>'
    )
    parts.append(
        f'<text x="{legend_x + 24}" y="{ly + 4}" font-family="sans-serif" '
        f'font-size="11">mean</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts)
