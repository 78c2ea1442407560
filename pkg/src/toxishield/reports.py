"""Score-file I/O and report rendering.

Score files are JSON lines, one object per detoxified pair:
``{id, orig_text, detox_text, orig_p, detox_p, fluent, sim}``.
Reports render either as JSON or as aligned plain-text tables.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .metrics import (
    MetricsReport,
    PairScore,
    ReductionMode,
    TstReport,
    detox_reduction,
    j_score,
)

SCORE_FIELDS = ("id", "orig_text", "detox_text", "orig_p", "detox_p", "fluent", "sim")


@dataclass(frozen=True)
class ScoreRow:
    """One scored pair as stored in a score file."""

    id: str
    orig_text: str
    detox_text: str
    orig_p: float
    detox_p: float
    fluent: float
    sim: float


def read_score_file(path: "Path | str") -> list[ScoreRow]:
    rows: list[ScoreRow] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            missing = [f for f in SCORE_FIELDS if f not in obj]
            if missing:
                raise ValueError(f"{path}:{lineno}: missing fields {missing}")
            rows.append(
                ScoreRow(
                    id=str(obj["id"]),
                    orig_text=str(obj["orig_text"]),
                    detox_text=str(obj["detox_text"]),
                    orig_p=float(obj["orig_p"]),
                    detox_p=float(obj["detox_p"]),
                    fluent=float(obj["fluent"]),
                    sim=float(obj["sim"]),
                )
            )
    return rows


def write_score_file(rows: Iterable[ScoreRow], path: "Path | str") -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(dataclasses.asdict(row), ensure_ascii=False) + "\n")


def tst_report_from_rows(
    rows: Sequence[ScoreRow],
    mode: ReductionMode = ReductionMode.NET_REDUCTION,
    threshold: float = 0.5,
) -> TstReport:
    """Assemble the four-number report from precomputed per-pair scores."""
    if not rows:
        raise ValueError("score file contains no rows")
    detox = detox_reduction(
        [r.orig_p for r in rows],
        [r.detox_p for r in rows],
        mode=mode,
        threshold=threshold,
    )
    fl = 100.0 * sum(r.fluent for r in rows) / len(rows)
    preserve = 100.0 * sum(min(max(r.sim, 0.0), 1.0) for r in rows) / len(rows)
    return TstReport(
        detox=detox,
        fluency=fl,
        preserve=preserve,
        j_score=j_score(detox, fl, preserve),
        pairs=tuple(
            PairScore(id=r.id, orig_p=r.orig_p, detox_p=r.detox_p, fluent=r.fluent, sim=r.sim)
            for r in rows
        ),
    )


def _table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    def fmt(row: Sequence[str]) -> str:
        return " | ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip()
    rule = "-+-".join("-" * w for w in widths)
    lines = [fmt(headers), rule]
    lines.extend(fmt(row) for row in rows)
    return "\n".join(lines)


def render_tst_table(reports: Mapping[str, TstReport]) -> str:
    """Model-per-row table with DETOX / FL / PRESERVE / J-Score columns."""
    headers = ["Model", "DETOX (%)", "FL (%)", "PRESERVE (%)", "J-Score (%)"]
    rows = [
        [name, f"{r.detox:.2f}", f"{r.fluency:.2f}", f"{r.preserve:.2f}", f"{r.j_score:.2f}"]
        for name, r in reports.items()
    ]
    return _table(headers, rows)


def render_binary_table(reports: Mapping[str, MetricsReport]) -> str:
    """Model-per-row table with P0/R0/F1_0, P1/R1/F1_1 and accuracy."""
    headers = ["Model", "P0", "R0", "F1_0", "P1", "R1", "F1_1", "Accuracy"]
    rows = []
    for name, report in reports.items():
        neg = report.per_class["non_toxic"]
        pos = report.per_class["toxic"]
        rows.append(
            [
                name,
                f"{neg.precision:.2f}",
                f"{neg.recall:.2f}",
                f"{neg.f1:.2f}",
                f"{pos.precision:.2f}",
                f"{pos.recall:.2f}",
                f"{pos.f1:.2f}",
                f"{report.accuracy:.2f}",
            ]
        )
    return _table(headers, rows)


def render_multilabel_table(report: MetricsReport) -> str:
    """Per-class table plus the EM / avg / macro summary block."""
    headers = ["Class", "P", "R", "F1", "MCC", "Support"]
    rows = [
        [name, f"{m.precision:.2f}", f"{m.recall:.2f}", f"{m.f1:.2f}", f"{m.mcc:.2f}", str(m.support)]
        for name, m in report.per_class.items()
    ]
    per_class = _table(headers, rows)
    summary_headers = ["", "EM", "P", "R", "F1", "MCC"]
    em = f"{report.em:.2f}" if report.em is not None else "-"
    summary_rows = [
        ["Avg", em, f"{report.avg.precision:.2f}", f"{report.avg.recall:.2f}",
         f"{report.avg.f1:.2f}", f"{report.avg.mcc:.2f}"],
        ["Macro", "", f"{report.macro.precision:.2f}", f"{report.macro.recall:.2f}",
         f"{report.macro.f1:.2f}", f"{report.macro.mcc:.2f}"],
    ]
    return per_class + "\n\n" + _table(summary_headers, summary_rows)


def report_to_json(report) -> str:
    """Serialize any report dataclass (nested) to pretty JSON."""

    def default(obj):
        if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
            return dataclasses.asdict(obj)
        if isinstance(obj, frozenset):
            return sorted(obj)
        if isinstance(obj, Mapping):
            return dict(obj)
        raise TypeError(f"not JSON-serializable: {type(obj)}")

    return json.dumps(report, default=default, indent=2, ensure_ascii=False)
