"""Experiment report files.

CSV: columns ``row,rep,accuracy,auc,train_seconds,selected_gamma,pi_hat``.
One ``rep`` row per replication in rep order, then a ``mean`` and a
``stderr`` row. Empty cells mean "not applicable".

JSON: ``{"plan": {...}, "per_rep": [...], "summary": {metric: {mean, stderr}}}``.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path
from typing import Any, TextIO

import pandas as pd

from pywmmd.eval.experiment import ExperimentPlan, ExperimentReport
from pywmmd.persistence.atomic import atomic_text_output

REPORT_COLUMNS: tuple[str, ...] = (
    "row",
    "rep",
    "accuracy",
    "auc",
    "train_seconds",
    "selected_gamma",
    "pi_hat",
)
_VALUE_COLUMNS = REPORT_COLUMNS[2:]


def plan_to_dict(plan: ExperimentPlan) -> dict[str, Any]:
    return {
        "method": plan.method.value,
        "source": plan.source_name,
        "n_p": plan.n_p,
        "n_u": plan.n_u,
        "n_te": plan.n_te,
        "pi_plus": plan.pi_plus,
        "prior_known": plan.prior_known,
        "prior_free_selection": plan.prior_free_selection,
        "family": plan.family.value,
        "reps": plan.reps,
        "seed": plan.seed,
    }


def report_frame(report: ExperimentReport) -> pd.DataFrame:
    rows: list[dict[str, Any]] = [{"row": "rep", **asdict(r)} for r in report.per_rep]
    for stat in ("mean", "stderr"):
        row: dict[str, Any] = {"row": stat, "rep": None}
        for col in _VALUE_COLUMNS:
            summary = report.summary.get(col)
            row[col] = getattr(summary, stat) if summary is not None else None
        rows.append(row)
    frame = pd.DataFrame(rows, columns=list(REPORT_COLUMNS))
    frame["rep"] = frame["rep"].astype("Int64")
    return frame


def write_report_csv(report: ExperimentReport, stream: TextIO) -> None:
    report_frame(report).to_csv(stream, index=False, lineterminator="\n")


def report_to_dict(report: ExperimentReport) -> dict[str, Any]:
    return {
        "plan": plan_to_dict(report.plan),
        "per_rep": [asdict(r) for r in report.per_rep],
        "summary": {k: asdict(v) for k, v in report.summary.items()},
    }


def save_report(report: ExperimentReport, path: Path) -> None:
    """CSV or JSON by file suffix."""
    with atomic_text_output(path) as f:
        if Path(path).suffix.lower() == ".json":
            json.dump(report_to_dict(report), f, indent=1)
            f.write("\n")
        else:
            write_report_csv(report, f)
