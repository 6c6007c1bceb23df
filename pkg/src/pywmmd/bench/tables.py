"""Desk-scale reproduction recipes, emitted as plot-ready long-format tables.

Sweep CSV columns: ``axis_value,method,metric,mean,stderr`` plus
``bayes_accuracy`` for Gaussian plans. Timing CSV columns:
``method,mean_seconds,stderr_seconds,ratio``. Decision-surface CSV columns:
``kind,x1,x2,log_score,prediction,label``.
"""

from __future__ import annotations

import dataclasses
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from itertools import product
from typing import NamedTuple, TextIO

import numpy as np
import pandas as pd
import structlog

from pywmmd.core.model_select import SelectionConfig, grid_search
from pywmmd.data.synthetic import SyntheticKind, synthetic_pu
from pywmmd.domain.types import LabeledDataset, Method, RngStream, check_prior
from pywmmd.errors import InvalidInputError
from pywmmd.eval.experiment import (
    LARGE_PLAN_REPS,
    METRICS,
    SMALL_PLAN_REPS,
    ExperimentPlan,
    run_experiment,
)
from pywmmd.eval.metrics import bayes_accuracy_gaussian
from pywmmd.infra.clock import Clock

logger = structlog.get_logger(__name__)

N_U_GRID: tuple[int, ...] = tuple(range(40, 501, 20))
PI_GRID: tuple[float, ...] = tuple(round(0.05 * k, 2) for k in range(1, 20))
SWEEP_COLUMNS: tuple[str, ...] = ("axis_value", "method", "metric", "mean", "stderr")
TIMING_COLUMNS: tuple[str, ...] = ("method", "mean_seconds", "stderr_seconds", "ratio")


class SweepAxis(str, Enum):
    N_U = "n_u"
    PI_PLUS = "pi_plus"


@dataclass(frozen=True, slots=True, kw_only=True)
class SweepSpec:
    """A grid over one plan field; ``fixed`` carries every other field.

    ``fixed.method`` is overridden per swept method.
    """

    axis: SweepAxis
    grid: tuple[float, ...]
    fixed: ExperimentPlan
    workers: int = 1

    def __post_init__(self) -> None:
        axis = SweepAxis(self.axis)
        object.__setattr__(self, "axis", axis)
        grid = tuple(self.grid)
        if not grid:
            raise InvalidInputError("sweep grid is empty")
        if any(b <= a for a, b in zip(grid, grid[1:], strict=False)):
            raise InvalidInputError("sweep grid must be strictly increasing")
        if axis is SweepAxis.N_U:
            if any(int(v) != v or v < 1 for v in grid):
                raise InvalidInputError("n_u grid values must be positive integers")
            grid = tuple(int(v) for v in grid)
        else:
            grid = tuple(check_prior(v, "pi_plus grid value") for v in grid)
        object.__setattr__(self, "grid", grid)
        if self.workers < 1:
            raise InvalidInputError("workers must be >= 1")

    def plan_at(self, value: float, method: Method) -> ExperimentPlan:
        if self.axis is SweepAxis.N_U:
            return dataclasses.replace(self.fixed, method=method, n_u=int(value))
        return dataclasses.replace(self.fixed, method=method, pi_plus=float(value))


def sweep(
    spec: SweepSpec, methods: Sequence[Method | str], clock: Clock | None = None
) -> pd.DataFrame:
    """One experiment per (grid point, method); rows sorted by (axis_value, method, metric)."""
    if not methods:
        raise InvalidInputError("sweep needs at least one method")
    cells = list(product(spec.grid, [Method(m) for m in methods]))

    def run(cell: tuple[float, Method]) -> list[dict[str, object]]:
        value, method = cell
        plan = spec.plan_at(value, method)
        report = run_experiment(plan, clock)
        rows: list[dict[str, object]] = []
        for metric in METRICS:
            summary = report.summary[metric]
            row: dict[str, object] = {
                "axis_value": value,
                "method": method.value,
                "metric": metric,
                "mean": summary.mean,
                "stderr": summary.stderr,
            }
            if plan.synthetic is SyntheticKind.GAUSSIAN:
                assert plan.pi_plus is not None
                row["bayes_accuracy"] = bayes_accuracy_gaussian(plan.pi_plus)
            rows.append(row)
        return rows

    if spec.workers > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            chunks = list(pool.map(run, cells))
    else:
        chunks = [run(c) for c in cells]

    columns = list(SWEEP_COLUMNS)
    if spec.fixed.synthetic is SyntheticKind.GAUSSIAN:
        columns.append("bayes_accuracy")
    frame = pd.DataFrame([row for chunk in chunks for row in chunk], columns=columns)
    frame = frame.sort_values(["axis_value", "method", "metric"], kind="stable")
    logger.info("Sweep finished", axis=spec.axis.value, points=len(spec.grid), rows=len(frame))
    return frame.reset_index(drop=True)


def write_table_csv(frame: pd.DataFrame, stream: TextIO) -> None:
    frame.to_csv(stream, index=False, lineterminator="\n")


class MakePuArgs(NamedTuple):
    n_p: int
    n_u: int
    n_te: int
    pi_plus: float


class DatasetRow(NamedTuple):
    name: str
    dim: int
    n_samples: int
    n_p: int
    n_u: int
    n_te: int
    pi_plus: float
    large: bool


DATASET_PROTOCOLS: dict[str, DatasetRow] = {
    row.name: row
    for row in (
        DatasetRow("heart_scale", 12, 122, 10, 60, 60, 0.62, False),
        DatasetRow("sonar_scale", 60, 207, 10, 100, 100, 0.47, False),
        DatasetRow("australian_scale", 12, 449, 20, 220, 220, 0.51, False),
        DatasetRow("australian_scale2", 12, 449, 10, 130, 130, 0.15, False),
        DatasetRow("breast-cancer_scale", 10, 683, 20, 340, 340, 0.35, False),
        DatasetRow("breast-cancer_scale2", 10, 683, 40, 340, 340, 0.65, False),
        DatasetRow("diabetes_scale", 8, 759, 50, 380, 370, 0.65, False),
        DatasetRow("skin_nonskin", 3, 245_057, 1_000, 100_000, 100_000, 0.79, True),
        DatasetRow("skin_nonskin2", 3, 245_057, 1_000, 100_000, 100_000, 0.21, True),
        DatasetRow("epsilon_normalized", 2_000, 500_000, 1_000, 400_000, 100_000, 0.50, True),
        DatasetRow("HIGGS", 26, 8_786_441, 1_000, 1_000_000, 100_000, 0.50, True),
    )
}


def table2_protocol(dataset_name: str, cap: int | None = None) -> MakePuArgs:
    """Resampling sizes for a named dataset; ``cap`` bounds n_u and n_te."""
    try:
        row = DATASET_PROTOCOLS[dataset_name]
    except KeyError:
        raise InvalidInputError(
            f"unknown dataset {dataset_name!r}; known: {', '.join(DATASET_PROTOCOLS)}"
        ) from None
    n_u, n_te = row.n_u, row.n_te
    if cap is not None:
        if cap < 1:
            raise InvalidInputError("cap must be >= 1")
        n_u, n_te = min(n_u, cap), min(n_te, cap)
    return MakePuArgs(row.n_p, n_u, n_te, row.pi_plus)


def dataset_plan(
    dataset: LabeledDataset,
    dataset_name: str,
    method: Method | str,
    *,
    prior_known: bool = True,
    prior_free_selection: bool = False,
    reps: int | None = None,
    seed: int = 0,
    cap: int | None = None,
    workers: int = 1,
) -> ExperimentPlan:
    """Resampling experiment on a locally supplied LIBSVM dataset."""
    args = table2_protocol(dataset_name, cap)
    if reps is None:
        reps = LARGE_PLAN_REPS if DATASET_PROTOCOLS[dataset_name].large else SMALL_PLAN_REPS
    return ExperimentPlan(
        method=Method(method),
        n_p=args.n_p,
        n_u=args.n_u,
        n_te=args.n_te,
        pi_plus=args.pi_plus,
        prior_known=prior_known,
        prior_free_selection=prior_free_selection,
        dataset=dataset,
        reps=reps,
        seed=seed,
        workers=workers,
    )


def timing_plans(
    methods: Sequence[Method | str], reps: int = SMALL_PLAN_REPS, seed: int = 0
) -> list[ExperimentPlan]:
    """Training-time comparison: Gaussian task, n_p=100, n_u=400, pi=0.5."""
    return [
        ExperimentPlan(
            method=Method(m),
            n_p=100,
            n_u=400,
            pi_plus=0.5,
            synthetic=SyntheticKind.GAUSSIAN,
            reps=reps,
            seed=seed,
        )
        for m in methods
    ]


def timing_table(
    methods: Sequence[Method | str],
    reps: int = SMALL_PLAN_REPS,
    seed: int = 0,
    clock: Clock | None = None,
) -> pd.DataFrame:
    """Mean training time per method on the timing plans, and its ratio to the first method.

    Replications run one at a time so the timings do not compete for cores.
    """
    if not methods:
        raise InvalidInputError("timing needs at least one method")
    rows: list[dict[str, object]] = []
    for plan in timing_plans(methods, reps=reps, seed=seed):
        summary = run_experiment(plan, clock).summary["train_seconds"]
        rows.append(
            {
                "method": plan.method.value,
                "mean_seconds": summary.mean,
                "stderr_seconds": summary.stderr,
            }
        )
    frame = pd.DataFrame(rows, columns=list(TIMING_COLUMNS[:-1]))
    frame["ratio"] = frame["mean_seconds"] / frame["mean_seconds"].iloc[0]
    logger.info("Timing finished", methods=len(frame))
    return frame


def moons_decision_surface(
    n_p: int,
    n_u: int,
    *,
    pi_plus: float = 0.5,
    seed: int = 0,
    resolution: int = 60,
    selection: SelectionConfig | None = None,
) -> pd.DataFrame:
    """WMMD fit on two-moons PU data, evaluated on a grid covering the sample.

    Rows of kind ``grid`` carry the surface; ``positive`` and ``unlabeled``
    rows carry the training points (``label`` is the hidden label of X_u).
    """
    if resolution < 2:
        raise InvalidInputError("resolution must be >= 2")
    sample = synthetic_pu(SyntheticKind.TWO_MOONS, n_p, n_u, 1, pi_plus, RngStream(seed))
    cfg = selection if selection is not None else SelectionConfig(seed=seed)
    model = grid_search(sample.pu, cfg).best

    points = np.vstack([sample.pu.positives, sample.pu.unlabeled])
    lo = points.min(axis=0) - 1.0
    hi = points.max(axis=0) + 1.0
    xs = np.linspace(lo[0], hi[0], resolution)
    ys = np.linspace(lo[1], hi[1], resolution)
    gx, gy = np.meshgrid(xs, ys)
    grid = np.column_stack([gx.ravel(), gy.ravel()])

    def block(kind: str, x: np.ndarray, label: np.ndarray | None) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "kind": kind,
                "x1": x[:, 0],
                "x2": x[:, 1],
                "log_score": model.log_score(x),
                "prediction": model.classify(x),
                "label": pd.array(label, dtype="Int64") if label is not None else pd.NA,
            }
        )

    frame = pd.concat(
        [
            block("grid", grid, None),
            block("positive", sample.pu.positives, np.ones(sample.pu.n_p, dtype=np.int64)),
            block("unlabeled", sample.pu.unlabeled, sample.hidden_labels),
        ],
        ignore_index=True,
    )
    frame["label"] = frame["label"].astype("Int64")
    logger.info("Decision surface computed", gamma=model.kernel.gamma, rows=len(frame))
    return frame
