"""Replication runner.

Each replication owns three random streams derived from (seed, rep): one
for drawing the data, one for the train/validation split and one for any
fitting randomness (tADJ fold assignment). Replications therefore run in any
order or concurrently with identical results.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
import structlog

from pywmmd.baselines.losses import LossKind
from pywmmd.baselines.rbf import TrainSchedule, fit_log_dh
from pywmmd.baselines.tadj import TadjConfig, fit_tadj
from pywmmd.core.model_select import (
    SelectionConfig,
    estimate_prior,
    grid_search,
    pu_split,
)
from pywmmd.data.resample import PUSample, make_pu
from pywmmd.data.synthetic import SyntheticKind, synthetic_pu
from pywmmd.domain.types import (
    FloatArray,
    KernelFamily,
    LabelArray,
    LabeledDataset,
    Method,
    PriorSource,
    RngStream,
    check_prior,
)
from pywmmd.errors import ExperimentError, InvalidInputError
from pywmmd.eval.metrics import accuracy, auc
from pywmmd.infra.clock import Clock, SystemClock

logger = structlog.get_logger(__name__)

SMALL_PLAN_REPS = 100
LARGE_PLAN_REPS = 10
METRICS: tuple[str, ...] = ("accuracy", "auc")


@dataclass(frozen=True, slots=True, kw_only=True)
class ExperimentPlan:
    """One (data source, sizes, method) cell, replicated ``reps`` times.

    Exactly one of ``synthetic`` and ``dataset`` is set. ``pi_plus`` is the
    mixture prior for synthetic plans and the resampling target for datasets
    (defaulting to the dataset's positive fraction).

    With ``prior_known=False`` the threshold uses the density-based estimate.
    gamma is still selected at the true prior unless ``prior_free_selection``
    is set, in which case every grid candidate is scored at its own estimate.
    """

    method: Method
    n_p: int
    n_u: int
    n_te: int = 1000
    pi_plus: float | None = None
    prior_known: bool = True
    prior_free_selection: bool = False
    synthetic: SyntheticKind | None = None
    dataset: LabeledDataset | None = None
    reps: int = SMALL_PLAN_REPS
    seed: int = 0
    family: KernelFamily = KernelFamily.GAUSSIAN
    binomial: bool = False
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    schedule: TrainSchedule = field(default_factory=TrainSchedule)
    tadj: TadjConfig = field(default_factory=TadjConfig)
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "method", Method(self.method))
        object.__setattr__(self, "family", KernelFamily(self.family))
        if (self.synthetic is None) == (self.dataset is None):
            raise InvalidInputError("a plan needs exactly one of a synthetic kind or a dataset")
        if self.synthetic is not None:
            object.__setattr__(self, "synthetic", SyntheticKind(self.synthetic))
            if self.pi_plus is None:
                raise InvalidInputError("synthetic plans need pi_plus")
        if self.pi_plus is not None:
            check_prior(self.pi_plus)
        if min(self.n_p, self.n_u, self.n_te) < 1:
            raise InvalidInputError("n_p, n_u and n_te must be >= 1")
        if self.reps < 1:
            raise InvalidInputError("reps must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise InvalidInputError("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise InvalidInputError("workers must be >= 1")
        if self.prior_free_selection and self.prior_known:
            raise InvalidInputError("prior_free_selection needs prior_known=False")

    @property
    def source_name(self) -> str:
        if self.synthetic is not None:
            return self.synthetic.value
        assert self.dataset is not None
        return self.dataset.name or "dataset"


@dataclass(frozen=True, slots=True)
class RepResult:
    rep: int
    accuracy: float
    auc: float
    train_seconds: float
    selected_gamma: float | None = None
    pi_hat: float | None = None
    selection_prior: PriorSource | None = None


@dataclass(frozen=True, slots=True)
class Summary:
    mean: float
    stderr: float

    @classmethod
    def of(cls, values: list[float]) -> Summary:
        arr = np.asarray(values, dtype=np.float64)
        if arr.size == 0:
            raise InvalidInputError("summary of an empty sample")
        stderr = float(np.std(arr, ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
        return cls(mean=float(np.mean(arr)), stderr=stderr)


@dataclass(frozen=True, slots=True)
class ExperimentReport:
    plan: ExperimentPlan
    per_rep: tuple[RepResult, ...]
    summary: Mapping[str, Summary]

    @classmethod
    def from_reps(cls, plan: ExperimentPlan, per_rep: tuple[RepResult, ...]) -> ExperimentReport:
        summary: dict[str, Summary] = {
            "accuracy": Summary.of([r.accuracy for r in per_rep]),
            "auc": Summary.of([r.auc for r in per_rep]),
            "train_seconds": Summary.of([r.train_seconds for r in per_rep]),
        }
        pi_hats = [r.pi_hat for r in per_rep if r.pi_hat is not None]
        if pi_hats:
            summary["pi_hat"] = Summary.of(pi_hats)
        return cls(plan=plan, per_rep=per_rep, summary=summary)


@dataclass(frozen=True, slots=True)
class RepStreams:
    data: RngStream
    split: RngStream
    fit: RngStream

    @classmethod
    def for_rep(cls, seed: int, rep: int) -> RepStreams:
        return cls(
            data=RngStream(seed, 3 * rep),
            split=RngStream(seed, 3 * rep + 1),
            fit=RngStream(seed, 3 * rep + 2),
        )


@dataclass(frozen=True, slots=True)
class _Fitted:
    scores: FloatArray
    predictions: LabelArray
    selected_gamma: float | None
    pi_hat: float | None
    selection_prior: PriorSource | None


def draw_sample(plan: ExperimentPlan, stream: RngStream) -> PUSample:
    if plan.synthetic is not None:
        assert plan.pi_plus is not None
        return synthetic_pu(plan.synthetic, plan.n_p, plan.n_u, plan.n_te, plan.pi_plus, stream)
    assert plan.dataset is not None
    return make_pu(
        plan.dataset,
        plan.n_p,
        plan.n_u,
        plan.n_te,
        stream,
        target_pi=plan.pi_plus,
        binomial=plan.binomial,
    )


def _fit_and_predict(plan: ExperimentPlan, sample: PUSample, streams: RepStreams) -> _Fitted:
    pu = sample.pu
    test = sample.test.features
    true_pi = pu.pi_plus
    assert true_pi is not None

    if plan.method is Method.TADJ:
        split = pu_split(pu, plan.selection, streams.split.generator())
        model = fit_tadj(pu, plan.tadj, rng=streams.fit, split=split)
        return _Fitted(model.score(test), model.classify(test), None, None, None)

    if plan.method is not Method.WMMD and plan.prior_known:
        split = pu_split(pu, plan.selection, streams.split.generator())
        model = fit_log_dh(
            pu, LossKind(plan.method.value), plan.schedule, family=plan.family, split=split
        )
        return _Fitted(
            model.score(test), model.classify(test), model.gamma, None, PriorSource.KNOWN
        )

    # grid_search draws the same split as pu_split from this generator.
    pi_hat: float | None = None
    if plan.prior_free_selection:
        selection = grid_search(
            replace(pu, pi_plus=None),
            plan.selection,
            plan.family,
            rng=streams.split.generator(),
        )
        selection_prior = PriorSource.DENSITY_BASED
        pi_hat = selection.best.threshold_prior
    else:
        # Known-prior selection: the unknown-prior run then shares its score
        # function with the known-prior run and differs only in the threshold.
        selection = grid_search(
            pu, plan.selection, plan.family, rng=streams.split.generator(), pi_plus=true_pi
        )
        selection_prior = PriorSource.KNOWN
        if not plan.prior_known:
            pi_hat = estimate_prior(
                selection.best, selection.split.valid.positives, plan.selection.eta
            )
    wmmd = selection.best

    if plan.method is Method.WMMD:
        if pi_hat is not None:
            wmmd = wmmd.with_prior(pi_hat, PriorSource.DENSITY_BASED)
        return _Fitted(
            wmmd.log_score(test), wmmd.classify(test), wmmd.kernel.gamma, pi_hat, selection_prior
        )

    assert pi_hat is not None
    model = fit_log_dh(
        pu,
        LossKind(plan.method.value),
        plan.schedule,
        family=plan.family,
        pi_plus=pi_hat,
        split=selection.split,
    )
    return _Fitted(model.score(test), model.classify(test), model.gamma, pi_hat, selection_prior)


def run_replication(plan: ExperimentPlan, rep: int, clock: Clock) -> RepResult:
    streams = RepStreams.for_rep(plan.seed, rep)
    sample = draw_sample(plan, streams.data)
    start = clock.now_ns()
    fitted = _fit_and_predict(plan, sample, streams)
    seconds = clock.elapsed_seconds(start)
    return RepResult(
        rep=rep,
        accuracy=accuracy(fitted.predictions, sample.test.labels),
        auc=auc(fitted.scores, sample.test.labels),
        train_seconds=seconds,
        selected_gamma=fitted.selected_gamma,
        pi_hat=fitted.pi_hat,
        selection_prior=fitted.selection_prior,
    )


def run_experiment(plan: ExperimentPlan, clock: Clock | None = None) -> ExperimentReport:
    """Run every replication of ``plan`` and aggregate mean and standard error.

    Training time covers split, selection, prior estimation and fitting; data
    generation and test evaluation are excluded.
    """
    clock = clock if clock is not None else SystemClock()
    log = logger.bind(
        method=plan.method.value,
        source=plan.source_name,
        n_p=plan.n_p,
        n_u=plan.n_u,
        prior_known=plan.prior_known,
    )

    def one(rep: int) -> RepResult:
        try:
            result = run_replication(plan, rep, clock)
        except Exception as exc:
            raise ExperimentError(rep, plan.seed, exc) from exc
        log.debug("Replication finished", rep=rep, accuracy=result.accuracy, auc=result.auc)
        return result

    reps = range(plan.reps)
    if plan.workers > 1 and plan.reps > 1:
        with ThreadPoolExecutor(max_workers=plan.workers) as pool:
            per_rep = tuple(pool.map(one, reps))
    else:
        per_rep = tuple(one(r) for r in reps)

    report = ExperimentReport.from_reps(plan, per_rep)
    log.info(
        "Experiment finished",
        reps=plan.reps,
        accuracy=report.summary["accuracy"].mean,
        auc=report.summary["auc"].mean,
    )
    return report
