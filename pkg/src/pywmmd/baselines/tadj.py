"""Threshold adjustment (tADJ).

A labeled-vs-unlabeled L2 logistic regression g(x) = P(labeled | x) is
calibrated by c = mean g over held-out positives; s(x) = g(x) / c estimates
P(y = +1 | x) and x is labelled +1 iff s(x) > 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
import structlog
from scipy.special import expit, logit

from pywmmd.core.kernel import as_points
from pywmmd.core.model_select import PUSplit, SelectionConfig, pu_split
from pywmmd.domain.types import FloatArray, LabelArray, PUDataset, RngStream
from pywmmd.errors import DivergenceError, InsufficientSamplesError, InvalidInputError

logger = structlog.get_logger(__name__)

TADJ_C_GRID: tuple[float, ...] = (0.01, 0.1, 1.0, 10.0, 100.0)
MIN_CALIBRATION = 1e-6


@dataclass(frozen=True, slots=True, kw_only=True)
class TadjConfig:
    c_grid: tuple[float, ...] = TADJ_C_GRID
    folds: int = 5
    epochs: int = 500
    learning_rate: float = 0.1
    tol: float = 1e-8
    split_fraction: float = 0.8

    def __post_init__(self) -> None:
        grid = tuple(float(c) for c in self.c_grid)
        if not grid or any(not (c > 0 and math.isfinite(c)) for c in grid):
            raise InvalidInputError("c_grid must be non-empty with positive entries")
        object.__setattr__(self, "c_grid", grid)
        if self.folds < 2:
            raise InvalidInputError("folds must be >= 2")
        if self.epochs < 1 or not (self.learning_rate > 0) or self.tol < 0:
            raise InvalidInputError("epochs >= 1, learning_rate > 0 and tol >= 0 required")
        if not (0.0 < self.split_fraction < 1.0):
            raise InvalidInputError("split_fraction must lie in (0, 1)")


@dataclass(frozen=True, slots=True)
class LogisticFit:
    weights: FloatArray
    bias: float
    epochs: int

    def decision(self, x: FloatArray) -> FloatArray:
        return x @ self.weights + self.bias

    def proba(self, x: FloatArray) -> FloatArray:
        return expit(self.decision(x))


def logistic_objective(
    weights: FloatArray, bias: float, x: FloatArray, s: FloatArray, c: float
) -> float:
    """mean logloss + |w|^2 / (2 C n)."""
    return _objective_at(x @ weights + bias, weights, s, c)


def _objective_at(z: FloatArray, weights: FloatArray, s: FloatArray, c: float) -> float:
    data_term = float(np.mean(np.logaddexp(0.0, z) - s * z))
    return data_term + float(weights @ weights) / (2.0 * c * z.shape[0])


def intercept_only(s: FloatArray, dim: int) -> LogisticFit:
    """The optimum without features: bias = logit(mean s)."""
    rate = float(np.clip(np.mean(s), MIN_CALIBRATION, 1.0 - MIN_CALIBRATION))
    return LogisticFit(weights=np.zeros(dim, dtype=np.float64), bias=float(logit(rate)), epochs=0)


def fit_logistic(
    x: FloatArray,
    s: FloatArray,
    c: float,
    cfg: TadjConfig,
    init: LogisticFit | None = None,
) -> LogisticFit:
    """Full-batch gradient descent at the configured rate, from ``init`` or the intercept-only fit."""
    n, d = x.shape
    start = init if init is not None else intercept_only(s, d)
    weights = np.array(start.weights, dtype=np.float64)
    bias = float(start.bias)
    z = x @ weights + bias
    prev = _objective_at(z, weights, s, c)
    epoch = 0
    for epoch in range(1, cfg.epochs + 1):
        resid = expit(z) - s
        grad_w = x.T @ resid / n + weights / (c * n)
        grad_b = float(np.mean(resid))
        weights = weights - cfg.learning_rate * grad_w
        bias -= cfg.learning_rate * grad_b
        z = x @ weights + bias
        cur = _objective_at(z, weights, s, c)
        if not math.isfinite(cur):
            raise DivergenceError(
                f"logistic regression diverged at epoch {epoch}; try a smaller learning rate"
            )
        if abs(prev - cur) < cfg.tol:
            break
        prev = cur
    else:
        logger.warning(
            "Logistic regression stopped before converging", epochs=cfg.epochs, reg_c=c
        )
    return LogisticFit(weights=weights, bias=bias, epochs=epoch)


def heldout_logloss(fit: LogisticFit, x: FloatArray, s: FloatArray) -> float:
    z = fit.decision(x)
    return float(np.mean(np.logaddexp(0.0, z) - s * z))


def select_c(
    x: FloatArray, s: FloatArray, cfg: TadjConfig, gen: np.random.Generator
) -> tuple[float, dict[float, float]]:
    """K-fold CV over the C grid by held-out logloss; ties keep the earlier C.

    Within a fold each C starts from the previous C's solution, in grid order.
    """
    n = x.shape[0]
    folds = min(cfg.folds, n)
    if folds < 2:
        raise InsufficientSamplesError("training", 2, n)
    assignment = np.array_split(gen.permutation(n), folds)
    losses: dict[float, list[float]] = {c: [] for c in cfg.c_grid}
    for held in assignment:
        keep = np.ones(n, dtype=bool)
        keep[held] = False
        fit: LogisticFit | None = None
        for c in cfg.c_grid:
            fit = fit_logistic(x[keep], s[keep], c, cfg, init=fit)
            losses[c].append(heldout_logloss(fit, x[held], s[held]))
    scores = {c: float(np.mean(losses[c])) for c in cfg.c_grid}
    best = min(cfg.c_grid, key=lambda c: scores[c])
    return best, scores


@dataclass(frozen=True, slots=True, eq=False)
class TadjModel:
    fit: LogisticFit
    c: float
    reg_c: float
    logger: structlog.BoundLogger = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not (self.c >= MIN_CALIBRATION):
            raise InvalidInputError(f"calibration constant must be >= {MIN_CALIBRATION}")
        object.__setattr__(
            self, "logger", logger.bind(_component=self.__class__.__name__, c=self.c)
        )

    @property
    def dim(self) -> int:
        return int(self.fit.weights.shape[0])

    def labeled_proba(self, points: npt.ArrayLike) -> FloatArray:
        return self.fit.proba(as_points(points, "query points", dim=self.dim))

    def score(self, points: npt.ArrayLike) -> FloatArray:
        return self.labeled_proba(points) / self.c

    def classify(self, points: npt.ArrayLike) -> LabelArray:
        return np.where(self.score(points) > 0.5, 1, -1).astype(np.int64)


def calibration_constant(valid_positive_proba: npt.ArrayLike) -> float:
    values = np.asarray(valid_positive_proba, dtype=np.float64).reshape(-1)
    if values.size == 0:
        raise InsufficientSamplesError("validation positive", 1, 0)
    return max(float(np.mean(values)), MIN_CALIBRATION)


def fit_tadj(
    data: PUDataset,
    cfg: TadjConfig | None = None,
    rng: RngStream | None = None,
    split: PUSplit | None = None,
) -> TadjModel:
    cfg = cfg if cfg is not None else TadjConfig()
    gen = (rng if rng is not None else RngStream(0)).generator()
    if split is None:
        split = pu_split(data, SelectionConfig(split_fraction=cfg.split_fraction), gen)
    x = np.vstack([split.train.positives, split.train.unlabeled])
    s = np.concatenate(
        [np.ones(split.train.n_p), np.zeros(split.train.n_u)]
    ).astype(np.float64)

    reg_c, cv_scores = select_c(x, s, cfg, gen)
    fit = fit_logistic(x, s, reg_c, cfg)
    c = calibration_constant(fit.proba(split.valid.positives))
    logger.info("tADJ fit finished", reg_c=reg_c, c=c, cv_logloss=cv_scores[reg_c])
    return TadjModel(fit=fit, c=c, reg_c=reg_c)
