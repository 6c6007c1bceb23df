from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import structlog

from pywmmd.core.kernel import as_points
from pywmmd.core.wmmd import WmmdModel
from pywmmd.domain.types import (
    KernelFamily,
    KernelSpec,
    PriorSource,
    PUDataset,
    check_prior,
)
from pywmmd.errors import InsufficientSamplesError, InvalidInputError

logger = structlog.get_logger(__name__)

DEFAULT_GAMMA_GRID: tuple[float, ...] = (1.0, 0.4, 0.2, 0.1, 0.05)
PRIOR_EPS = 1e-6
# guards floor(eta * m) against representation error such as 0.29 * 100
_FLOOR_GUARD = 1e-9


@dataclass(frozen=True, slots=True, kw_only=True)
class SelectionConfig:
    gamma_grid: tuple[float, ...] = DEFAULT_GAMMA_GRID
    split_fraction: float = 0.8
    eta: float = 0.1
    seed: int = 0
    refit_full: bool = False
    workers: int = 1

    def __post_init__(self) -> None:
        grid = tuple(float(g) for g in self.gamma_grid)
        if not grid or any(not (g > 0 and math.isfinite(g)) for g in grid):
            raise InvalidInputError("gamma grid must be non-empty with positive entries")
        object.__setattr__(self, "gamma_grid", grid)
        if not (0.0 < self.split_fraction < 1.0):
            raise InvalidInputError("split_fraction must lie in (0, 1)")
        if not (0.0 < self.eta < 1.0):
            raise InvalidInputError("eta must lie in (0, 1)")
        if not (0 <= self.seed < 2**64):
            raise InvalidInputError("seed must be a 64-bit unsigned integer")
        if self.workers < 1:
            raise InvalidInputError("workers must be >= 1")


@dataclass(frozen=True, slots=True)
class PUSplit:
    train: PUDataset
    valid: PUDataset


def train_size(n: int, fraction: float) -> int:
    return max(1, min(n - 1, math.floor(n * fraction + _FLOOR_GUARD)))


def pu_split(
    data: PUDataset, cfg: SelectionConfig, rng: np.random.Generator | None = None
) -> PUSplit:
    """Independent random train/validation split of the positive and unlabeled samples."""
    if data.n_p < 2:
        raise InsufficientSamplesError("positive", 2, data.n_p)
    if data.n_u < 2:
        raise InsufficientSamplesError("unlabeled", 2, data.n_u)
    gen = rng if rng is not None else np.random.default_rng(cfg.seed)
    perm_p = gen.permutation(data.n_p)
    perm_u = gen.permutation(data.n_u)
    k_p = train_size(data.n_p, cfg.split_fraction)
    k_u = train_size(data.n_u, cfg.split_fraction)
    train = PUDataset(
        positives=data.positives[perm_p[:k_p]],
        unlabeled=data.unlabeled[perm_u[:k_u]],
        pi_plus=data.pi_plus,
    )
    valid = PUDataset(
        positives=data.positives[perm_p[k_p:]],
        unlabeled=data.unlabeled[perm_u[k_u:]],
        pi_plus=data.pi_plus,
    )
    return PUSplit(train=train, valid=valid)


def risk_from_predictions(
    pred_pos: npt.ArrayLike, pred_unl: npt.ArrayLike, pi_plus: float
) -> float:
    """Validation risk from +1/-1 predictions on validation positives and unlabeled.

    -pi + 2 pi * P_p(pred != +1) + P_u(pred != -1)
    """
    pi_plus = check_prior(pi_plus)
    pp = np.asarray(pred_pos).reshape(-1)
    pu = np.asarray(pred_unl).reshape(-1)
    if pp.size == 0 or pu.size == 0:
        raise InvalidInputError("validation risk needs both validation samples")
    return float(-pi_plus + 2.0 * pi_plus * np.mean(pp != 1) + np.mean(pu != -1))


def validation_risk(model: WmmdModel, valid: PUDataset, pi_plus: float) -> float:
    threshold = 1.0 / (2.0 * check_prior(pi_plus))
    pred_pos = np.where(model.score(valid.positives) > threshold, 1, -1)
    pred_unl = np.where(model.score(valid.unlabeled) > threshold, 1, -1)
    return risk_from_predictions(pred_pos, pred_unl, pi_plus)


def density_prior_from_inverse_scores(inverse_scores: npt.ArrayLike, eta: float) -> float:
    """sup{t : fraction of inverse scores <= t is <= eta}, as an order statistic.

    With k = floor(eta * m) the constraint set is [0, s_(k+1)), so the
    supremum is the (k+1)-th smallest inverse score, clipped into (0, 1).
    """
    s = np.sort(np.asarray(inverse_scores, dtype=np.float64).reshape(-1))
    m = s.shape[0]
    if m < 1:
        raise InvalidInputError("prior estimation needs at least one validation positive")
    if not (0.0 < eta < 1.0):
        raise InvalidInputError("eta must lie in (0, 1)")
    k = min(math.floor(eta * m + _FLOOR_GUARD), m - 1)
    return float(np.clip(s[k], PRIOR_EPS, 1.0 - PRIOR_EPS))


def estimate_prior(model: WmmdModel, valid_positives: npt.ArrayLike, eta: float) -> float:
    """Density-based class-prior estimate from the inverse WMMD scores of validation positives."""
    points = as_points(valid_positives, "valid_positives", dim=model.dim)
    if points.shape[0] < 1:
        raise InvalidInputError("prior estimation needs at least one validation positive")
    inverse = np.exp(-model.log_score(points))
    return density_prior_from_inverse_scores(inverse, eta)


@dataclass(frozen=True, slots=True)
class GridRow:
    gamma: float
    risk: float
    pi_hat: float | None = None


@dataclass(frozen=True, slots=True)
class GridSearchResult:
    best: WmmdModel
    table: tuple[GridRow, ...]
    split: PUSplit

    @property
    def selected_gamma(self) -> float:
        return self.best.kernel.gamma


def grid_search(
    data: PUDataset,
    cfg: SelectionConfig,
    family: KernelFamily = KernelFamily.GAUSSIAN,
    rng: np.random.Generator | None = None,
    pi_plus: float | None = None,
) -> GridSearchResult:
    """Pick gamma minimizing the validation risk; ties go to the larger gamma.

    Without a known prior, every candidate estimates its own prior on the
    validation positives and the risk is evaluated at that estimate.
    """
    prior = pi_plus if pi_plus is not None else data.pi_plus
    split = pu_split(data, cfg, rng)
    log = logger.bind(family=KernelFamily(family).value, prior_known=prior is not None)

    def evaluate(gamma: float) -> tuple[GridRow, WmmdModel]:
        kernel = KernelSpec(KernelFamily(family), gamma)
        if prior is not None:
            model = WmmdModel.fit(split.train, kernel, threshold_prior=prior)
            return GridRow(gamma, validation_risk(model, split.valid, prior)), model
        model = WmmdModel.fit(split.train, kernel, threshold_prior=0.5)
        pi_hat = estimate_prior(model, split.valid.positives, cfg.eta)
        model = model.with_prior(pi_hat, PriorSource.DENSITY_BASED)
        risk = validation_risk(model, split.valid, pi_hat)
        return GridRow(gamma, risk, pi_hat), model

    if cfg.workers > 1 and len(cfg.gamma_grid) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(evaluate, cfg.gamma_grid))
    else:
        results = [evaluate(g) for g in cfg.gamma_grid]

    for row, _ in results:
        log.debug("Grid candidate evaluated", gamma=row.gamma, risk=row.risk, pi_hat=row.pi_hat)

    best_idx = min(range(len(results)), key=lambda i: (results[i][0].risk, -results[i][0].gamma))
    best_row, best = results[best_idx]
    if cfg.refit_full:
        best = WmmdModel.fit(
            data, best.kernel, threshold_prior=best.threshold_prior, prior_source=best.prior_source
        )
    log.info("Grid search finished", gamma=best_row.gamma, risk=best_row.risk)
    return GridSearchResult(
        best=best, table=tuple(row for row, _ in results), split=split
    )
