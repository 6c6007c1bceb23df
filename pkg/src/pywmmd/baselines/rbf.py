"""LOG / DH: PU risk minimization over a kernel expansion.

    g(x) = sum_i alpha_i k(x, c_i) + b,   centers c_i = training X_p and X_u

    J(alpha, b) = -(pi / n_p) sum_p g_alpha(x)  - pi b
                  + (1 / n_u) sum_u l(-g_alpha(x) - b) + (lam / 2) alpha'alpha

where g_alpha is the expansion without the bias. Only alpha is penalized.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np
import numpy.typing as npt
import structlog

from pywmmd.baselines.losses import LossKind, loss_pair
from pywmmd.core.kernel import as_points, kernel_from_sq_distances, sq_distances
from pywmmd.core.model_select import (
    DEFAULT_GAMMA_GRID,
    PUSplit,
    SelectionConfig,
    pu_split,
)
from pywmmd.domain.types import (
    FloatArray,
    KernelFamily,
    KernelSpec,
    LabelArray,
    PUDataset,
    RngStream,
    as_matrix,
    check_prior,
)
from pywmmd.errors import DivergenceError, InvalidInputError, ScaleCapError

logger = structlog.get_logger(__name__)

MAX_CENTERS = 5000


def _positive_grid(values: tuple[float, ...], what: str) -> tuple[float, ...]:
    grid = tuple(float(v) for v in values)
    if not grid or any(not (v > 0 and math.isfinite(v)) for v in grid):
        raise InvalidInputError(f"{what} must be non-empty with positive entries")
    return grid


@dataclass(frozen=True, slots=True, kw_only=True)
class TrainSchedule:
    learning_rate: float = 0.1
    epochs: int = 100
    patience: int = 10
    lambda_grid: tuple[float, ...] = DEFAULT_GAMMA_GRID
    gamma_grid: tuple[float, ...] = DEFAULT_GAMMA_GRID
    split_fraction: float = 0.8
    max_centers: int = MAX_CENTERS
    workers: int = 1

    def __post_init__(self) -> None:
        if not (self.learning_rate > 0 and math.isfinite(self.learning_rate)):
            raise InvalidInputError("learning_rate must be positive")
        if self.epochs < 1 or self.patience < 1:
            raise InvalidInputError("epochs and patience must be >= 1")
        if not (0.0 < self.split_fraction < 1.0):
            raise InvalidInputError("split_fraction must lie in (0, 1)")
        if self.max_centers < 2 or self.workers < 1:
            raise InvalidInputError("max_centers must be >= 2 and workers >= 1")
        object.__setattr__(self, "lambda_grid", _positive_grid(self.lambda_grid, "lambda_grid"))
        object.__setattr__(self, "gamma_grid", _positive_grid(self.gamma_grid, "gamma_grid"))


@dataclass(frozen=True, slots=True, eq=False)
class RbfExpansionModel:
    kernel: KernelSpec
    centers: FloatArray
    alpha: FloatArray
    b: float
    lam: float
    loss: LossKind
    valid_risk: float = math.nan
    step_sizes: tuple[float, ...] = ()
    logger: structlog.BoundLogger = field(init=False, repr=False)

    def __post_init__(self) -> None:
        centers = as_matrix(self.centers, "centers")
        alpha = np.array(self.alpha, dtype=np.float64).reshape(-1)
        if alpha.shape[0] != centers.shape[0]:
            raise InvalidInputError(
                f"{centers.shape[0]} centers but {alpha.shape[0]} coefficients"
            )
        alpha.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "loss", LossKind(self.loss))
        object.__setattr__(
            self,
            "logger",
            logger.bind(_component=self.__class__.__name__, loss=self.loss.value),
        )

    @property
    def gamma(self) -> float:
        return self.kernel.gamma

    @property
    def dim(self) -> int:
        return int(self.centers.shape[1])

    def decision(self, points: npt.ArrayLike) -> FloatArray:
        queries = as_points(points, "query points", dim=self.dim)
        if queries.shape[0] == 0:
            return np.zeros(0, dtype=np.float64)
        phi = kernel_from_sq_distances(self.kernel, sq_distances(queries, self.centers))
        return phi @ self.alpha + self.b

    def score(self, points: npt.ArrayLike) -> FloatArray:
        return self.decision(points)

    def classify(self, points: npt.ArrayLike) -> LabelArray:
        return np.where(self.decision(points) > 0.0, 1, -1).astype(np.int64)


def pu_objective(
    alpha: FloatArray,
    b: float,
    phi_p: FloatArray,
    phi_u: FloatArray,
    pi_plus: float,
    lam: float,
    loss: LossKind | str,
) -> float:
    """J(alpha, b) on basis matrices phi_p (n_p x N) and phi_u (n_u x N)."""
    loss_fn, _ = loss_pair(loss)
    pos = float(np.mean(phi_p @ alpha))
    unl = float(np.mean(loss_fn(-(phi_u @ alpha) - b)))
    return -pi_plus * pos - pi_plus * b + unl + 0.5 * lam * float(alpha @ alpha)


def pu_objective_grad(
    alpha: FloatArray,
    b: float,
    phi_p: FloatArray,
    phi_u: FloatArray,
    pi_plus: float,
    lam: float,
    loss: LossKind | str,
) -> tuple[FloatArray, float]:
    _, dloss = loss_pair(loss)
    slope = dloss(-(phi_u @ alpha) - b)
    n_u = phi_u.shape[0]
    grad_alpha = -pi_plus * np.mean(phi_p, axis=0) - (phi_u.T @ slope) / n_u + lam * alpha
    grad_b = -pi_plus - float(np.mean(slope))
    return grad_alpha, grad_b


@dataclass(frozen=True, slots=True)
class _Basis:
    train_p: FloatArray
    train_u: FloatArray
    valid_p: FloatArray
    valid_u: FloatArray


@dataclass(frozen=True, slots=True)
class _Descent:
    alpha: FloatArray
    b: float
    valid_risk: float
    epochs: int
    step_sizes: tuple[float, ...] = ()


def _descend(
    basis: _Basis, pi_plus: float, lam: float, loss: LossKind, sched: TrainSchedule
) -> _Descent:
    """Full-batch gradient descent from zero, early-stopped on the validation risk.

    Every epoch starts at the scheduled rate; a step that raises the training
    objective is retried at half that rate within the same epoch.
    """
    n_centers = basis.train_p.shape[1]
    alpha = np.zeros(n_centers, dtype=np.float64)
    b = 0.0
    steps: list[float] = []

    def valid_risk(a: FloatArray, bias: float) -> float:
        return pu_objective(a, bias, basis.valid_p, basis.valid_u, pi_plus, 0.0, loss)

    objective = pu_objective(alpha, b, basis.train_p, basis.train_u, pi_plus, lam, loss)
    best = _Descent(alpha=alpha, b=b, valid_risk=valid_risk(alpha, b), epochs=0)
    stale = 0
    epoch = 0
    for epoch in range(1, sched.epochs + 1):
        grad_alpha, grad_b = pu_objective_grad(
            alpha, b, basis.train_p, basis.train_u, pi_plus, lam, loss
        )
        if not (np.all(np.isfinite(grad_alpha)) and math.isfinite(grad_b)):
            raise DivergenceError(
                f"non-finite gradient at epoch {epoch}; try a smaller learning rate"
            )
        lr = sched.learning_rate
        while True:
            cand_alpha = alpha - lr * grad_alpha
            cand_b = b - lr * grad_b
            cand_obj = pu_objective(
                cand_alpha, cand_b, basis.train_p, basis.train_u, pi_plus, lam, loss
            )
            if not math.isfinite(cand_obj):
                raise DivergenceError(
                    f"objective diverged at epoch {epoch} (lr={lr:g}); "
                    "try a smaller learning rate"
                )
            if cand_obj <= objective or lr < 1e-12:
                break
            lr *= 0.5
        alpha, b, objective = cand_alpha, cand_b, cand_obj
        steps.append(lr)

        risk = valid_risk(alpha, b)
        if risk < best.valid_risk:
            best = _Descent(alpha=alpha, b=b, valid_risk=risk, epochs=epoch)
            stale = 0
        else:
            stale += 1
            if stale >= sched.patience:
                break
    return _Descent(
        alpha=best.alpha,
        b=best.b,
        valid_risk=best.valid_risk,
        epochs=epoch,
        step_sizes=tuple(steps),
    )


def check_scale(data: PUDataset, sched: TrainSchedule) -> None:
    if data.n_p + data.n_u > sched.max_centers:
        raise ScaleCapError(
            f"n_p + n_u = {data.n_p + data.n_u} exceeds the kernel-expansion cap "
            f"of {sched.max_centers} centers"
        )


def fit_log_dh(
    data: PUDataset,
    loss: LossKind | str,
    sched: TrainSchedule | None = None,
    rng: RngStream | None = None,
    family: KernelFamily = KernelFamily.GAUSSIAN,
    pi_plus: float | None = None,
    split: PUSplit | None = None,
) -> RbfExpansionModel:
    """Grid-select (lambda, gamma) by validation risk and return the early-stopped fit.

    Grid ties keep the earlier cell in (lambda, gamma) grid order.
    """
    sched = sched if sched is not None else TrainSchedule()
    loss = LossKind(loss)
    family = KernelFamily(family)
    prior = pi_plus if pi_plus is not None else data.pi_plus
    if prior is None:
        raise InvalidInputError("LOG/DH training needs a class-prior (known or estimated)")
    prior = check_prior(prior)
    check_scale(data, sched)
    if split is None:
        gen = (rng if rng is not None else RngStream(0)).generator()
        split = pu_split(data, SelectionConfig(split_fraction=sched.split_fraction), gen)

    centers = np.vstack([split.train.positives, split.train.unlabeled])
    d2 = _Basis(
        train_p=sq_distances(split.train.positives, centers),
        train_u=sq_distances(split.train.unlabeled, centers),
        valid_p=sq_distances(split.valid.positives, centers),
        valid_u=sq_distances(split.valid.unlabeled, centers),
    )
    log = logger.bind(_component="LogDhFit", loss=loss.value, centers=centers.shape[0])

    def basis_for(kernel: KernelSpec) -> _Basis:
        return _Basis(
            train_p=kernel_from_sq_distances(kernel, d2.train_p),
            train_u=kernel_from_sq_distances(kernel, d2.train_u),
            valid_p=kernel_from_sq_distances(kernel, d2.valid_p),
            valid_u=kernel_from_sq_distances(kernel, d2.valid_u),
        )

    def evaluate(cell: tuple[float, float]) -> tuple[float, float, _Descent]:
        lam, gamma = cell
        result = _descend(basis_for(KernelSpec(family, gamma)), prior, lam, loss, sched)
        log.debug(
            "Grid cell trained",
            lam=lam,
            gamma=gamma,
            valid_risk=result.valid_risk,
            epochs=result.epochs,
        )
        return lam, gamma, result

    cells = list(product(sched.lambda_grid, sched.gamma_grid))
    if sched.workers > 1 and len(cells) > 1:
        with ThreadPoolExecutor(max_workers=sched.workers) as pool:
            results = list(pool.map(evaluate, cells))
    else:
        results = [evaluate(c) for c in cells]

    lam, gamma, best = results[0]
    for cand in results[1:]:
        if cand[2].valid_risk < best.valid_risk:
            lam, gamma, best = cand

    log.info("LOG/DH selection finished", lam=lam, gamma=gamma, valid_risk=best.valid_risk)
    return RbfExpansionModel(
        kernel=KernelSpec(family, gamma),
        centers=centers,
        alpha=best.alpha,
        b=best.b,
        lam=lam,
        loss=loss,
        valid_risk=best.valid_risk,
        step_sizes=best.step_sizes,
    )
