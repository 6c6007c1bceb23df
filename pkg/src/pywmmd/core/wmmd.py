"""WMMD score, closed-form classifier and the empirical WIPM quantities.

The score of a query point z is the ratio of its mean kernel value against the
positive sample to its mean kernel value against the unlabeled sample:

    lambda(z) = mean_p k(z, .) / mean_u k(z, .)

and z is labelled +1 iff lambda(z) > 1 / (2 * pi_plus), -1 otherwise (ties
included). The score never reads the class-prior; only the cutoff does.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
import structlog

from pywmmd.core.kernel import as_point, as_points, gram, mean_kernel_rows
from pywmmd.domain.types import (
    FloatArray,
    KernelSpec,
    LabelArray,
    PriorSource,
    PUDataset,
    as_matrix,
    check_prior,
)
from pywmmd.errors import DegenerateWitnessError, InvalidInputError

logger = structlog.get_logger(__name__)

SUP_NORM_SLACK = 1e-9
NEGATIVE_RESIDUE_RTOL = 1e-12


@dataclass(frozen=True, slots=True, eq=False)
class WmmdModel:
    kernel: KernelSpec
    train_positives: FloatArray
    train_unlabeled: FloatArray
    threshold_prior: float
    prior_source: PriorSource = PriorSource.KNOWN
    logger: structlog.BoundLogger = field(init=False, repr=False)

    def __post_init__(self) -> None:
        positives = as_matrix(self.train_positives, "train_positives")
        unlabeled = as_matrix(self.train_unlabeled, "train_unlabeled")
        if positives.shape[0] < 1 or unlabeled.shape[0] < 1:
            raise InvalidInputError("WMMD model needs non-empty positive and unlabeled samples")
        if positives.shape[1] != unlabeled.shape[1]:
            raise InvalidInputError(
                f"sample dimensions differ: {positives.shape[1]} vs {unlabeled.shape[1]}"
            )
        object.__setattr__(self, "train_positives", positives)
        object.__setattr__(self, "train_unlabeled", unlabeled)
        object.__setattr__(
            self, "threshold_prior", check_prior(self.threshold_prior, "threshold_prior")
        )
        object.__setattr__(self, "prior_source", PriorSource(self.prior_source))
        object.__setattr__(
            self,
            "logger",
            logger.bind(
                _component=self.__class__.__name__,
                family=self.kernel.family.value,
                gamma=self.kernel.gamma,
            ),
        )

    @classmethod
    def fit(
        cls,
        data: PUDataset,
        kernel: KernelSpec,
        threshold_prior: float | None = None,
        prior_source: PriorSource = PriorSource.KNOWN,
    ) -> WmmdModel:
        """The fitted model is the training sample plus the kernel; nothing is optimized."""
        prior = threshold_prior if threshold_prior is not None else data.pi_plus
        if prior is None:
            raise InvalidInputError("a threshold prior is required (known or estimated)")
        return cls(
            kernel=kernel,
            train_positives=data.positives,
            train_unlabeled=data.unlabeled,
            threshold_prior=prior,
            prior_source=prior_source,
        )

    @property
    def dim(self) -> int:
        return int(self.train_positives.shape[1])

    @property
    def threshold(self) -> float:
        return 1.0 / (2.0 * self.threshold_prior)

    def with_prior(self, prior: float, source: PriorSource) -> WmmdModel:
        return dataclasses.replace(self, threshold_prior=prior, prior_source=source)

    def log_score(self, points: npt.ArrayLike) -> FloatArray:
        """log lambda(z) for every row; finite for any finite query.

        Every kernel family, the inverse kernel included, goes through the
        log-sum-exp row means; ``score`` exponentiates this difference.
        """
        queries = as_points(points, "query points", dim=self.dim)
        if queries.shape[0] == 0:
            return np.zeros(0, dtype=np.float64)
        num = mean_kernel_rows(self.kernel, queries, self.train_positives)
        den = mean_kernel_rows(self.kernel, queries, self.train_unlabeled)
        return num.log_value - den.log_value

    def score(self, points: npt.ArrayLike) -> FloatArray:
        return np.exp(self.log_score(points))

    def classify(self, points: npt.ArrayLike) -> LabelArray:
        scores = self.score(points)
        return np.where(scores > self.threshold, 1, -1).astype(np.int64)


def wmmd_score(model: WmmdModel, z: npt.ArrayLike) -> float:
    point = as_point(z, "z")
    return float(model.score(point.reshape(1, -1))[0])


def classify(model: WmmdModel, z: npt.ArrayLike) -> int:
    point = as_point(z, "z")
    return int(model.classify(point.reshape(1, -1))[0])


def _wmmd_squared(p: FloatArray, q: FloatArray, w: float, spec: KernelSpec) -> float:
    pp = float(np.mean(gram(spec, p, p)))
    qq = float(np.mean(gram(spec, q, q)))
    pq = float(np.mean(gram(spec, p, q)))
    s = pp + w * w * qq - 2.0 * w * pq
    if s < 0.0:
        scale = pp + w * w * qq + 2.0 * w * abs(pq)
        if -s > NEGATIVE_RESIDUE_RTOL * scale:
            logger.warning("Negative WMMD residue clamped to zero", residue=s, scale=scale)
        s = 0.0
    return s


def wmmd_value(
    p: npt.ArrayLike, q: npt.ArrayLike, w: float, r: float, spec: KernelSpec
) -> float:
    """Closed-form WMMD between the empirical measures of P and Q.

    r * sqrt(mean K(P,P) + w^2 mean K(Q,Q) - 2 w mean K(P,Q))
    """
    pm, qm = _check_pair(p, q, w, r)
    return r * math.sqrt(_wmmd_squared(pm, qm, w, spec))


def _check_pair(
    p: npt.ArrayLike, q: npt.ArrayLike, w: float, r: float
) -> tuple[FloatArray, FloatArray]:
    pm = as_points(p, "P")
    qm = as_points(q, "Q")
    if pm.shape[0] < 1 or qm.shape[0] < 1:
        raise InvalidInputError("WMMD needs non-empty P and Q")
    if pm.shape[1] != qm.shape[1]:
        raise InvalidInputError(f"dimension mismatch: {pm.shape[1]} vs {qm.shape[1]}")
    if w < 0 or not math.isfinite(w):
        raise InvalidInputError(f"weight must be >= 0, got {w}")
    if r <= 0 or not math.isfinite(r):
        raise InvalidInputError(f"radius must be > 0, got {r}")
    return pm, qm


@dataclass(frozen=True, slots=True)
class WitnessValues:
    value: float
    g_hat: FloatArray


def empirical_wipm_and_optimizer_values(
    data: PUDataset,
    w: float,
    r: float,
    spec: KernelSpec,
    eval_points: npt.ArrayLike,
) -> WitnessValues:
    """Empirical WMMD of (X_u, X_p) and the closed-form optimizer g_hat at ``eval_points``.

    g_hat(z) = r * (mean_u k(z, .) - w * mean_p k(z, .)) / N, with N the RKHS
    norm of the un-normalized witness.
    """
    unl, pos = _check_pair(data.unlabeled, data.positives, w, r)
    norm = math.sqrt(_wmmd_squared(unl, pos, w, spec))
    if norm == 0.0:
        raise DegenerateWitnessError(
            "WMMD value is zero; the optimizer normalization is undefined"
        )
    points = as_points(eval_points, "eval_points", dim=data.dim)
    witness = (
        mean_kernel_rows(spec, points, unl).value
        - w * mean_kernel_rows(spec, points, pos).value
    )
    return WitnessValues(value=r * norm, g_hat=r * witness / norm)


def hinge_loss(margin: npt.ArrayLike) -> FloatArray:
    return np.maximum(0.0, 1.0 - np.asarray(margin, dtype=np.float64))


def empirical_hinge_risk(
    f_pos: npt.ArrayLike, f_unl: npt.ArrayLike, pi_plus: float
) -> float:
    """PU estimate of the hinge risk: 1 + mean_u f - 2 pi mean_p f.

    Only valid for functions in the unit sup-norm ball.
    """
    pi_plus = check_prior(pi_plus)
    fp = np.asarray(f_pos, dtype=np.float64).reshape(-1)
    fu = np.asarray(f_unl, dtype=np.float64).reshape(-1)
    if fp.size == 0 or fu.size == 0:
        raise InvalidInputError("hinge risk needs values on both samples")
    for name, values in (("positive", fp), ("unlabeled", fu)):
        if not np.all(np.abs(values) <= 1.0 + SUP_NORM_SLACK):
            raise InvalidInputError(
                f"{name} f-values leave the unit sup-norm ball; the estimator is invalid"
            )
    return float(1.0 + np.mean(fu) - 2.0 * pi_plus * np.mean(fp))
