"""Margin losses for the kernel-expansion PU risk minimizers.

Both satisfy the linear-odd condition l(z) - l(-z) = -z, which is what lets
the PU risk be written without the negative-class term.
"""

from __future__ import annotations

from collections.abc import Callable
from enum import Enum

import numpy as np
import numpy.typing as npt
from scipy.special import expit

from pywmmd.domain.types import FloatArray

LossFn = Callable[[FloatArray], FloatArray]


class LossKind(str, Enum):
    LOG = "log"
    DH = "dh"


def loss_logistic(z: npt.ArrayLike) -> FloatArray:
    """log(1 + exp(-z)), overflow-safe."""
    return np.logaddexp(0.0, -np.asarray(z, dtype=np.float64))


def loss_logistic_grad(z: npt.ArrayLike) -> FloatArray:
    return -expit(-np.asarray(z, dtype=np.float64))


def loss_double_hinge(z: npt.ArrayLike) -> FloatArray:
    """max(0, max(-z, (1 - z) / 2))."""
    za = np.asarray(z, dtype=np.float64)
    return np.maximum(0.0, np.maximum(-za, 0.5 * (1.0 - za)))


def loss_double_hinge_grad(z: npt.ArrayLike) -> FloatArray:
    # subgradient; kinks at z = -1 and z = 1 take the left slope
    za = np.asarray(z, dtype=np.float64)
    return np.where(za <= -1.0, -1.0, np.where(za <= 1.0, -0.5, 0.0))


_LOSSES: dict[LossKind, tuple[LossFn, LossFn]] = {
    LossKind.LOG: (loss_logistic, loss_logistic_grad),
    LossKind.DH: (loss_double_hinge, loss_double_hinge_grad),
}


def loss_pair(kind: LossKind | str) -> tuple[LossFn, LossFn]:
    """(loss, derivative) for a loss kind."""
    return _LOSSES[LossKind(kind)]
