from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol

import numpy as np
import numpy.typing as npt

from pywmmd.errors import InvalidInputError

FloatArray = npt.NDArray[np.float64]
LabelArray = npt.NDArray[np.int64]

_U64_MAX = 2**64 - 1


class KernelFamily(str, Enum):
    GAUSSIAN = "gaussian"
    INVERSE = "inverse"


class Method(str, Enum):
    WMMD = "wmmd"
    LOG = "log"
    DH = "dh"
    TADJ = "tadj"


class PriorSource(str, Enum):
    KNOWN = "known"
    DENSITY_BASED = "density-based"


@dataclass(frozen=True, slots=True)
class KernelSpec:
    """Kernel family plus its gamma parameter.

    Gaussian: k(x, y) = exp(-gamma * |x - y|^2)
    Inverse:  k(x, y) = gamma / (gamma + |x - y|^2)
    """

    family: KernelFamily
    gamma: float

    def __post_init__(self) -> None:
        if not isinstance(self.family, KernelFamily):
            object.__setattr__(self, "family", KernelFamily(self.family))
        gamma = float(self.gamma)
        if not math.isfinite(gamma) or gamma <= 0:
            raise InvalidInputError(f"gamma must be a positive finite real, got {gamma}")
        object.__setattr__(self, "gamma", gamma)


def as_matrix(values: npt.ArrayLike, what: str) -> FloatArray:
    """Read-only float64 copy of a 2-D sample matrix, rejecting non-finite entries."""
    arr = np.array(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2:
        raise InvalidInputError(f"{what} must be a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{what} contains non-finite values")
    arr.setflags(write=False)
    return arr


def check_prior(pi_plus: float, what: str = "pi_plus") -> float:
    pi_plus = float(pi_plus)
    if not (0.0 < pi_plus < 1.0):
        raise InvalidInputError(f"{what} must lie in (0, 1), got {pi_plus}")
    return pi_plus


@dataclass(frozen=True, slots=True, eq=False)
class PUDataset:
    """Positive sample X_p and unlabeled sample X_u, optionally with a known class-prior."""

    positives: FloatArray
    unlabeled: FloatArray
    pi_plus: float | None = None

    def __post_init__(self) -> None:
        positives = as_matrix(self.positives, "positives")
        unlabeled = as_matrix(self.unlabeled, "unlabeled")
        if positives.shape[0] < 1 or unlabeled.shape[0] < 1:
            raise InvalidInputError("PU data needs at least one positive and one unlabeled row")
        if positives.shape[1] < 1 or positives.shape[1] != unlabeled.shape[1]:
            raise InvalidInputError(
                f"positives and unlabeled must share a dimension >= 1, "
                f"got {positives.shape[1]} and {unlabeled.shape[1]}"
            )
        object.__setattr__(self, "positives", positives)
        object.__setattr__(self, "unlabeled", unlabeled)
        if self.pi_plus is not None:
            object.__setattr__(self, "pi_plus", check_prior(self.pi_plus))

    @property
    def n_p(self) -> int:
        return int(self.positives.shape[0])

    @property
    def n_u(self) -> int:
        return int(self.unlabeled.shape[0])

    @property
    def dim(self) -> int:
        return int(self.positives.shape[1])


@dataclass(frozen=True, slots=True, eq=False)
class LabeledDataset:
    features: FloatArray
    labels: LabelArray
    name: str = ""

    def __post_init__(self) -> None:
        features = as_matrix(self.features, "features")
        labels = np.array(self.labels, dtype=np.int64).reshape(-1)
        if labels.shape[0] != features.shape[0]:
            raise InvalidInputError(
                f"{features.shape[0]} feature rows but {labels.shape[0]} labels"
            )
        if labels.shape[0] < 1:
            raise InvalidInputError("a labeled dataset needs at least one row")
        if not np.all((labels == 1) | (labels == -1)):
            raise InvalidInputError("labels must be +1 or -1")
        labels.setflags(write=False)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def positive_fraction(self) -> float:
        return float(np.mean(self.labels == 1)) if len(self) else 0.0


@dataclass(frozen=True, slots=True)
class RngStream:
    """One independent random stream; identical (seed, stream_id) replays identical draws."""

    seed: int
    stream_id: int = 0
    _entropy: np.random.SeedSequence = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not (0 <= int(value) <= _U64_MAX):
                raise InvalidInputError(f"{name} must be a 64-bit unsigned integer")
        object.__setattr__(
            self,
            "_entropy",
            np.random.SeedSequence(entropy=int(self.seed), spawn_key=(int(self.stream_id),)),
        )

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self._entropy)


class Classifier(Protocol):
    """Anything fitted that can score and label query points."""

    def score(self, points: npt.ArrayLike) -> FloatArray: ...

    def classify(self, points: npt.ArrayLike) -> LabelArray: ...
