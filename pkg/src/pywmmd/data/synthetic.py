"""Synthetic PU benchmarks.

gaussian:  X | Y=y ~ N(y * (1, 1) / sqrt(2), I_2),  Y = 2 * Bern(pi) - 1
two-moons: X | Y=y, U ~ N((2(1+y) - 4y cos(pi U), (1+y) - 4y sin(pi U)), 0.4^2 I_2),
           U ~ Uniform(0, 1)
"""

from __future__ import annotations

import math
from enum import Enum

import numpy as np
import numpy.typing as npt

from pywmmd.data.resample import PUSample
from pywmmd.domain.types import (
    FloatArray,
    LabelArray,
    LabeledDataset,
    PUDataset,
    RngStream,
    check_prior,
)
from pywmmd.errors import InvalidInputError

GAUSSIAN_SHIFT = 1.0 / math.sqrt(2.0)
MOONS_NOISE = 0.4


class SyntheticKind(str, Enum):
    GAUSSIAN = "gaussian"
    TWO_MOONS = "two-moons"


def _check_size(n: int, what: str = "n") -> None:
    if n < 1:
        raise InvalidInputError(f"{what} must be >= 1, got {n}")


def draw_labels(n: int, pi_plus: float, gen: np.random.Generator) -> LabelArray:
    return np.where(gen.random(n) < pi_plus, 1, -1).astype(np.int64)


def two_moons_center(y: npt.ArrayLike, u: npt.ArrayLike) -> FloatArray:
    ya = np.asarray(y, dtype=np.float64).reshape(-1)
    ua = np.asarray(u, dtype=np.float64).reshape(-1)
    x0 = 2.0 * (1.0 + ya) - 4.0 * ya * np.cos(np.pi * ua)
    x1 = (1.0 + ya) - 4.0 * ya * np.sin(np.pi * ua)
    return np.column_stack([x0, x1])


def sample_conditional(
    kind: SyntheticKind,
    labels: LabelArray,
    gen: np.random.Generator,
    noise: float = MOONS_NOISE,
) -> FloatArray:
    """Draw one feature row per label from the class-conditional distribution."""
    n = labels.shape[0]
    if SyntheticKind(kind) is SyntheticKind.GAUSSIAN:
        return labels[:, None] * GAUSSIAN_SHIFT + gen.standard_normal((n, 2))
    u = gen.random(n)
    return two_moons_center(labels, u) + noise * gen.standard_normal((n, 2))


def gen_gaussian_pair(n: int, pi_plus: float, rng: RngStream) -> LabeledDataset:
    _check_size(n)
    pi_plus = check_prior(pi_plus)
    gen = rng.generator()
    labels = draw_labels(n, pi_plus, gen)
    features = sample_conditional(SyntheticKind.GAUSSIAN, labels, gen)
    return LabeledDataset(features=features, labels=labels, name="gaussian")


def gen_two_moons(
    n: int, pi_plus: float, rng: RngStream, noise: float = MOONS_NOISE
) -> LabeledDataset:
    _check_size(n)
    pi_plus = check_prior(pi_plus)
    gen = rng.generator()
    labels = draw_labels(n, pi_plus, gen)
    features = sample_conditional(SyntheticKind.TWO_MOONS, labels, gen, noise)
    return LabeledDataset(features=features, labels=labels, name="two-moons")


def generate(kind: SyntheticKind, n: int, pi_plus: float, rng: RngStream) -> LabeledDataset:
    if SyntheticKind(kind) is SyntheticKind.GAUSSIAN:
        return gen_gaussian_pair(n, pi_plus, rng)
    return gen_two_moons(n, pi_plus, rng)


def synthetic_pu(
    kind: SyntheticKind,
    n_p: int,
    n_u: int,
    n_te: int,
    pi_plus: float,
    rng: RngStream,
) -> PUSample:
    """X_p from the positive class, X_u and the test set from the mixture."""
    for value, what in ((n_p, "n_p"), (n_u, "n_u"), (n_te, "n_te")):
        _check_size(value, what)
    kind = SyntheticKind(kind)
    pi_plus = check_prior(pi_plus)
    gen = rng.generator()
    positives = sample_conditional(kind, np.ones(n_p, dtype=np.int64), gen)
    hidden = draw_labels(n_u, pi_plus, gen)
    unlabeled = sample_conditional(kind, hidden, gen)
    test_labels = draw_labels(n_te, pi_plus, gen)
    test_features = sample_conditional(kind, test_labels, gen)
    return PUSample(
        pu=PUDataset(positives=positives, unlabeled=unlabeled, pi_plus=pi_plus),
        test=LabeledDataset(features=test_features, labels=test_labels, name=f"{kind.value}:test"),
        hidden_labels=hidden,
    )
