from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import structlog

from pywmmd.domain.types import (
    LabelArray,
    LabeledDataset,
    PUDataset,
    RngStream,
    check_prior,
)
from pywmmd.errors import InsufficientSamplesError, InvalidInputError

logger = structlog.get_logger(__name__)

_FLOOR_GUARD = 1e-9


@dataclass(frozen=True, slots=True, eq=False)
class PUSample:
    """A PU training sample, a labeled test set, and the provenance of both."""

    pu: PUDataset
    test: LabeledDataset
    hidden_labels: LabelArray
    positive_rows: np.ndarray | None = None
    unlabeled_rows: np.ndarray | None = None
    test_rows: np.ndarray | None = None


def positive_count(n: int, pi_plus: float) -> int:
    return math.floor(n * pi_plus + _FLOOR_GUARD)


def make_pu(
    data: LabeledDataset,
    n_p: int,
    n_u: int,
    n_te: int,
    rng: RngStream,
    target_pi: float | None = None,
    binomial: bool = False,
) -> PUSample:
    """Resample a labeled dataset into disjoint X_p, X_u and a labeled test set.

    X_u and the test set hold floor(n * pi) positives each (or a binomial
    count when ``binomial``), the rest negatives; pi defaults to the
    dataset's own positive fraction.
    """
    if n_p < 1 or n_u < 1 or n_te < 1:
        raise InvalidInputError("n_p, n_u and n_te must be positive")
    pi = check_prior(target_pi if target_pi is not None else data.positive_fraction)
    gen = rng.generator()

    pos_idx = gen.permutation(np.flatnonzero(data.labels == 1))
    neg_idx = gen.permutation(np.flatnonzero(data.labels == -1))

    if binomial:
        u_pos = int(gen.binomial(n_u, pi))
        te_pos = int(gen.binomial(n_te, pi))
    else:
        u_pos = positive_count(n_u, pi)
        te_pos = positive_count(n_te, pi)
    u_neg = n_u - u_pos
    te_neg = n_te - te_pos

    need_pos = n_p + u_pos + te_pos
    need_neg = u_neg + te_neg
    if need_pos > pos_idx.shape[0]:
        raise InsufficientSamplesError("positive", need_pos, int(pos_idx.shape[0]))
    if need_neg > neg_idx.shape[0]:
        raise InsufficientSamplesError("negative", need_neg, int(neg_idx.shape[0]))

    p_rows = pos_idx[:n_p]
    u_rows = gen.permutation(
        np.concatenate([pos_idx[n_p : n_p + u_pos], neg_idx[:u_neg]])
    )
    te_rows = gen.permutation(
        np.concatenate([pos_idx[n_p + u_pos : need_pos], neg_idx[u_neg:need_neg]])
    )

    pu = PUDataset(
        positives=data.features[p_rows],
        unlabeled=data.features[u_rows],
        pi_plus=pi,
    )
    test = LabeledDataset(
        features=data.features[te_rows],
        labels=data.labels[te_rows],
        name=f"{data.name}:test" if data.name else "test",
    )
    logger.debug(
        "Resampled PU data",
        dataset=data.name,
        n_p=n_p,
        n_u=n_u,
        n_te=n_te,
        hidden_positives=u_pos,
        pi_plus=pi,
    )
    return PUSample(
        pu=pu,
        test=test,
        hidden_labels=data.labels[u_rows].copy(),
        positive_rows=p_rows,
        unlabeled_rows=u_rows,
        test_rows=te_rows,
    )
