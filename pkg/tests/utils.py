from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import numpy.typing as npt

from pywmmd.data.libsvm import serialize_libsvm, serialize_pu_libsvm
from pywmmd.data.resample import PUSample
from pywmmd.data.synthetic import SyntheticKind, synthetic_pu
from pywmmd.domain.types import LabeledDataset, PUDataset, RngStream


def random_pu(
    seed: int,
    n_p: int = 20,
    n_u: int = 40,
    dim: int = 2,
    pi_plus: float | None = None,
) -> PUDataset:
    gen = np.random.default_rng(seed)
    return PUDataset(
        positives=gen.normal(0.5, 1.0, size=(n_p, dim)),
        unlabeled=gen.normal(0.0, 1.0, size=(n_u, dim)),
        pi_plus=pi_plus,
    )


def gaussian_sample(
    n_p: int = 100, n_u: int = 400, n_te: int = 1000, pi_plus: float = 0.5, seed: int = 0
) -> PUSample:
    return synthetic_pu(SyntheticKind.GAUSSIAN, n_p, n_u, n_te, pi_plus, RngStream(seed))


def labeled_blobs(n_pos: int, n_neg: int, dim: int = 3, seed: int = 0) -> LabeledDataset:
    gen = np.random.default_rng(seed)
    features = np.vstack(
        [gen.normal(1.0, 1.0, size=(n_pos, dim)), gen.normal(-1.0, 1.0, size=(n_neg, dim))]
    )
    labels = np.concatenate([np.ones(n_pos, dtype=np.int64), -np.ones(n_neg, dtype=np.int64)])
    return LabeledDataset(features=features, labels=labels, name="blobs")


def write_pu_file(path: Path, data: PUDataset) -> Path:
    with path.open("w", encoding="utf-8") as f:
        serialize_pu_libsvm(data, f)
    return path


def write_labeled_file(path: Path, data: LabeledDataset) -> Path:
    with path.open("w", encoding="utf-8") as f:
        serialize_libsvm(data, f)
    return path


def brute_gaussian(x: npt.ArrayLike, y: npt.ArrayLike, gamma: float) -> float:
    d2 = math.fsum((a - b) ** 2 for a, b in zip(np.ravel(x), np.ravel(y), strict=True))
    return math.exp(-gamma * d2)


def brute_wmmd(p: np.ndarray, q: np.ndarray, w: float, r: float, gamma: float) -> float:
    def mean_k(a: np.ndarray, b: np.ndarray) -> float:
        return math.fsum(brute_gaussian(x, y, gamma) for x in a for y in b) / (len(a) * len(b))

    s = mean_k(p, p) + w * w * mean_k(q, q) - 2.0 * w * mean_k(p, q)
    return r * math.sqrt(max(0.0, s))


def brute_auc(scores: npt.ArrayLike, truth: npt.ArrayLike) -> float:
    s = np.ravel(scores)
    t = np.ravel(truth)
    pos = s[t == 1]
    neg = s[t == -1]
    credit = 0.0
    for a in pos:
        for b in neg:
            if a > b:
                credit += 1.0
            elif a == b:
                credit += 0.5
    return credit / (len(pos) * len(neg))
