from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt
from scipy.special import ndtr
from scipy.stats import rankdata, ttest_ind

from pywmmd.domain.types import check_prior
from pywmmd.errors import InvalidInputError


def _labels(values: npt.ArrayLike, what: str) -> np.ndarray:
    arr = np.asarray(values).reshape(-1)
    if not np.all((arr == 1) | (arr == -1)):
        raise InvalidInputError(f"{what} must hold +1/-1 labels")
    return arr


def accuracy(pred: npt.ArrayLike, truth: npt.ArrayLike) -> float:
    p = _labels(pred, "pred")
    t = _labels(truth, "truth")
    if p.shape != t.shape:
        raise InvalidInputError(f"length mismatch: {p.shape[0]} predictions, {t.shape[0]} labels")
    if t.size == 0:
        raise InvalidInputError("accuracy of an empty prediction vector")
    return float(np.mean(p == t))


def auc(scores: npt.ArrayLike, truth: npt.ArrayLike) -> float:
    """Mann-Whitney AUC with half credit for tied (positive, negative) pairs.

    Computed from midranks of the pooled scores, so it equals the pairwise
    mean exactly.
    """
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    t = _labels(truth, "truth")
    if s.shape != t.shape:
        raise InvalidInputError(f"length mismatch: {s.shape[0]} scores, {t.shape[0]} labels")
    if np.any(np.isnan(s)):
        raise InvalidInputError("scores contain NaN")
    pos = t == 1
    n_pos = int(np.sum(pos))
    n_neg = t.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise InvalidInputError("AUC needs at least one positive and one negative label")
    ranks = rankdata(s, method="average")
    u_stat = float(np.sum(ranks[pos])) - n_pos * (n_pos + 1) / 2.0
    return u_stat / (n_pos * n_neg)


def bayes_accuracy_gaussian(pi_plus: float) -> float:
    """Bayes accuracy of the two-Gaussian task X | y ~ N(y (1,1)/sqrt(2), I).

    Projected onto the mean direction the classes are N(+-1, 1), and the
    Bayes rule cuts at c = log((1 - pi) / pi) / 2.
    """
    pi_plus = check_prior(pi_plus)
    c = 0.5 * math.log((1.0 - pi_plus) / pi_plus)
    return float(pi_plus * ndtr(1.0 - c) + (1.0 - pi_plus) * ndtr(1.0 + c))


def two_sample_t(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """Welch t-statistic of mean(a) - mean(b); NaN when undefined."""
    xa = np.asarray(a, dtype=np.float64).reshape(-1)
    xb = np.asarray(b, dtype=np.float64).reshape(-1)
    if xa.size < 2 or xb.size < 2:
        return math.nan
    if np.var(xa) == 0.0 and np.var(xb) == 0.0:
        return math.nan
    return float(ttest_ind(xa, xb, equal_var=False).statistic)
