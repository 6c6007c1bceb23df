"""Kernel evaluation primitives.

Every scoring routine in the package goes through ``mean_kernel_rows``, which
returns the mean kernel value of each query point against a sample both on
the linear scale and as a log. For the Gaussian family the log is computed
with a log-sum-exp reduction over the exponents ``-gamma * |z - x_i|^2`` so it
stays exact even where every individual term underflows to zero.

Distances are exact squared Euclidean norms; nothing is cached here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
from scipy.spatial.distance import cdist
from scipy.special import logsumexp

from pywmmd.domain.types import FloatArray, KernelFamily, KernelSpec
from pywmmd.errors import InvalidInputError


def gamma_from_bandwidth(h: float) -> float:
    """Map a Gaussian bandwidth h, as in exp(-|x-y|^2 / (2 h^2)), to gamma."""
    if not (h > 0 and math.isfinite(h)):
        raise InvalidInputError(f"bandwidth must be positive, got {h}")
    return 1.0 / (2.0 * h * h)


def as_point(x: npt.ArrayLike, what: str = "point") -> FloatArray:
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{what} has a non-finite coordinate")
    return arr


def as_points(
    points: npt.ArrayLike, what: str = "points", dim: int | None = None
) -> FloatArray:
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if dim is not None and arr.shape[0] == dim else arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InvalidInputError(f"{what} must be a matrix, got shape {arr.shape}")
    if dim is not None and arr.shape[0] and arr.shape[1] != dim:
        raise InvalidInputError(f"{what} has dimension {arr.shape[1]}, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{what} contains non-finite values")
    return arr


def sq_distances(a: FloatArray, b: FloatArray) -> FloatArray:
    if a.shape[1] != b.shape[1]:
        raise InvalidInputError(
            f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}"
        )
    return cdist(a, b, "sqeuclidean")


def kernel_from_sq_distances(spec: KernelSpec, d2: FloatArray) -> FloatArray:
    if spec.family is KernelFamily.GAUSSIAN:
        return np.exp(-spec.gamma * d2)
    return spec.gamma / (spec.gamma + d2)


def log_kernel_from_sq_distances(spec: KernelSpec, d2: FloatArray) -> FloatArray:
    if spec.family is KernelFamily.GAUSSIAN:
        return -spec.gamma * d2
    return -np.log1p(d2 / spec.gamma)


def eval_kernel(spec: KernelSpec, x: npt.ArrayLike, y: npt.ArrayLike) -> float:
    xa = as_point(x, "x")
    ya = as_point(y, "y")
    if xa.shape != ya.shape:
        raise InvalidInputError(f"dimension mismatch: {xa.shape[0]} vs {ya.shape[0]}")
    d2 = sq_distances(xa.reshape(1, -1), ya.reshape(1, -1))
    return float(kernel_from_sq_distances(spec, d2)[0, 0])


def gram(spec: KernelSpec, a: npt.ArrayLike, b: npt.ArrayLike) -> FloatArray:
    """Kernel matrix K[i, j] = k(a_i, b_j)."""
    return kernel_from_sq_distances(spec, sq_distances(as_points(a, "a"), as_points(b, "b")))


def log_gram(spec: KernelSpec, a: npt.ArrayLike, b: npt.ArrayLike) -> FloatArray:
    return log_kernel_from_sq_distances(
        spec, sq_distances(as_points(a, "a"), as_points(b, "b"))
    )


@dataclass(frozen=True, slots=True)
class KernelMean:
    """Mean kernel value per query point, linear and log scale."""

    value: FloatArray
    log_value: FloatArray


def mean_kernel_rows(
    spec: KernelSpec, queries: FloatArray, sample: FloatArray
) -> KernelMean:
    n = sample.shape[0]
    if n < 1:
        raise InvalidInputError("mean kernel over an empty sample")
    d2 = sq_distances(queries, sample)
    if spec.family is KernelFamily.GAUSSIAN:
        log_value = logsumexp(-spec.gamma * d2, axis=1) - math.log(n)
        value = np.exp(log_value)
    else:
        value = np.mean(spec.gamma / (spec.gamma + d2), axis=1)
        log_value = np.log(value)
    return KernelMean(value=np.asarray(value), log_value=np.asarray(log_value))


def mean_kernel(spec: KernelSpec, z: npt.ArrayLike, sample: npt.ArrayLike) -> float:
    """(1/n) * sum_i k(z, x_i)."""
    return float(_mean_for_point(spec, z, sample).value[0])


def log_mean_kernel(spec: KernelSpec, z: npt.ArrayLike, sample: npt.ArrayLike) -> float:
    """log of ``mean_kernel``; finite even where the linear value underflows."""
    return float(_mean_for_point(spec, z, sample).log_value[0])


def _mean_for_point(spec: KernelSpec, z: npt.ArrayLike, sample: npt.ArrayLike) -> KernelMean:
    point = as_point(z, "z")
    rows = as_points(sample, "sample", dim=point.shape[0])
    if rows.shape[0] < 1:
        raise InvalidInputError("mean kernel over an empty sample")
    return mean_kernel_rows(spec, point.reshape(1, -1), rows)
