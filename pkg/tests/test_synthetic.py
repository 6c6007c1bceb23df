from __future__ import annotations

import math

import numpy as np
import pytest

from pywmmd.data.synthetic import (
    GAUSSIAN_SHIFT,
    SyntheticKind,
    gen_gaussian_pair,
    gen_two_moons,
    generate,
    synthetic_pu,
    two_moons_center,
)
from pywmmd.domain.types import RngStream
from pywmmd.errors import InvalidInputError


def test_gaussian_class_moments() -> None:
    data = gen_gaussian_pair(20_000, 0.5, RngStream(0))
    assert data.positive_fraction == pytest.approx(0.5, abs=0.02)
    pos = data.features[data.labels == 1]
    neg = data.features[data.labels == -1]
    np.testing.assert_allclose(pos.mean(axis=0), [GAUSSIAN_SHIFT] * 2, atol=0.05)
    np.testing.assert_allclose(neg.mean(axis=0), [-GAUSSIAN_SHIFT] * 2, atol=0.05)
    np.testing.assert_allclose(pos.var(axis=0), [1.0, 1.0], atol=0.05)
    assert GAUSSIAN_SHIFT == pytest.approx(1.0 / math.sqrt(2.0))


def test_label_fraction_follows_prior() -> None:
    data = gen_gaussian_pair(10_000, 0.2, RngStream(1))
    assert data.positive_fraction == pytest.approx(0.2, abs=0.02)


def test_two_moons_centers() -> None:
    centers = two_moons_center([1, -1, 1], [0.0, 0.0, 1.0])
    np.testing.assert_allclose(centers, [[0.0, 2.0], [4.0, 0.0], [8.0, 2.0]], atol=1e-12)


def test_two_moons_noise_level() -> None:
    data = gen_two_moons(5_000, 0.5, RngStream(2), noise=1e-9)
    pos = data.features[data.labels == 1]
    # noiseless positives lie on the circle of radius 4 around (4, 2)
    radius = np.hypot(pos[:, 0] - 4.0, pos[:, 1] - 2.0)
    np.testing.assert_allclose(radius, 4.0, atol=1e-6)


def test_generators_are_deterministic_per_stream() -> None:
    a = generate(SyntheticKind.TWO_MOONS, 100, 0.4, RngStream(7, 3))
    b = generate(SyntheticKind.TWO_MOONS, 100, 0.4, RngStream(7, 3))
    c = generate(SyntheticKind.TWO_MOONS, 100, 0.4, RngStream(7, 4))
    np.testing.assert_array_equal(a.features, b.features)
    np.testing.assert_array_equal(a.labels, b.labels)
    assert not np.array_equal(a.features, c.features)


def test_synthetic_pu_shapes_and_positive_sample() -> None:
    sample = synthetic_pu(SyntheticKind.GAUSSIAN, 2_000, 300, 400, 0.3, RngStream(5))
    assert (sample.pu.n_p, sample.pu.n_u, sample.pu.dim) == (2_000, 300, 2)
    assert len(sample.test) == 400
    assert sample.pu.pi_plus == 0.3
    assert sample.hidden_labels.shape == (300,)
    np.testing.assert_allclose(sample.pu.positives.mean(axis=0), [GAUSSIAN_SHIFT] * 2, atol=0.1)


def test_generator_argument_validation() -> None:
    with pytest.raises(InvalidInputError):
        gen_gaussian_pair(0, 0.5, RngStream(0))
    with pytest.raises(InvalidInputError):
        gen_two_moons(10, 1.0, RngStream(0))
    with pytest.raises(InvalidInputError):
        synthetic_pu(SyntheticKind.GAUSSIAN, 10, 0, 10, 0.5, RngStream(0))
    with pytest.raises(InvalidInputError):
        RngStream(-1)
