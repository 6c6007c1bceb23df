from __future__ import annotations

import math

import numpy as np
import pytest

from pywmmd.core.kernel import gram
from pywmmd.core.wmmd import (
    WmmdModel,
    classify,
    empirical_hinge_risk,
    empirical_wipm_and_optimizer_values,
    hinge_loss,
    wmmd_score,
    wmmd_value,
)
from pywmmd.domain.types import KernelFamily, KernelSpec, PriorSource, PUDataset
from pywmmd.errors import DegenerateWitnessError, InvalidInputError
from utils import brute_wmmd, random_pu

GAUSS = KernelSpec(KernelFamily.GAUSSIAN, 1.0)


def _random_instance(seed: int) -> tuple[PUDataset, KernelSpec, float]:
    gen = np.random.default_rng(seed)
    dim = int(gen.integers(1, 6))
    data = PUDataset(
        positives=gen.normal(0.3, 1.0, size=(int(gen.integers(1, 51)), dim)),
        unlabeled=gen.normal(0.0, 1.2, size=(int(gen.integers(1, 51)), dim)),
    )
    spec = KernelSpec(KernelFamily.GAUSSIAN, float(gen.uniform(0.05, 2.0)))
    return data, spec, float(gen.uniform(0.05, 0.95))


def test_score_hand_example() -> None:
    data = PUDataset(positives=[[0.0]], unlabeled=[[0.0], [2.0]], pi_plus=0.5)
    model = WmmdModel.fit(data, GAUSS)
    expected = 2.0 / (1.0 + math.exp(-4.0))
    assert wmmd_score(model, [0.0]) == pytest.approx(expected, rel=1e-12)
    assert wmmd_score(model, [0.0]) == pytest.approx(1.96403, abs=1e-5)
    assert classify(model, [0.0]) == 1


def test_identical_samples_tie_goes_negative() -> None:
    data = PUDataset(positives=[[1.0, 2.0]], unlabeled=[[1.0, 2.0]], pi_plus=0.5)
    model = WmmdModel.fit(data, GAUSS)
    assert wmmd_score(model, [0.3, -0.4]) == 1.0
    assert model.threshold == 1.0
    assert classify(model, [0.3, -0.4]) == -1


def test_threshold_follows_prior() -> None:
    data = random_pu(1)
    model = WmmdModel.fit(data, GAUSS, threshold_prior=0.25)
    assert model.threshold == 2.0
    z = np.array([[0.1, 0.2]])
    score = model.score(z)[0]
    assert model.classify(z)[0] == (1 if score > 2.0 else -1)


def test_score_does_not_depend_on_prior() -> None:
    data = random_pu(2)
    queries = np.random.default_rng(0).normal(size=(50, 2))
    scores = [
        WmmdModel.fit(data, GAUSS, threshold_prior=pi).score(queries) for pi in (0.1, 0.5, 0.9)
    ]
    np.testing.assert_array_equal(scores[0], scores[1])
    np.testing.assert_array_equal(scores[0], scores[2])


def test_with_prior_keeps_sample_and_records_source() -> None:
    model = WmmdModel.fit(random_pu(3), GAUSS, threshold_prior=0.5)
    moved = model.with_prior(0.3, PriorSource.DENSITY_BASED)
    assert moved.threshold_prior == 0.3
    assert moved.prior_source is PriorSource.DENSITY_BASED
    assert moved.train_positives is model.train_positives


def test_fit_without_prior_is_rejected() -> None:
    with pytest.raises(InvalidInputError, match="threshold prior"):
        WmmdModel.fit(random_pu(4), GAUSS)


def test_far_query_has_finite_log_score() -> None:
    data = PUDataset(positives=[[0.0]], unlabeled=[[0.0], [1.0]], pi_plus=0.5)
    model = WmmdModel.fit(data, GAUSS)
    log_score = model.log_score([[50.0]])[0]
    assert math.isfinite(log_score)
    assert log_score < 0.0
    assert model.classify([[50.0]])[0] == -1


def test_inverse_kernel_score_is_direct_ratio() -> None:
    spec = KernelSpec(KernelFamily.INVERSE, 1.0)
    data = PUDataset(positives=[[0.0]], unlabeled=[[0.0], [1.0]], pi_plus=0.5)
    model = WmmdModel.fit(data, spec)
    assert wmmd_score(model, [0.0]) == pytest.approx(1.0 / 0.75, rel=1e-12)


@pytest.mark.parametrize("family", [KernelFamily.GAUSSIAN, KernelFamily.INVERSE])
def test_classify_thresholds_the_exponentiated_log_score(family: KernelFamily) -> None:
    gen = np.random.default_rng(9)
    data = random_pu(4)
    model = WmmdModel.fit(data, KernelSpec(family, 0.7), threshold_prior=0.3)
    queries = gen.normal(size=(50, data.dim))
    np.testing.assert_array_equal(model.score(queries), np.exp(model.log_score(queries)))
    assert model.threshold == pytest.approx(1.0 / 0.6)
    expected = np.where(np.exp(model.log_score(queries)) > model.threshold, 1, -1)
    np.testing.assert_array_equal(model.classify(queries), expected)


def test_wmmd_value_matches_brute_force() -> None:
    gen = np.random.default_rng(21)
    for _ in range(200):
        dim = int(gen.integers(1, 4))
        p = gen.normal(size=(int(gen.integers(1, 8)), dim))
        q = gen.normal(0.5, 1.0, size=(int(gen.integers(1, 8)), dim))
        w = float(gen.uniform(0.0, 2.0))
        r = float(gen.uniform(0.5, 2.0))
        gamma = float(gen.uniform(0.1, 2.0))
        got = wmmd_value(p, q, w, r, KernelSpec(KernelFamily.GAUSSIAN, gamma))
        assert got == pytest.approx(brute_wmmd(p, q, w, r, gamma), rel=1e-12, abs=1e-12)


def test_wmmd_value_special_cases() -> None:
    p = np.random.default_rng(0).normal(size=(6, 2))
    assert wmmd_value(p, p, 1.0, 1.0, GAUSS) == 0.0
    expected = math.sqrt(float(np.mean(gram(GAUSS, p, p))))
    q = np.zeros((3, 2))
    assert wmmd_value(p, q, 0.0, 1.0, GAUSS) == pytest.approx(expected, rel=1e-12)
    with pytest.raises(InvalidInputError):
        wmmd_value(p, q, -1.0, 1.0, GAUSS)
    with pytest.raises(InvalidInputError):
        wmmd_value(p, q, 1.0, 0.0, GAUSS)


def test_minimal_hinge_risk_equals_one_minus_wmmd() -> None:
    for seed in range(100):
        data, spec, pi = _random_instance(seed)
        points = np.vstack([data.positives, data.unlabeled])
        wv = empirical_wipm_and_optimizer_values(data, 2.0 * pi, 1.0, spec, points)
        f = -wv.g_hat
        risk = empirical_hinge_risk(f[: data.n_p], f[data.n_p :], pi)
        assert abs(risk - (1.0 - wv.value)) < 1e-10


def test_witness_attains_the_wmmd_value() -> None:
    for seed in range(30):
        data, spec, pi = _random_instance(seed)
        w = 2.0 * pi
        points = np.vstack([data.positives, data.unlabeled])
        wv = empirical_wipm_and_optimizer_values(data, w, 1.0, spec, points)
        g_p, g_u = wv.g_hat[: data.n_p], wv.g_hat[data.n_p :]
        assert float(np.mean(g_u) - w * np.mean(g_p)) == pytest.approx(wv.value, abs=1e-10)
        assert np.all(np.abs(wv.g_hat) <= 1.0 + 1e-9)


def test_no_unit_ball_function_beats_the_witness() -> None:
    gen = np.random.default_rng(99)
    for seed in range(30):
        data, spec, pi = _random_instance(seed)
        w = 2.0 * pi
        value = wmmd_value(data.unlabeled, data.positives, w, 1.0, spec)
        centers = gen.normal(size=(4, data.dim))
        coef = gen.normal(size=4)
        norm = math.sqrt(float(coef @ gram(spec, centers, centers) @ coef))
        f_u = gram(spec, data.unlabeled, centers) @ coef / norm
        f_p = gram(spec, data.positives, centers) @ coef / norm
        assert abs(float(np.mean(f_u) - w * np.mean(f_p))) <= value + 1e-10


def test_classifier_agrees_with_negated_witness() -> None:
    gen = np.random.default_rng(7)
    for seed in range(100):
        data, spec, pi = _random_instance(seed)
        queries = gen.normal(size=(20, data.dim))
        model = WmmdModel.fit(data, spec, threshold_prior=pi)
        g_hat = empirical_wipm_and_optimizer_values(data, 2.0 * pi, 1.0, spec, queries).g_hat
        clear = np.abs(g_hat) > 1e-9
        expected = np.where(-g_hat > 0, 1, -1)
        np.testing.assert_array_equal(model.classify(queries)[clear], expected[clear])


def test_swapping_the_measures_negates_the_witness() -> None:
    gen = np.random.default_rng(8)
    for seed in range(100):
        data, spec, pi = _random_instance(seed)
        queries = gen.normal(size=(20, data.dim))
        w = 2.0 * pi
        swapped = PUDataset(positives=data.unlabeled, unlabeled=data.positives)
        a = empirical_wipm_and_optimizer_values(data, w, 1.0, spec, queries)
        # (X_p, X_u / w) is (X_u, w X_p) scaled by 1 / w
        b = empirical_wipm_and_optimizer_values(swapped, 1.0 / w, 1.0, spec, queries)
        np.testing.assert_allclose(b.g_hat, -a.g_hat, rtol=1e-10, atol=1e-12)
        assert b.value * w == pytest.approx(a.value, rel=1e-10)


def test_degenerate_witness_is_reported() -> None:
    data = PUDataset(positives=[[0.5, 0.5]], unlabeled=[[0.5, 0.5]])
    with pytest.raises(DegenerateWitnessError):
        empirical_wipm_and_optimizer_values(data, 1.0, 1.0, GAUSS, [[0.0, 0.0]])


def test_witness_without_positive_weight_is_positive_on_unlabeled() -> None:
    data = random_pu(6)
    wv = empirical_wipm_and_optimizer_values(data, 0.0, 1.0, GAUSS, data.unlabeled)
    assert np.all(wv.g_hat > 0.0)


def test_hinge_risk_examples() -> None:
    assert empirical_hinge_risk([0.0, 0.0], [0.0, 0.0, 0.0], 0.3) == 1.0
    assert empirical_hinge_risk([1.0], [1.0, 1.0], 0.3) == pytest.approx(1.4, abs=1e-12)
    assert empirical_hinge_risk([-1.0], [-1.0], 0.3) == pytest.approx(0.6, abs=1e-12)
    with pytest.raises(InvalidInputError, match="sup-norm"):
        empirical_hinge_risk([1.5], [0.0], 0.3)
    np.testing.assert_array_equal(hinge_loss([-1.0, 0.0, 2.0]), [2.0, 1.0, 0.0])
