from __future__ import annotations

import math

import numpy as np
import pytest
from scipy.special import logit

from pywmmd.baselines.losses import (
    LossKind,
    loss_double_hinge,
    loss_double_hinge_grad,
    loss_logistic,
    loss_logistic_grad,
)
from pywmmd.baselines.rbf import (
    TrainSchedule,
    check_scale,
    fit_log_dh,
    pu_objective,
    pu_objective_grad,
)
from pywmmd.baselines.tadj import (
    MIN_CALIBRATION,
    LogisticFit,
    TadjConfig,
    TadjModel,
    calibration_constant,
    fit_logistic,
    fit_tadj,
    intercept_only,
    logistic_objective,
    select_c,
)
from pywmmd.core.kernel import gram
from pywmmd.core.model_select import SelectionConfig, pu_split
from pywmmd.domain.types import KernelFamily, KernelSpec, PUDataset, RngStream
from pywmmd.errors import DivergenceError, InvalidInputError, ScaleCapError
from pywmmd.eval.metrics import auc
from utils import gaussian_sample, random_pu

SMALL_SCHEDULE = TrainSchedule(lambda_grid=(0.1, 0.01), gamma_grid=(1.0, 0.2), epochs=30)


def test_loss_values() -> None:
    assert loss_logistic(0.0) == pytest.approx(math.log(2.0))
    assert loss_double_hinge(0.0) == 0.5
    assert loss_double_hinge(-1.0) == 1.0
    assert loss_double_hinge(1.0) == 0.0
    assert loss_double_hinge(3.0) == 0.0
    assert loss_double_hinge(-3.0) == 3.0


def test_losses_are_linear_odd() -> None:
    z = np.linspace(-10.0, 10.0, 2001)
    for loss in (loss_logistic, loss_double_hinge):
        np.testing.assert_allclose(loss(z) - loss(-z), -z, atol=1e-12)


def test_loss_derivatives() -> None:
    np.testing.assert_allclose(loss_logistic_grad([0.0]), [-0.5])
    np.testing.assert_array_equal(loss_double_hinge_grad([-2.0, 0.0, 2.0]), [-1.0, -0.5, 0.0])
    assert loss_logistic(-800.0) == pytest.approx(800.0)


def _basis(seed: int) -> tuple[np.ndarray, np.ndarray, float, float]:
    gen = np.random.default_rng(seed)
    spec = KernelSpec(KernelFamily.GAUSSIAN, float(gen.uniform(0.2, 1.0)))
    centers = gen.normal(size=(5, 2))
    phi_p = gram(spec, gen.normal(size=(int(gen.integers(2, 7)), 2)), centers)
    phi_u = gram(spec, gen.normal(size=(int(gen.integers(3, 9)), 2)), centers)
    return phi_p, phi_u, float(gen.uniform(0.1, 0.9)), float(gen.uniform(0.01, 1.0))


def test_objective_at_zero_is_log_two() -> None:
    phi_p, phi_u, pi, lam = _basis(0)
    assert pu_objective(np.zeros(5), 0.0, phi_p, phi_u, pi, lam, LossKind.LOG) == pytest.approx(
        math.log(2.0)
    )


def _numeric_grad(
    alpha: np.ndarray, b: float, args: tuple[np.ndarray, np.ndarray, float, float, LossKind]
) -> np.ndarray:
    h = 1e-5
    grad = np.empty(alpha.size + 1)
    for i in range(alpha.size + 1):
        step = np.zeros(alpha.size + 1)
        step[i] = h
        up = pu_objective(alpha + step[:-1], b + step[-1], *args)
        down = pu_objective(alpha - step[:-1], b - step[-1], *args)
        grad[i] = (up - down) / (2.0 * h)
    return grad


@pytest.mark.parametrize("loss", [LossKind.LOG, LossKind.DH])
def test_gradient_matches_finite_differences(loss: LossKind) -> None:
    checked = 0
    for seed in range(50):
        phi_p, phi_u, pi, lam = _basis(seed)
        gen = np.random.default_rng(1000 + seed)
        alpha = gen.normal(size=5)
        b = float(gen.normal())
        if loss is LossKind.DH:
            z = -(phi_u @ alpha) - b
            if np.any(np.abs(np.abs(z) - 1.0) < 1e-3):
                continue
        args = (phi_p, phi_u, pi, lam, loss)
        grad_alpha, grad_b = pu_objective_grad(alpha, b, *args)
        analytic = np.append(grad_alpha, grad_b)
        numeric = _numeric_grad(alpha, b, args)
        assert np.linalg.norm(numeric - analytic) <= 1e-5 * max(1.0, np.linalg.norm(analytic))
        checked += 1
    assert checked >= 40


def test_small_gradient_step_decreases_objective() -> None:
    phi_p, phi_u, pi, lam = _basis(3)
    args = (phi_p, phi_u, pi, lam, LossKind.LOG)
    grad_alpha, grad_b = pu_objective_grad(np.zeros(5), 0.0, *args)
    after = pu_objective(-1e-3 * grad_alpha, -1e-3 * grad_b, *args)
    assert after < pu_objective(np.zeros(5), 0.0, *args)


@pytest.mark.parametrize("loss", [LossKind.LOG, LossKind.DH])
def test_fit_never_ends_above_the_zero_start(loss: LossKind) -> None:
    data = gaussian_sample(n_p=30, n_u=60, seed=1).pu
    split = pu_split(data, SelectionConfig(), np.random.default_rng(0))
    model = fit_log_dh(data, loss, SMALL_SCHEDULE, split=split)
    assert model.lam in SMALL_SCHEDULE.lambda_grid
    assert model.gamma in SMALL_SCHEDULE.gamma_grid
    assert model.centers.shape == (24 + 48, 2)
    phi_p = gram(model.kernel, split.train.positives, model.centers)
    phi_u = gram(model.kernel, split.train.unlabeled, model.centers)
    zero = pu_objective(np.zeros(72), 0.0, phi_p, phi_u, 0.5, model.lam, loss)
    final = pu_objective(model.alpha, model.b, phi_p, phi_u, 0.5, model.lam, loss)
    assert final <= zero
    preds = model.classify(np.zeros((3, 2)))
    assert set(preds.tolist()) <= {-1, 1}


def test_well_conditioned_descent_keeps_the_scheduled_rate() -> None:
    # 72 centers, logistic curvature <= 1/4: the gradient is Lipschitz below 2 / 0.05
    data = gaussian_sample(n_p=30, n_u=60, seed=1).pu
    split = pu_split(data, SelectionConfig(), np.random.default_rng(0))
    sched = TrainSchedule(
        learning_rate=0.05, lambda_grid=(0.1,), gamma_grid=(1.0,), epochs=40, patience=40
    )
    model = fit_log_dh(data, LossKind.LOG, sched, split=split)
    assert len(model.step_sizes) == 40
    assert set(model.step_sizes) == {0.05}


def test_parallel_grid_matches_sequential() -> None:
    data = gaussian_sample(n_p=20, n_u=40, seed=2).pu
    seq = fit_log_dh(data, LossKind.LOG, SMALL_SCHEDULE, rng=RngStream(1))
    par_schedule = TrainSchedule(
        lambda_grid=(0.1, 0.01), gamma_grid=(1.0, 0.2), epochs=30, workers=3
    )
    par = fit_log_dh(data, LossKind.LOG, par_schedule, rng=RngStream(1))
    assert (seq.lam, seq.gamma, seq.b) == (par.lam, par.gamma, par.b)
    np.testing.assert_array_equal(seq.alpha, par.alpha)


def test_scale_cap() -> None:
    with pytest.raises(ScaleCapError, match="5001"):
        check_scale(random_pu(0, n_p=10, n_u=4_991, dim=1, pi_plus=0.5), TrainSchedule())
    data = random_pu(0, n_p=6, n_u=6, pi_plus=0.5)
    with pytest.raises(ScaleCapError):
        fit_log_dh(data, LossKind.DH, TrainSchedule(max_centers=10))


def test_diverging_descent_is_reported() -> None:
    data = random_pu(1, n_p=10, n_u=20, pi_plus=0.5)
    sched = TrainSchedule(learning_rate=1e300, lambda_grid=(1.0,), gamma_grid=(1.0,))
    with pytest.raises(DivergenceError, match="learning rate"):
        fit_log_dh(data, LossKind.LOG, sched)


def test_fit_needs_a_prior() -> None:
    with pytest.raises(InvalidInputError, match="class-prior"):
        fit_log_dh(random_pu(2), LossKind.LOG, SMALL_SCHEDULE)


def test_calibration_constant() -> None:
    assert calibration_constant([0.8, 0.6]) == pytest.approx(0.7)
    assert calibration_constant([0.0, 0.0]) == MIN_CALIBRATION
    with pytest.raises(InvalidInputError):
        calibration_constant([])


def test_tadj_score_is_calibrated_probability() -> None:
    fit = LogisticFit(weights=np.zeros(2), bias=float(logit(0.7)), epochs=0)
    model = TadjModel(fit=fit, c=0.7, reg_c=1.0)
    np.testing.assert_allclose(model.score([[3.0, -1.0]]), [1.0])
    assert model.classify([[3.0, -1.0]])[0] == 1
    with pytest.raises(InvalidInputError):
        TadjModel(fit=fit, c=0.0, reg_c=1.0)


def test_logistic_descent_lowers_the_objective() -> None:
    gen = np.random.default_rng(4)
    x = gen.normal(size=(80, 2))
    s = (x[:, 0] + 0.3 * gen.normal(size=80) > 0).astype(np.float64)
    fit = fit_logistic(x, s, 1.0, TadjConfig())
    assert logistic_objective(fit.weights, fit.bias, x, s, 1.0) < math.log(2.0)
    assert fit.weights[0] > 0


def test_logistic_descent_starts_at_the_intercept_only_optimum() -> None:
    s = np.array([1.0, 0.0, 0.0, 0.0] * 5)
    start = intercept_only(s, 3)
    assert start.bias == pytest.approx(float(logit(0.25)))
    np.testing.assert_array_equal(start.weights, np.zeros(3))
    # no signal in x: the intercept-only start is already optimal
    fit = fit_logistic(np.zeros((20, 3)), s, 1.0, TadjConfig(tol=1e-12))
    assert fit.epochs == 1
    assert fit.bias == pytest.approx(start.bias, abs=1e-12)


def test_warm_started_logistic_descent_stops_early() -> None:
    gen = np.random.default_rng(7)
    x = gen.normal(size=(80, 2))
    s = (x[:, 0] + gen.normal(size=80) > 0).astype(np.float64)
    converged = fit_logistic(x, s, 1.0, TadjConfig(epochs=5000, learning_rate=0.5))
    assert converged.epochs < 5000
    again = fit_logistic(x, s, 1.0, TadjConfig(), init=converged)
    assert again.epochs <= 5
    np.testing.assert_allclose(again.weights, converged.weights, atol=1e-4)


def test_select_c_scores_every_candidate() -> None:
    gen = np.random.default_rng(5)
    x = gen.normal(size=(60, 2))
    s = (x[:, 1] > 0).astype(np.float64)
    cfg = TadjConfig(c_grid=(0.01, 1.0), epochs=50)
    best, scores = select_c(x, s, cfg, gen)
    assert set(scores) == {0.01, 1.0}
    assert scores[best] == min(scores.values())


def test_tadj_ranks_gaussian_test_points() -> None:
    sample = gaussian_sample(seed=6)
    model = fit_tadj(sample.pu, TadjConfig(epochs=200), rng=RngStream(6))
    test = sample.test.features
    assert auc(model.score(test), sample.test.labels) > 0.8
    assert auc(model.score(test), sample.test.labels) == auc(
        model.labeled_proba(test), sample.test.labels
    )
    assert model.reg_c in TadjConfig().c_grid


def test_tadj_needs_two_rows_per_sample() -> None:
    data = PUDataset(positives=[[0.0]], unlabeled=[[1.0], [2.0]])
    with pytest.raises(InvalidInputError):
        fit_tadj(data)
