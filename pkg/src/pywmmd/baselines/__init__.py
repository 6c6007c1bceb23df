from .losses import (
    LossKind,
    loss_double_hinge,
    loss_double_hinge_grad,
    loss_logistic,
    loss_logistic_grad,
)
from .rbf import (
    RbfExpansionModel,
    TrainSchedule,
    fit_log_dh,
    pu_objective,
    pu_objective_grad,
)
from .tadj import TadjConfig, TadjModel, calibration_constant, fit_tadj

__all__ = [
    "LossKind",
    "RbfExpansionModel",
    "TadjConfig",
    "TadjModel",
    "TrainSchedule",
    "calibration_constant",
    "fit_log_dh",
    "fit_tadj",
    "loss_double_hinge",
    "loss_double_hinge_grad",
    "loss_logistic",
    "loss_logistic_grad",
    "pu_objective",
    "pu_objective_grad",
]
