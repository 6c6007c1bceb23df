from .experiment import (
    ExperimentPlan,
    ExperimentReport,
    RepResult,
    Summary,
    run_experiment,
)
from .metrics import accuracy, auc, bayes_accuracy_gaussian, two_sample_t

__all__ = [
    "ExperimentPlan",
    "ExperimentReport",
    "RepResult",
    "Summary",
    "accuracy",
    "auc",
    "bayes_accuracy_gaussian",
    "run_experiment",
    "two_sample_t",
]
