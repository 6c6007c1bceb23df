from .kernel import eval_kernel, gram, log_mean_kernel, mean_kernel
from .model_select import (
    GridSearchResult,
    SelectionConfig,
    estimate_prior,
    grid_search,
    pu_split,
    validation_risk,
)
from .wmmd import (
    WmmdModel,
    classify,
    empirical_hinge_risk,
    empirical_wipm_and_optimizer_values,
    wmmd_score,
    wmmd_value,
)

__all__ = [
    "GridSearchResult",
    "SelectionConfig",
    "WmmdModel",
    "classify",
    "empirical_hinge_risk",
    "empirical_wipm_and_optimizer_values",
    "estimate_prior",
    "eval_kernel",
    "gram",
    "grid_search",
    "log_mean_kernel",
    "mean_kernel",
    "pu_split",
    "validation_risk",
    "wmmd_score",
    "wmmd_value",
]
