from __future__ import annotations

from pywmmd.core.model_select import SelectionConfig, grid_search
from pywmmd.data.synthetic import SyntheticKind, synthetic_pu
from pywmmd.domain.types import RngStream
from pywmmd.eval.metrics import accuracy, auc, bayes_accuracy_gaussian


def main() -> None:
    sample = synthetic_pu(SyntheticKind.GAUSSIAN, 100, 400, 1000, 0.5, RngStream(0))
    model = grid_search(sample.pu, SelectionConfig()).best
    test = sample.test
    print(
        f"gamma={model.kernel.gamma:g} "
        f"accuracy={accuracy(model.classify(test.features), test.labels):.4f} "
        f"auc={auc(model.log_score(test.features), test.labels):.4f} "
        f"bayes={bayes_accuracy_gaussian(0.5):.4f}"
    )


if __name__ == "__main__":
    main()
