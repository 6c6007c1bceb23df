from .types import (
    Classifier,
    FloatArray,
    KernelFamily,
    KernelSpec,
    LabelArray,
    LabeledDataset,
    Method,
    PriorSource,
    PUDataset,
    RngStream,
)

__all__ = [
    "Classifier",
    "FloatArray",
    "KernelFamily",
    "KernelSpec",
    "LabelArray",
    "LabeledDataset",
    "Method",
    "PUDataset",
    "PriorSource",
    "RngStream",
]
