"""JSON model files.

Every file carries ``format``, ``version`` and ``type``; the remaining keys
depend on the type:

- ``wmmd``: kernel, threshold_prior, prior_source, and either the embedded
  ``positives``/``unlabeled`` samples or a ``training_file`` reference
  (a PU LIBSVM file, re-read on load).
- ``log`` / ``dh``: kernel, lam, b, alpha, centers.
- ``tadj``: weights, bias, c, reg_c.

An optional ``selection`` list records the grid-search table.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from pywmmd.baselines.losses import LossKind
from pywmmd.baselines.rbf import RbfExpansionModel
from pywmmd.baselines.tadj import LogisticFit, TadjModel
from pywmmd.core.model_select import GridRow
from pywmmd.core.wmmd import WmmdModel
from pywmmd.data.libsvm import parse_pu_libsvm
from pywmmd.domain.types import KernelFamily, KernelSpec, PriorSource
from pywmmd.errors import InvalidInputError
from pywmmd.persistence.atomic import atomic_text_output

MODEL_FORMAT = "pywmmd-model"
MODEL_VERSION = 1

Model = WmmdModel | RbfExpansionModel | TadjModel


@dataclass(frozen=True, slots=True)
class TrainingReference:
    """Path of the PU training file a WMMD model was fitted on."""

    path: Path
    n_features: int


def _kernel_to_dict(kernel: KernelSpec) -> dict[str, Any]:
    return {"family": kernel.family.value, "gamma": kernel.gamma}


def _kernel_from_dict(d: dict[str, Any]) -> KernelSpec:
    return KernelSpec(KernelFamily(d["family"]), float(d["gamma"]))


def model_to_dict(
    model: Model,
    reference: TrainingReference | None = None,
    selection: Sequence[GridRow] = (),
) -> dict[str, Any]:
    d: dict[str, Any] = {"format": MODEL_FORMAT, "version": MODEL_VERSION}
    if isinstance(model, WmmdModel):
        d |= {
            "type": "wmmd",
            "kernel": _kernel_to_dict(model.kernel),
            "threshold_prior": model.threshold_prior,
            "prior_source": model.prior_source.value,
        }
        if reference is not None:
            d |= {"training_file": str(reference.path), "n_features": reference.n_features}
        else:
            d |= {
                "positives": model.train_positives.tolist(),
                "unlabeled": model.train_unlabeled.tolist(),
            }
    elif isinstance(model, RbfExpansionModel):
        d |= {
            "type": model.loss.value,
            "kernel": _kernel_to_dict(model.kernel),
            "lam": model.lam,
            "b": model.b,
            "alpha": model.alpha.tolist(),
            "centers": model.centers.tolist(),
        }
    elif isinstance(model, TadjModel):
        d |= {
            "type": "tadj",
            "weights": model.fit.weights.tolist(),
            "bias": model.fit.bias,
            "c": model.c,
            "reg_c": model.reg_c,
        }
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    if selection:
        d["selection"] = [
            {"gamma": row.gamma, "risk": row.risk, "pi_hat": row.pi_hat} for row in selection
        ]
    return d


def model_from_dict(d: dict[str, Any], base_dir: Path | None = None) -> Model:
    if d.get("format") != MODEL_FORMAT:
        raise InvalidInputError("not a pywmmd model file")
    if d.get("version") != MODEL_VERSION:
        raise InvalidInputError(f"unsupported model version {d.get('version')!r}")
    t = d.get("type")
    try:
        if t == "wmmd":
            if "training_file" in d:
                path = Path(d["training_file"])
                if not path.is_absolute() and base_dir is not None:
                    path = base_dir / path
                with path.open(encoding="utf-8") as f:
                    data = parse_pu_libsvm(f, n_features=int(d["n_features"]))
                positives, unlabeled = data.positives, data.unlabeled
            else:
                positives = np.asarray(d["positives"], dtype=np.float64)
                unlabeled = np.asarray(d["unlabeled"], dtype=np.float64)
            return WmmdModel(
                kernel=_kernel_from_dict(d["kernel"]),
                train_positives=positives,
                train_unlabeled=unlabeled,
                threshold_prior=float(d["threshold_prior"]),
                prior_source=PriorSource(d["prior_source"]),
            )
        elif t in (LossKind.LOG.value, LossKind.DH.value):
            return RbfExpansionModel(
                kernel=_kernel_from_dict(d["kernel"]),
                centers=np.asarray(d["centers"], dtype=np.float64),
                alpha=np.asarray(d["alpha"], dtype=np.float64),
                b=float(d["b"]),
                lam=float(d["lam"]),
                loss=LossKind(t),
            )
        elif t == "tadj":
            fit = LogisticFit(
                weights=np.asarray(d["weights"], dtype=np.float64),
                bias=float(d["bias"]),
                epochs=0,
            )
            return TadjModel(fit=fit, c=float(d["c"]), reg_c=float(d["reg_c"]))
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed {t} model file: {exc}") from exc
    raise InvalidInputError(f"unknown model type {t!r}")


class ModelStore:
    def save(
        self,
        model: Model,
        reference: TrainingReference | None = None,
        selection: Sequence[GridRow] = (),
    ) -> None:
        raise NotImplementedError

    def load(self) -> Model:
        raise NotImplementedError


class JsonModelStore(ModelStore):
    def __init__(self, path: Path) -> None:
        self.path = Path(path)

    def save(
        self,
        model: Model,
        reference: TrainingReference | None = None,
        selection: Sequence[GridRow] = (),
    ) -> None:
        d = model_to_dict(model, reference, selection)
        with atomic_text_output(self.path) as f:
            json.dump(d, f, indent=1)
            f.write("\n")

    def load(self) -> Model:
        with self.path.open(encoding="utf-8") as f:
            try:
                d = json.load(f)
            except json.JSONDecodeError as exc:
                raise InvalidInputError(f"{self.path}: invalid JSON ({exc})") from exc
        return model_from_dict(d, base_dir=self.path.parent)
