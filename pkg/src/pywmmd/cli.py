from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

import numpy as np
import pandas as pd
import structlog

from pywmmd.baselines.losses import LossKind
from pywmmd.baselines.rbf import TrainSchedule, check_scale, fit_log_dh
from pywmmd.baselines.tadj import TadjConfig, fit_tadj
from pywmmd.bench.tables import (
    N_U_GRID,
    PI_GRID,
    SweepAxis,
    SweepSpec,
    dataset_plan,
    moons_decision_surface,
    sweep,
    timing_table,
    write_table_csv,
)
from pywmmd.core.model_select import (
    DEFAULT_GAMMA_GRID,
    GridSearchResult,
    SelectionConfig,
    grid_search,
    pu_split,
)
from pywmmd.data.libsvm import (
    parse_libsvm,
    parse_pu_libsvm,
    read_libsvm_rows,
    serialize_libsvm,
    write_csv,
)
from pywmmd.data.synthetic import SyntheticKind, generate
from pywmmd.domain.types import KernelFamily, Method, PUDataset, RngStream
from pywmmd.errors import InvalidInputError, PUError
from pywmmd.eval.experiment import ExperimentPlan, ExperimentReport, run_experiment
from pywmmd.eval.metrics import two_sample_t
from pywmmd.persistence.atomic import atomic_text_output, atomic_text_outputs
from pywmmd.persistence.model_store import JsonModelStore, Model, TrainingReference
from pywmmd.persistence.report_store import report_frame, report_to_dict

logger = structlog.get_logger(__name__)

THREADS_ENV = "WMMD_PU_THREADS"


class UsageError(Exception):
    """Invalid flag combination detected after parsing; exits with status 2."""


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def method_list(text: str) -> tuple[Method, ...]:
    try:
        return tuple(Method(v.strip()) for v in text.split(",") if v.strip())
    except ValueError:
        choices = ",".join(m.value for m in Method)
        raise argparse.ArgumentTypeError(f"methods must be among {choices}") from None


def _grid_str(values: Sequence[float]) -> str:
    return ",".join(f"{v:g}" for v in values)


def _add_threads(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--threads",
        type=positive_int,
        default=os.cpu_count() or 1,
        help=f"worker threads ({THREADS_ENV} overrides)",
    )


def _add_selection(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--kernel",
        choices=[k.value for k in KernelFamily],
        default="gaussian",
        help="kernel family",
    )
    p.add_argument(
        "--gamma-grid",
        type=float_list,
        default=_grid_str(DEFAULT_GAMMA_GRID),
        help="kernel parameter candidates",
    )
    p.add_argument("--eta", type=float, default=0.1, help="prior estimation level")
    p.add_argument(
        "--split-fraction", type=float, default=0.8, help="training share of each sample"
    )
    p.add_argument("--seed", type=int, default=0, help="split seed")
    p.add_argument(
        "--n-features",
        type=positive_int,
        default=None,
        help="feature dimension (inferred from the file when omitted)",
    )


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="pywmmd", description="Closed-form WMMD positive-unlabeled learning."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    subs: dict[str, argparse.ArgumentParser] = {}

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text, description=help_text, formatter_class=fmt)
        p.add_argument(
            "--config", type=Path, default=None, help="JSON object of flag defaults"
        )
        subs[name] = p
        return p

    kinds = [k.value for k in SyntheticKind]
    families = [k.value for k in KernelFamily]

    p = add("generate", "draw a synthetic labeled dataset")
    p.add_argument("--kind", choices=kinds, default="gaussian", help="generator")
    p.add_argument("--n", type=positive_int, default=None, help="number of rows (required)")
    p.add_argument("--pi-plus", type=float, default=0.5, help="class-prior")
    p.add_argument("--seed", type=int, default=0, help="generator seed")
    p.add_argument("--format", choices=["libsvm", "csv"], default="libsvm", help="file format")
    p.add_argument("--out", type=Path, default=None, help="output file (required)")

    p = add("train", "fit a PU classifier on a LIBSVM file labeled +1 / 0")
    p.add_argument("--train", type=Path, default=None, help="training file (required)")
    p.add_argument(
        "--method", choices=[m.value for m in Method], default="wmmd", help="PU algorithm"
    )
    p.add_argument("--pi-plus", type=float, default=None, help="known class-prior")
    p.add_argument(
        "--estimate-prior",
        action="store_true",
        help="use the density-based class-prior estimate",
    )
    _add_selection(p)
    p.add_argument(
        "--lambda-grid",
        type=float_list,
        default=_grid_str(DEFAULT_GAMMA_GRID),
        help="LOG/DH penalty candidates",
    )
    p.add_argument("--learning-rate", type=float, default=0.1, help="LOG/DH step size")
    p.add_argument("--epochs", type=positive_int, default=100, help="LOG/DH epochs")
    p.add_argument(
        "--patience", type=positive_int, default=10, help="LOG/DH early-stopping patience"
    )
    p.add_argument(
        "--reference-training-file",
        action="store_true",
        help="store the training file path in the model instead of the samples",
    )
    p.add_argument("--model-out", type=Path, default=None, help="model file (required)")
    _add_threads(p)

    p = add("predict", "score a LIBSVM file with a saved model")
    p.add_argument("--model", type=Path, default=None, help="model file (required)")
    p.add_argument("--test", type=Path, default=None, help="test file (required)")
    p.add_argument(
        "--out", type=Path, default=None, help="CSV of score,prediction (required)"
    )

    p = add("estimate-prior", "print the density-based class-prior estimate as JSON")
    p.add_argument("--train", type=Path, default=None, help="training file (required)")
    _add_selection(p)
    _add_threads(p)

    p = add("bench", "run replicated experiments and write plot-ready CSV")
    p.add_argument(
        "--sweep",
        choices=["n_u", "pi_plus", "none", "surface", "timing"],
        default="n_u",
        help=(
            "swept axis; none runs one plan, surface the two-moons decision surface,"
            " timing the training-time comparison"
        ),
    )
    p.add_argument(
        "--methods", type=method_list, default="wmmd", help="comma-separated methods"
    )
    p.add_argument("--grid", type=float_list, default=None, help="sweep grid override")
    p.add_argument("--reps", type=positive_int, default=100, help="replications")
    p.add_argument("--seed", type=int, default=0, help="experiment seed")
    p.add_argument("--kind", choices=kinds, default="gaussian", help="synthetic generator")
    p.add_argument("--n-p", type=positive_int, default=100, help="positive sample size")
    p.add_argument("--n-u", type=positive_int, default=400, help="unlabeled sample size")
    p.add_argument("--n-te", type=positive_int, default=1000, help="test sample size")
    p.add_argument("--pi-plus", type=float, default=0.5, help="class-prior")
    p.add_argument(
        "--unknown-prior", action="store_true", help="estimate the class-prior"
    )
    p.add_argument(
        "--prior-free-selection",
        action="store_true",
        help="with --unknown-prior, select gamma at each candidate's estimated prior",
    )
    p.add_argument("--kernel", choices=families, default="gaussian", help="kernel family")
    p.add_argument(
        "--dataset", type=Path, default=None, help="labeled LIBSVM file to resample"
    )
    p.add_argument(
        "--protocol", default=None, help="dataset name selecting the resampling sizes"
    )
    p.add_argument(
        "--positive-labels",
        type=float_list,
        default="1",
        help="dataset labels mapped to +1",
    )
    p.add_argument(
        "--resolution", type=positive_int, default=60, help="decision-surface grid size"
    )
    p.add_argument("--out", type=Path, default=None, help="output CSV (required)")
    p.add_argument(
        "--report-json", type=Path, default=None, help="per-replication JSON report"
    )
    _add_threads(p)
    return parser, subs


def _apply_config(
    parser: argparse.ArgumentParser,
    subs: dict[str, argparse.ArgumentParser],
    argv: Sequence[str],
    args: argparse.Namespace,
) -> argparse.Namespace:
    if args.config is None:
        return args
    try:
        with args.config.open(encoding="utf-8") as f:
            values = json.load(f)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{args.config}: invalid JSON ({exc})") from exc
    if not isinstance(values, dict):
        raise UsageError(f"{args.config}: expected a JSON object")
    known = set(vars(args)) - {"command", "config"}
    unknown = sorted(set(values) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    subs[args.command].set_defaults(**values)
    return parser.parse_args(argv)


def _require(args: argparse.Namespace, *names: str) -> None:
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"missing required flag(s): {', '.join(missing)}")


def _threads(args: argparse.Namespace) -> int:
    env = os.getenv(THREADS_ENV)
    if env:
        try:
            return positive_int(env)
        except argparse.ArgumentTypeError as exc:
            raise UsageError(f"{THREADS_ENV}: {exc}") from exc
    return int(args.threads)


def _selection(args: argparse.Namespace, workers: int = 1) -> SelectionConfig:
    return SelectionConfig(
        gamma_grid=tuple(args.gamma_grid),
        split_fraction=args.split_fraction,
        eta=args.eta,
        seed=args.seed,
        workers=workers,
    )


def _read_pu(path: Path, n_features: int | None) -> PUDataset:
    with path.open(encoding="utf-8") as f:
        return parse_pu_libsvm(f, n_features=n_features)


def _log_selection(result: GridSearchResult) -> None:
    for row in result.table:
        logger.info("Selection candidate", gamma=row.gamma, risk=row.risk, pi_hat=row.pi_hat)


def cmd_generate(args: argparse.Namespace) -> int:
    _require(args, "n", "out")
    data = generate(SyntheticKind(args.kind), args.n, args.pi_plus, RngStream(args.seed))
    with atomic_text_output(args.out) as f:
        if args.format == "csv":
            write_csv(data, f)
        else:
            serialize_libsvm(data, f)
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    _require(args, "train", "model_out")
    method = Method(args.method)
    if args.pi_plus is not None and args.estimate_prior:
        raise UsageError("--pi-plus and --estimate-prior are mutually exclusive")
    if method is not Method.TADJ and args.pi_plus is None and not args.estimate_prior:
        raise UsageError(f"--method {method.value} needs --pi-plus or --estimate-prior")

    workers = _threads(args)
    data = _read_pu(args.train, args.n_features)
    cfg = _selection(args, workers)
    family = KernelFamily(args.kernel)
    gen = np.random.default_rng(args.seed)
    log = logger.bind(method=method.value, n_p=data.n_p, n_u=data.n_u)

    model: Model
    selection: GridSearchResult | None = None
    if method is Method.TADJ:
        split = pu_split(data, cfg, gen)
        model = fit_tadj(data, TadjConfig(), rng=RngStream(args.seed, 1), split=split)
    elif method is Method.WMMD:
        selection = grid_search(data, cfg, family, rng=gen, pi_plus=args.pi_plus)
        _log_selection(selection)
        model = selection.best
    else:
        sched = TrainSchedule(
            learning_rate=args.learning_rate,
            epochs=args.epochs,
            patience=args.patience,
            lambda_grid=tuple(args.lambda_grid),
            gamma_grid=tuple(args.gamma_grid),
            split_fraction=args.split_fraction,
            workers=workers,
        )
        check_scale(data, sched)
        prior = args.pi_plus
        if prior is None:
            # density-based estimate from a WMMD fit on the same split
            selection = grid_search(data, cfg, family, rng=gen)
            _log_selection(selection)
            prior = selection.best.threshold_prior
            split = selection.split
        else:
            split = pu_split(data, cfg, gen)
        model = fit_log_dh(
            data, LossKind(method.value), sched, family=family, pi_plus=prior, split=split
        )

    reference = None
    if args.reference_training_file and method is Method.WMMD:
        reference = TrainingReference(path=args.train.resolve(), n_features=data.dim)
    JsonModelStore(args.model_out).save(
        model, reference, selection.table if selection is not None else ()
    )
    log.info("Model trained", model_out=str(args.model_out))
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    _require(args, "model", "test", "out")
    model = JsonModelStore(args.model).load()
    with args.test.open(encoding="utf-8") as f:
        rows = read_libsvm_rows(f)
    if rows.dim > model.dim:
        raise InvalidInputError(
            f"dimension mismatch: test data has dimension {rows.dim}, model expects {model.dim}"
        )
    features = np.zeros((len(rows), model.dim), dtype=np.float64)
    features[:, : rows.dim] = rows.features
    frame = pd.DataFrame(
        {"score": model.score(features), "prediction": model.classify(features)},
        columns=["score", "prediction"],
    )
    with atomic_text_output(args.out) as f:
        frame.to_csv(f, index=False, lineterminator="\n")
    return 0


def cmd_estimate_prior(args: argparse.Namespace) -> int:
    _require(args, "train")
    data = _read_pu(args.train, args.n_features)
    cfg = _selection(args, _threads(args))
    result = grid_search(
        data, cfg, KernelFamily(args.kernel), rng=np.random.default_rng(args.seed)
    )
    _log_selection(result)
    out = {
        "pi_hat": result.best.threshold_prior,
        "source": result.best.prior_source.value,
        "gamma": result.selected_gamma,
        "eta": args.eta,
    }
    print(json.dumps(out))
    return 0


def _bench_base(args: argparse.Namespace, workers: int) -> ExperimentPlan:
    return ExperimentPlan(
        method=Method.WMMD,
        n_p=args.n_p,
        n_u=args.n_u,
        n_te=args.n_te,
        pi_plus=args.pi_plus,
        prior_known=not args.unknown_prior,
        synthetic=SyntheticKind(args.kind),
        reps=args.reps,
        seed=args.seed,
        family=KernelFamily(args.kernel),
        workers=workers,
        prior_free_selection=args.prior_free_selection,
    )


def _log_t_statistics(reports: Sequence[ExperimentReport]) -> None:
    if len(reports) < 2:
        return
    ref = reports[0]
    for other in reports[1:]:
        t = two_sample_t(
            [r.accuracy for r in ref.per_rep], [r.accuracy for r in other.per_rep]
        )
        logger.info(
            "Accuracy comparison",
            reference=ref.plan.method.value,
            method=other.plan.method.value,
            welch_t=t,
        )


def cmd_bench(args: argparse.Namespace) -> int:
    _require(args, "out")
    workers = _threads(args)
    methods: tuple[Method, ...] = tuple(args.methods)
    if args.dataset is not None and args.sweep != "none":
        raise UsageError("--dataset needs --sweep none")
    if args.prior_free_selection and not args.unknown_prior:
        raise UsageError("--prior-free-selection needs --unknown-prior")

    if args.sweep == "surface":
        frame = moons_decision_surface(
            args.n_p, args.n_u, pi_plus=args.pi_plus, seed=args.seed, resolution=args.resolution
        )
        with atomic_text_output(args.out) as f:
            write_table_csv(frame, f)
        return 0

    if args.sweep == "timing":
        frame = timing_table(methods, reps=args.reps, seed=args.seed)
        with atomic_text_output(args.out) as f:
            write_table_csv(frame, f)
        return 0

    if args.sweep == "none":
        if args.dataset is not None:
            _require(args, "protocol")
            with args.dataset.open(encoding="utf-8") as f:
                dataset = parse_libsvm(
                    f, positive_labels=args.positive_labels, name=args.protocol
                )
            plans = [
                dataset_plan(
                    dataset,
                    args.protocol,
                    m,
                    prior_known=not args.unknown_prior,
                    reps=args.reps,
                    seed=args.seed,
                    workers=workers,
                    prior_free_selection=args.prior_free_selection,
                )
                for m in methods
            ]
        else:
            base = _bench_base(args, workers)
            plans = [dataclasses.replace(base, method=m) for m in methods]
        reports = [run_experiment(plan) for plan in plans]
        _log_t_statistics(reports)
        frame = pd.concat(
            [report_frame(r).assign(method=r.plan.method.value) for r in reports],
            ignore_index=True,
        )
        frame = frame[["method", *frame.columns[:-1]]]
        if args.report_json is None:
            with atomic_text_output(args.out) as f:
                write_table_csv(frame, f)
            return 0
        with atomic_text_outputs(args.out, args.report_json) as (f_table, f_report):
            write_table_csv(frame, f_table)
            json.dump([report_to_dict(r) for r in reports], f_report, indent=1)
            f_report.write("\n")
        return 0

    axis = SweepAxis(args.sweep)
    grid = args.grid if args.grid is not None else (N_U_GRID if axis is SweepAxis.N_U else PI_GRID)
    spec = SweepSpec(axis=axis, grid=tuple(grid), fixed=_bench_base(args, workers))
    frame = sweep(spec, methods)
    with atomic_text_output(args.out) as f:
        write_table_csv(frame, f)
    return 0


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "generate": cmd_generate,
    "train": cmd_train,
    "predict": cmd_predict,
    "estimate-prior": cmd_estimate_prior,
    "bench": cmd_bench,
}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    try:
        args = _apply_config(parser, subs, argv, args)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        subs[args.command].print_usage(sys.stderr)
        print(f"pywmmd {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (PUError, OSError) as exc:
        print(f"pywmmd {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
