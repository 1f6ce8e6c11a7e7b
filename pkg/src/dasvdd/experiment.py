"""Experiment orchestration: config parsing, multi-run training, reporting.

An experiment is ``runs`` independent trainings of the same configuration
with seeds ``seed, seed+1, ...``; each run scores the test split, and the
summary reports mean and standard deviation of the AUC. Every artifact is
a plain CSV or JSON file written atomically, with floats serialized via
``repr`` so identical configs reproduce byte-identical outputs.

Per-run files: ``scores.csv`` (index,score,label), ``roc.csv``
(fpr,tpr,threshold), ``loss.csv`` (epoch,total,recon,svdd), ``extremes.csv``
(rank,kind,index,score). The experiment directory gets ``summary.json``;
sweeps add ``sweep.csv`` one level up.
"""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np

from .data import (
    global_contrast_normalization,
    load_csv,
    load_idx,
    make_holdout_split,
    make_one_class_split,
    standardize,
)
from .evaluation import auc, extremes, roc_curve, scored_samples
from .model import TrainConfig, score_dataset, train

__all__ = [
    "DatasetConfig",
    "ExperimentConfig",
    "ExperimentError",
    "load_experiment_config",
    "run_experiment",
    "sweep",
    "report",
    "SWEEPABLE_PARAMS",
]

SWEEPABLE_PARAMS = ("latent_dim", "gamma")


class ExperimentError(RuntimeError):
    """A module error annotated with the run index and pipeline stage."""

    def __init__(self, stage: str, run_index: int | None, cause: BaseException) -> None:
        self.stage = stage
        self.run_index = run_index
        where = f"run {run_index}, stage {stage}" if run_index is not None else f"stage {stage}"
        super().__init__(f"{where}: {cause}")


@dataclass
class DatasetConfig:
    """Where the data lives and how to preprocess it.

    ``kind`` is ``"idx"`` (paired image/label files with an existing
    train/test partition) or ``"csv"`` (a single labeled file, split by a
    seeded normals holdout). ``max_train_samples`` caps the normal training
    rows by a seeded subsample; 0 keeps everything.
    """

    kind: str
    path: str = ""
    train_images: str = ""
    train_labels: str = ""
    test_images: str = ""
    test_labels: str = ""
    gcn: bool = False
    standardize: bool = False
    holdout_fraction: float = 0.8
    max_train_samples: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("idx", "csv"):
            raise ValueError(f"dataset kind must be 'idx' or 'csv', got {self.kind!r}")
        if self.kind == "csv" and not self.path:
            raise ValueError("csv datasets require 'path'")
        if self.kind == "idx":
            missing = [
                name
                for name in ("train_images", "train_labels", "test_images", "test_labels")
                if not getattr(self, name)
            ]
            if missing:
                raise ValueError(f"idx datasets require {', '.join(missing)}")
        if self.max_train_samples < 0:
            raise ValueError("max_train_samples must be >= 0")

    def file_paths(self) -> list[str]:
        if self.kind == "csv":
            return [self.path]
        return [self.train_images, self.train_labels, self.test_images, self.test_labels]


@dataclass
class ExperimentConfig:
    """One experiment: dataset, training hyperparameters, repetition count."""

    dataset: DatasetConfig
    train: TrainConfig
    normal_class: int = 0
    runs: int = 10
    out_dir: str = "results"

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ValueError("runs must be >= 1")


def _build_dataclass(cls, mapping: dict, where: str):
    if not isinstance(mapping, dict):
        raise ValueError(f"{where} must be an object of key/value pairs")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(mapping) - known)
    if unknown:
        raise ValueError(f"unknown {where} keys: {', '.join(unknown)}")
    return cls(**mapping)


def load_experiment_config(path) -> ExperimentConfig:
    """Parse a JSON experiment config and validate referenced files.

    Top-level keys mirror ExperimentConfig fields; ``dataset`` and ``train``
    nest their dataclass fields. Dataset paths are resolved relative to the
    config file's directory.
    """
    cfg_path = Path(path)
    try:
        raw = json.loads(cfg_path.read_text())
    except OSError as exc:
        raise ValueError(f"cannot read config {cfg_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"config {cfg_path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValueError(f"config {cfg_path} must hold a JSON object")

    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    if "dataset" not in raw or "train" not in raw:
        raise ValueError("config requires 'dataset' and 'train' sections")

    dataset = _build_dataclass(DatasetConfig, raw["dataset"], "dataset")
    train_cfg = _build_dataclass(TrainConfig, raw["train"], "train")
    config = ExperimentConfig(
        dataset=dataset,
        train=train_cfg,
        **{k: raw[k] for k in raw if k not in ("dataset", "train")},
    )

    base = cfg_path.resolve().parent
    for attr in ("path", "train_images", "train_labels", "test_images", "test_labels"):
        value = getattr(config.dataset, attr)
        if value:
            setattr(config.dataset, attr, str((base / value).resolve()))
    missing = [p for p in config.dataset.file_paths() if not Path(p).is_file()]
    if missing:
        raise ValueError(f"dataset files not found: {', '.join(missing)}")
    return config


def percent(fraction: float) -> str:
    """Fraction as a percentage with one decimal, halves rounding up."""
    scaled = Decimal(repr(float(fraction))) * 100
    return str(scaled.quantize(Decimal("0.1"), rounding=ROUND_HALF_UP))


def _format_value(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_text_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_format_value(v) for v in row) for row in rows)
    _write_text_atomic(path, "\n".join(lines) + "\n")


def _write_json(path: Path, payload: dict) -> None:
    _write_text_atomic(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _prepare_split(config: ExperimentConfig):
    """Load, split, and preprocess; returns (train_x, test_x, test_labels)."""
    ds_cfg = config.dataset
    if ds_cfg.kind == "idx":
        train_ds = load_idx(ds_cfg.train_images, ds_cfg.train_labels)
        test_ds = load_idx(ds_cfg.test_images, ds_cfg.test_labels)
        split = make_one_class_split(train_ds, test_ds, config.normal_class)
    else:
        dataset = load_csv(ds_cfg.path)
        split = make_holdout_split(
            dataset,
            config.normal_class,
            train_fraction=ds_cfg.holdout_fraction,
            seed=config.train.seed,
        )

    train_x, test_x = split.train_normals, split.test_features
    if ds_cfg.max_train_samples and train_x.shape[0] > ds_cfg.max_train_samples:
        keep = np.random.default_rng(config.train.seed).permutation(train_x.shape[0])
        train_x = train_x[keep[: ds_cfg.max_train_samples]]
    if ds_cfg.gcn:
        train_x = global_contrast_normalization(train_x)
        test_x = global_contrast_normalization(test_x)
    if ds_cfg.standardize:
        train_x, test_x, _, _ = standardize(train_x, test_x)
    return train_x, test_x, split.test_labels


def _write_run_outputs(run_dir: Path, result, scores, samples, curve, test_x) -> None:
    run_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(
        run_dir / "scores.csv",
        ["index", "score", "label"],
        ((s.index, s.score, s.label) for s in samples),
    )
    _write_csv(
        run_dir / "roc.csv",
        ["fpr", "tpr", "threshold"],
        zip(curve.fpr, curve.tpr, curve.thresholds),
    )
    _write_csv(
        run_dir / "loss.csv",
        ["epoch", "total", "recon", "svdd"],
        ((h.epoch, h.total, h.recon, h.svdd) for h in result.history),
    )
    ends = extremes(samples, test_x, k=min(10, len(samples)))
    rows = [
        (rank, kind, s.index, s.score)
        for kind, picked in (("lowest", ends.lowest), ("highest", ends.highest))
        for rank, s in enumerate(picked)
    ]
    _write_csv(run_dir / "extremes.csv", ["rank", "kind", "index", "score"], rows)


def run_experiment(config: ExperimentConfig) -> dict:
    """Train ``runs`` seeded replicas, score the test split, persist results.

    Returns the summary dict that is also written to ``summary.json``.
    Failures are re-raised as ExperimentError carrying the run index and
    stage; outputs of already completed runs stay on disk.
    """
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        train_x, test_x, test_labels = _prepare_split(config)
    except Exception as exc:
        raise ExperimentError("data", None, exc) from exc

    auc_values: list[float] = []
    gamma_values: list[float] = []
    for i in range(config.runs):
        run_cfg = dataclasses.replace(config.train, seed=config.train.seed + i)
        stage = "train"
        try:
            result = train(run_cfg, train_x)
            stage = "score"
            scores = score_dataset(result.params, result.center, result.gamma, test_x)
            stage = "evaluate"
            samples = scored_samples(scores, test_labels)
            auc_value = auc(samples)
            curve = roc_curve(samples)
            stage = "write"
            _write_run_outputs(out_dir / f"run_{i:02d}", result, scores, samples, curve, test_x)
        except Exception as exc:
            raise ExperimentError(stage, i, exc) from exc
        auc_values.append(auc_value)
        gamma_values.append(result.gamma)

    mean_auc = float(np.mean(auc_values))
    std_auc = float(np.std(auc_values))
    summary_line = f"AUC {percent(mean_auc)} ± {percent(std_auc)} over {config.runs} runs"
    summary = {
        "aucs": auc_values,
        "mean_auc": mean_auc,
        "std_auc": std_auc,
        "gamma_used": gamma_values,
        "runs": config.runs,
        "summary_line": summary_line,
        "config": dataclasses.asdict(config),
    }
    _write_json(out_dir / "summary.json", summary)
    print(summary_line)
    return summary


def sweep(config: ExperimentConfig, parameter: str, values: list) -> list[dict]:
    """Repeat the experiment across values of one hyperparameter.

    Each value trains into ``<out_dir>/<parameter>_<value>/``; the collected
    (value, mean AUC, std) rows land in ``<out_dir>/sweep.csv``.
    """
    if parameter not in SWEEPABLE_PARAMS:
        raise ValueError(
            f"unknown sweep parameter {parameter!r}; choose from {', '.join(SWEEPABLE_PARAMS)}"
        )
    if not values:
        raise ValueError("sweep needs at least one value")

    out_dir = Path(config.out_dir)
    summaries = []
    rows = []
    for value in values:
        value = int(value) if parameter == "latent_dim" else float(value)
        sub_train = dataclasses.replace(config.train, **{parameter: value})
        sub_config = dataclasses.replace(
            config,
            train=sub_train,
            out_dir=str(out_dir / f"{parameter}_{_format_value(value)}"),
        )
        summary = run_experiment(sub_config)
        summaries.append(summary)
        rows.append((value, summary["mean_auc"], summary["std_auc"]))
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(out_dir / "sweep.csv", [parameter, "mean_auc", "std_auc"], rows)
    return summaries


def _render_report_figures(out_dir: Path, found: list[tuple[str, dict]]) -> list[Path]:
    """Companion plots for whatever run artifacts exist under the directory."""
    from . import figures

    written: list[Path] = []
    fig_dir = out_dir / "figures"
    losses: dict[str, np.ndarray] = {}
    curves: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for name, summary in found:
        base = out_dir / name if name != "." else out_dir
        loss_path = base / "run_00" / "loss.csv"
        roc_path = base / "run_00" / "roc.csv"
        if loss_path.is_file():
            rows = np.loadtxt(loss_path, delimiter=",", skiprows=1, ndmin=2)
            losses[name] = rows
        if roc_path.is_file():
            rows = np.loadtxt(roc_path, delimiter=",", skiprows=1, ndmin=2)
            curves[name] = (rows[:, 0], rows[:, 1])
    if losses or curves:
        fig_dir.mkdir(parents=True, exist_ok=True)
    if losses:
        written.append(figures.save_loss_figure(losses, fig_dir / "loss.png"))
    if curves:
        written.append(figures.save_roc_figure(curves, fig_dir / "roc.png"))
    for sweep_csv in sorted(out_dir.rglob("sweep.csv")):
        rows = np.loadtxt(sweep_csv, delimiter=",", skiprows=1, ndmin=2)
        param_name = sweep_csv.read_text().splitlines()[0].split(",")[0]
        fig_dir.mkdir(parents=True, exist_ok=True)
        stem = "sweep" if sweep_csv.parent == out_dir else f"sweep_{sweep_csv.parent.name}"
        written.append(
            figures.save_sweep_figure(
                param_name, rows[:, 0], rows[:, 1], rows[:, 2], fig_dir / f"{stem}.png"
            )
        )
    return written


def report(output_dir, render_figures: bool = True) -> str:
    """Tabulate every summary under a directory; percentages, one decimal.

    Writes ``report.csv`` next to the summaries and, by default, renders
    loss/ROC/sweep figures into ``figures/``. Unreadable summaries are
    listed at the end of the table instead of aborting the report.
    """
    out_dir = Path(output_dir)
    paths = sorted(out_dir.rglob("summary.json"))
    if not paths:
        raise ValueError(f"no summary.json found under {out_dir}")

    found: list[tuple[str, dict]] = []
    problems: list[str] = []
    for path in paths:
        rel = path.parent.relative_to(out_dir)
        name = str(rel) if str(rel) != "." else "."
        try:
            summary = json.loads(path.read_text())
            float(summary["mean_auc"])
            float(summary["std_auc"])
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            problems.append(f"{path}: {exc}")
            continue
        found.append((name, summary))

    lines = []
    width = max([len(name) for name, _ in found] + [len("avg:")]) + 2
    lines.append(f"{'experiment':<{width}}AUC%")
    csv_rows = []
    for name, summary in found:
        pct = percent(summary["mean_auc"])
        spread = percent(summary["std_auc"])
        lines.append(f"{name:<{width}}{pct} ± {spread}")
        csv_rows.append((name, summary["mean_auc"], summary["std_auc"]))
    if found:
        grand = float(np.mean([s["mean_auc"] for _, s in found]))
        lines.append(f"{'avg:':<{width}}{percent(grand)}")
        csv_rows.append(("avg", grand, ""))
        _write_csv(out_dir / "report.csv", ["experiment", "mean_auc", "std_auc"], csv_rows)
    for problem in problems:
        lines.append(f"unreadable: {problem}")
    if found and render_figures:
        _render_report_figures(out_dir, found)
    return "\n".join(lines)
