"""Semi-supervised anomaly detection with a hypersphere-regularized autoencoder.

A fully-connected autoencoder and a hypersphere center in its latent space
are trained jointly on normal data; the anomaly score of a sample is its
reconstruction error plus the weighted squared distance of its latent code
from the center. The package provides the numpy network and optimizers, the
alternating training loop, ROC/AUC evaluation, dataset loaders, and an
experiment runner with a CLI.
"""

from .data import (
    DataFormatError,
    LabeledDataset,
    OneClassSplit,
    global_contrast_normalization,
    load_csv,
    load_idx,
    make_holdout_split,
    make_one_class_split,
    standardize,
)
from .evaluation import (
    ExtremeSet,
    RocCurve,
    ScoredSample,
    auc,
    extremes,
    roc_curve,
    scored_samples,
)
from .experiment import (
    DatasetConfig,
    ExperimentConfig,
    ExperimentError,
    load_experiment_config,
    report,
    run_experiment,
    sweep,
)
from .model import (
    LossBreakdown,
    TrainConfig,
    TrainResult,
    TrainingDiverged,
    anomaly_score,
    batch_objective,
    estimate_gamma,
    kappa_split,
    optimal_center,
    score_dataset,
    train,
)
from .network import (
    AutoencoderParams,
    DenseLayer,
    backward,
    decode,
    encode,
    forward,
    init_params,
    leaky_relu,
)
from .optim import Adam, AdaGrad

__version__ = "0.1.0"

__all__ = [
    "Adam",
    "AdaGrad",
    "AutoencoderParams",
    "DataFormatError",
    "DatasetConfig",
    "DenseLayer",
    "ExperimentConfig",
    "ExperimentError",
    "ExtremeSet",
    "LabeledDataset",
    "LossBreakdown",
    "OneClassSplit",
    "RocCurve",
    "ScoredSample",
    "TrainConfig",
    "TrainResult",
    "TrainingDiverged",
    "anomaly_score",
    "auc",
    "backward",
    "batch_objective",
    "decode",
    "encode",
    "estimate_gamma",
    "extremes",
    "forward",
    "global_contrast_normalization",
    "init_params",
    "kappa_split",
    "leaky_relu",
    "load_csv",
    "load_experiment_config",
    "load_idx",
    "make_holdout_split",
    "make_one_class_split",
    "optimal_center",
    "report",
    "roc_curve",
    "run_experiment",
    "score_dataset",
    "scored_samples",
    "standardize",
    "sweep",
    "train",
    "__version__",
]
