"""Anomaly scoring and joint training of the autoencoder and hypersphere.

The score of a sample x is

    S(x) = ||xhat - x||^2 + gamma * ||z - c||^2

where z is the latent representation, xhat the reconstruction, c the center
of a hypersphere living in latent space, and gamma a fixed trade-off weight.
Training minimizes the batch mean of S over normal samples only, updating
the network parameters and the center in alternation: within each batch the
first ceil(kappa*n) samples drive one Adam step on the network with c
frozen, the remaining samples drive one AdaGrad step on c with the freshly
updated network frozen. Because the reconstruction term cannot be removed
by shrinking the latent space onto c, the degenerate everything-maps-to-c
solution keeps a strictly positive objective on nonzero data.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .network import (
    AutoencoderParams,
    GradientSet,
    as_batch,
    backward,
    decode,
    encode,
    forward,
    init_params,
)
from .optim import Adam, AdaGrad

__all__ = [
    "TrainConfig",
    "LossBreakdown",
    "TrainResult",
    "TrainingDiverged",
    "anomaly_score",
    "batch_objective",
    "optimal_center",
    "estimate_gamma",
    "kappa_split",
    "train",
    "score_dataset",
]

log = logging.getLogger(__name__)

AUTO_GAMMA = "auto"


class TrainingDiverged(RuntimeError):
    """Raised when a training loss stops being finite."""

    def __init__(self, epoch: int, batch_index: int, value: float) -> None:
        self.epoch = epoch
        self.batch_index = batch_index
        self.value = value
        super().__init__(
            f"training diverged: non-finite loss {value!r} at epoch {epoch}, "
            f"batch {batch_index}; lower the learning rate or rescale the data"
        )


@dataclass
class TrainConfig:
    """Hyperparameters of one training run.

    ``gamma`` is either a positive float or the string ``"auto"``, in which
    case the ratio estimator picks it before the first epoch using
    ``gamma_repeats`` fresh initializations. ``layer_sizes`` lists the
    encoder widths from the input up to (not including) the latent layer.
    """

    layer_sizes: list[int]
    latent_dim: int
    gamma: float | str = AUTO_GAMMA
    kappa: float = 0.9
    batch_size: int = 200
    epochs: int = 300
    adam_lr: float = 0.001
    adagrad_lr: float = 1.0
    adagrad_decay: float = 0.1
    weight_decay: float = 1e-7
    gamma_repeats: int = 10
    seed: int = 0
    leaky_slope: float = 0.01

    def __post_init__(self) -> None:
        self.layer_sizes = [int(s) for s in self.layer_sizes]
        if not self.layer_sizes or any(s < 1 for s in self.layer_sizes):
            raise ValueError("layer_sizes must be non-empty positive counts")
        if self.latent_dim < 1:
            raise ValueError("latent_dim must be >= 1")
        if isinstance(self.gamma, str):
            if self.gamma != AUTO_GAMMA:
                raise ValueError(f"gamma must be a positive number or '{AUTO_GAMMA}'")
        else:
            self.gamma = float(self.gamma)
            if not (self.gamma > 0 and math.isfinite(self.gamma)):
                raise ValueError("fixed gamma must be positive and finite")
        if not (0.0 < self.kappa < 1.0):
            raise ValueError("kappa must lie strictly between 0 and 1")
        if self.batch_size < 2:
            raise ValueError("batch_size must be >= 2")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.adam_lr <= 0 or self.adagrad_lr <= 0:
            raise ValueError("learning rates must be positive")
        if self.adagrad_decay < 0 or self.weight_decay < 0:
            raise ValueError("decay rates must be >= 0")
        if self.gamma_repeats < 1:
            raise ValueError("gamma_repeats must be >= 1")

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]


@dataclass
class LossBreakdown:
    """Per-epoch means of the training loss and its two components.

    Values are means over the recorded batch means; each batch is recorded
    on its network-update portion, before the update is applied. The exact
    relation total = recon + gamma * svdd holds per batch and therefore per
    epoch up to float rounding.
    """

    epoch: int
    total: float
    recon: float
    svdd: float


@dataclass
class TrainResult:
    """Everything a finished run needs for scoring and inspection."""

    params: AutoencoderParams
    center: np.ndarray
    center_init: np.ndarray
    gamma: float
    history: list[LossBreakdown] = field(default_factory=list)


def _as_center(c, latent_dim: int) -> np.ndarray:
    arr = np.asarray(c, dtype=np.float64)
    if arr.shape != (latent_dim,):
        raise ValueError(f"center must have shape ({latent_dim},), got {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError("center contains non-finite entries")
    return arr


def _component_sums(
    x_batch: np.ndarray, z: np.ndarray, xhat: np.ndarray, c: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Per-sample squared reconstruction error and squared center distance."""
    recon = np.square(xhat - x_batch).sum(axis=1)
    dist = np.square(z - c).sum(axis=1)
    return recon, dist


def anomaly_score(params: AutoencoderParams, c, gamma: float, x) -> float:
    """Score one sample: reconstruction error plus weighted center distance.

    Both terms are squared Euclidean norms summed over all coordinates.
    Larger scores mean less normal.
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    x_arr = np.asarray(x, dtype=np.float64)
    if x_arr.ndim != 1:
        raise ValueError(f"x must be a 1-D vector, got shape {x_arr.shape}")
    row = as_batch(x_arr.reshape(1, -1), params.input_dim, "x")
    c_arr = _as_center(c, params.latent_dim)
    z = encode(params, row)
    xhat = decode(params, z)
    recon, dist = _component_sums(row, z, xhat, c_arr)
    return float(recon[0]) + gamma * float(dist[0])


def batch_objective(
    params: AutoencoderParams, c, gamma: float, x_batch
) -> tuple[float, float, float]:
    """Mean anomaly score of a batch, split into its components.

    Returns ``(total, recon_mean, svdd_mean)`` with
    ``total = recon_mean + gamma * svdd_mean``. This is the differentiable
    training loss; weight decay lives in the optimizer, not here.
    """
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    x_arr = as_batch(x_batch, params.input_dim, "x_batch")
    if x_arr.shape[0] == 0:
        raise ValueError("batch must be non-empty")
    c_arr = _as_center(c, params.latent_dim)
    z = encode(params, x_arr)
    xhat = decode(params, z)
    recon, dist = _component_sums(x_arr, z, xhat, c_arr)
    recon_mean = float(np.mean(recon))
    svdd_mean = float(np.mean(dist))
    return recon_mean + gamma * svdd_mean, recon_mean, svdd_mean


def optimal_center(params: AutoencoderParams, x_batch) -> np.ndarray:
    """Closed-form minimizer of the batch SVDD term with the network fixed.

    The mean distance sum(||z_i - c||^2) is quadratic in c, so its unique
    minimum is the latent mean.
    """
    x_arr = as_batch(x_batch, params.input_dim, "x_batch")
    if x_arr.shape[0] == 0:
        raise ValueError("batch must be non-empty")
    return encode(params, x_arr).mean(axis=0)


def estimate_gamma(
    params_factory: Callable[[int], AutoencoderParams],
    x_train,
    repeats: int = 10,
    seed: int = 0,
) -> float:
    """Pick gamma so both score terms start at comparable magnitude.

    For ``repeats`` fresh random initializations (``params_factory`` is
    called with a derived seed each time), compute the per-sample ratio of
    reconstruction error to squared latent norm (center at the origin) and
    average: first over samples, then over repeats. Samples whose latent
    norm is below 1e-12 are skipped so near-zero denominators cannot blow
    up the estimate.

    If the estimate comes out non-positive or non-finite (for instance a
    network that already reconstructs perfectly), falls back to 1.0 with a
    logged warning so downstream configs keep a valid positive gamma.
    """
    if repeats < 1:
        raise ValueError("repeats must be >= 1")
    x_arr = np.asarray(x_train, dtype=np.float64)
    if x_arr.ndim != 2 or x_arr.shape[0] == 0:
        raise ValueError("x_train must be a non-empty 2-D array")
    repeat_means = []
    for repeat_seed in np.random.SeedSequence(seed).generate_state(repeats):
        params = params_factory(int(repeat_seed))
        x_checked = as_batch(x_arr, params.input_dim, "x_train")
        z = encode(params, x_checked)
        xhat = decode(params, z)
        recon, dist = _component_sums(x_checked, z, xhat, np.zeros(params.latent_dim))
        keep = dist >= 1e-12
        if not keep.any():
            raise ValueError(
                "gamma estimation failed: every sample has near-zero latent norm"
            )
        ratios = recon[keep] / dist[keep]
        if not np.isfinite(ratios).all():
            raise ValueError("gamma estimation failed: non-finite sample ratio")
        repeat_means.append(float(np.mean(ratios)))
    estimate = float(np.mean(repeat_means))
    if not (estimate > 0 and math.isfinite(estimate)):
        log.warning(
            "gamma estimate %r is not a valid positive weight; falling back to 1.0",
            estimate,
        )
        return 1.0
    return estimate


def kappa_split(n: int, kappa: float) -> tuple[int, int]:
    """Sizes of the network-update and center-update portions of a batch.

    The network side takes ceil(kappa * n). A small slack absorbs float
    error so products that are integers up to rounding (0.9 * 200) do not
    spill over into the next integer.
    """
    if n < 1:
        raise ValueError("batch must be non-empty")
    n_theta = math.ceil(kappa * n - 1e-9)
    n_theta = min(max(n_theta, 1), n)
    return n_theta, n - n_theta


def _flat_params(params: AutoencoderParams) -> list[np.ndarray]:
    return [
        arr
        for layer in params.encoder_layers + params.decoder_layers
        for arr in (layer.weight, layer.bias)
    ]


def _flat_grads(grads: GradientSet) -> list[np.ndarray]:
    return [
        arr for layer in grads.encoder + grads.decoder for arr in (layer.weight, layer.bias)
    ]


def _usable_tail(tail: int, kappa: float) -> bool:
    """A trailing short batch is kept only if both phases get >= 2 samples."""
    if tail < 4:
        return False
    n_theta, n_center = kappa_split(tail, kappa)
    return n_theta >= 2 and n_center >= 2


def train(config: TrainConfig, x_train) -> TrainResult:
    """Run the alternating training loop on a set of normal samples.

    Per epoch the data is reshuffled (seeded) and cut into consecutive
    batches of ``batch_size``; a short trailing batch is kept only if the
    kappa split leaves at least two samples on each side. Within a batch,
    phase one takes one Adam step on all network weights and biases against
    the mean anomaly score of the first ceil(kappa*n) samples with the
    center frozen; phase two encodes the remaining samples with the updated
    network and takes one AdaGrad step on the center against the mean
    squared center distance.

    The master seed fans out into independent streams for parameter init,
    center init, epoch shuffling, and gamma estimation, so results are
    reproducible bit for bit. Raises TrainingDiverged if a batch loss stops
    being finite.
    """
    x_arr = as_batch(x_train, config.input_dim, "x_train")
    n = x_arr.shape[0]
    if n == 0:
        raise ValueError("x_train must be non-empty")

    if n >= config.batch_size:
        n_theta, n_center = kappa_split(config.batch_size, config.kappa)
        if n_center == 0:
            raise ValueError(
                f"kappa={config.kappa} leaves no center samples in a batch of "
                f"{config.batch_size}; lower kappa or enlarge the batch"
            )
    elif not _usable_tail(n, config.kappa):
        raise ValueError(
            f"training set of {n} samples is too small for batch_size="
            f"{config.batch_size} with kappa={config.kappa}"
        )

    params_seed, center_seed, shuffle_seed, gamma_seed = (
        int(s) for s in np.random.SeedSequence(config.seed).generate_state(4)
    )

    if config.gamma == AUTO_GAMMA:
        gamma = estimate_gamma(
            lambda s: init_params(config.layer_sizes, config.latent_dim, s, config.leaky_slope),
            x_arr,
            repeats=config.gamma_repeats,
            seed=gamma_seed,
        )
    else:
        gamma = float(config.gamma)

    params = init_params(config.layer_sizes, config.latent_dim, params_seed, config.leaky_slope)
    center = np.random.default_rng(center_seed).standard_normal(config.latent_dim)
    center_init = center.copy()

    adam = Adam(lr=config.adam_lr, weight_decay=config.weight_decay)
    adagrad = AdaGrad(lr0=config.adagrad_lr, decay=config.adagrad_decay)
    param_arrays = _flat_params(params)
    shuffle_rng = np.random.default_rng(shuffle_seed)

    history: list[LossBreakdown] = []
    for epoch in range(config.epochs):
        order = shuffle_rng.permutation(n)
        batch_losses: list[tuple[float, float, float]] = []
        for batch_index, start in enumerate(range(0, n, config.batch_size)):
            rows = order[start : start + config.batch_size]
            if len(rows) < config.batch_size and not _usable_tail(len(rows), config.kappa):
                continue
            batch = x_arr[rows]
            n_theta, _ = kappa_split(len(rows), config.kappa)
            theta_x = batch[:n_theta]
            center_x = batch[n_theta:]

            # phase one: one Adam step on the network, center frozen
            z, xhat, tape = forward(params, theta_x)
            recon, dist = _component_sums(theta_x, z, xhat, center)
            recon_mean = float(np.mean(recon))
            svdd_mean = float(np.mean(dist))
            total = recon_mean + gamma * svdd_mean
            if not math.isfinite(total):
                raise TrainingDiverged(epoch, batch_index, total)
            batch_losses.append((total, recon_mean, svdd_mean))
            dxhat = (2.0 / n_theta) * (xhat - theta_x)
            dz = (2.0 * gamma / n_theta) * (z - center)
            grads = backward(params, tape, dxhat, dz)
            adam.step(param_arrays, _flat_grads(grads))

            # phase two: one AdaGrad step on the center, network frozen
            z_center = encode(params, center_x)
            grad_c = 2.0 * (center - z_center.mean(axis=0))
            adagrad.step(center, grad_c)

        totals, recons, svdds = (np.array(col) for col in zip(*batch_losses))
        history.append(
            LossBreakdown(
                epoch=epoch,
                total=float(np.mean(totals)),
                recon=float(np.mean(recons)),
                svdd=float(np.mean(svdds)),
            )
        )

    return TrainResult(
        params=params, center=center, center_init=center_init, gamma=gamma, history=history
    )


def score_dataset(params: AutoencoderParams, c, gamma: float, x_set) -> np.ndarray:
    """Anomaly score of every row, in input order.

    Scores each sample independently through the same code path as
    ``anomaly_score``, so results do not depend on how callers partition or
    permute the set.
    """
    x_arr = as_batch(x_set, params.input_dim, "x_set")
    return np.array(
        [anomaly_score(params, c, gamma, row) for row in x_arr], dtype=np.float64
    )
