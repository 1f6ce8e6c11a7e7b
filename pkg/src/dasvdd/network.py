"""Fully-connected autoencoder: parameters, forward evaluation, exact gradients.

All numeric state is float64 numpy. A batch is a 2-D array of shape
(n_samples, n_features); a layer weight is (fan_out, fan_in), so the affine
map for a batch ``x`` is ``x @ W.T + b``. The computation graph is fixed
(dense encoder and decoder with leaky-ReLU activations, linear decoder
output), so reverse-mode differentiation is hand-rolled for exactly this
graph instead of delegating to a general autodiff engine.

Activation placement: every layer applies leaky ReLU except the last decoder
layer, which stays linear so reconstructions can reach arbitrary real values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DenseLayer",
    "AutoencoderParams",
    "LayerGradient",
    "GradientSet",
    "ForwardTape",
    "init_params",
    "encode",
    "decode",
    "forward",
    "backward",
    "leaky_relu",
]


def as_batch(x, n_cols: int | None = None, name: str = "x") -> np.ndarray:
    """Coerce to a finite float64 2-D array, optionally checking the width."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (batch x features), got shape {arr.shape}")
    if n_cols is not None and arr.shape[1] != n_cols:
        raise ValueError(f"{name} has {arr.shape[1]} columns, expected {n_cols}")
    if arr.size and not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def leaky_relu(x: np.ndarray, slope: float) -> np.ndarray:
    """Identity for x >= 0, ``slope * x`` for x < 0."""
    return np.where(x >= 0.0, x, slope * x)


def _leaky_relu_grad(pre: np.ndarray, slope: float) -> np.ndarray:
    return np.where(pre >= 0.0, 1.0, slope)


@dataclass
class DenseLayer:
    """Affine layer: weight (fan_out, fan_in) and bias (fan_out,)."""

    weight: np.ndarray
    bias: np.ndarray

    def __post_init__(self) -> None:
        self.weight = np.asarray(self.weight, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weight.ndim != 2:
            raise ValueError(f"weight must be 2-D, got shape {self.weight.shape}")
        if self.bias.shape != (self.weight.shape[0],):
            raise ValueError(
                f"bias length {self.bias.shape} does not match weight rows "
                f"{self.weight.shape[0]}"
            )

    @property
    def fan_in(self) -> int:
        return self.weight.shape[1]

    @property
    def fan_out(self) -> int:
        return self.weight.shape[0]


@dataclass
class AutoencoderParams:
    """Encoder/decoder layer stacks plus the shared activation slope.

    Consecutive layers must chain (fan_in of layer k+1 equals fan_out of
    layer k), the decoder must end at the encoder's input width, and the
    last encoder layer defines the latent dimension.
    """

    encoder_layers: list[DenseLayer]
    decoder_layers: list[DenseLayer]
    leaky_slope: float = 0.01

    def __post_init__(self) -> None:
        if not self.encoder_layers or not self.decoder_layers:
            raise ValueError("encoder and decoder each need at least one layer")
        for name, layers in (("encoder", self.encoder_layers), ("decoder", self.decoder_layers)):
            for k in range(len(layers) - 1):
                if layers[k + 1].fan_in != layers[k].fan_out:
                    raise ValueError(
                        f"{name} layer {k + 1} fan_in {layers[k + 1].fan_in} does not "
                        f"chain with layer {k} fan_out {layers[k].fan_out}"
                    )
        if self.decoder_layers[0].fan_in != self.latent_dim:
            raise ValueError("decoder input width must equal the latent dimension")
        if self.decoder_layers[-1].fan_out != self.input_dim:
            raise ValueError("decoder output width must equal the encoder input width")

    @property
    def input_dim(self) -> int:
        return self.encoder_layers[0].fan_in

    @property
    def latent_dim(self) -> int:
        return self.encoder_layers[-1].fan_out


@dataclass
class LayerGradient:
    """Gradient arrays for one DenseLayer, same shapes as the layer."""

    weight: np.ndarray
    bias: np.ndarray


@dataclass
class GradientSet:
    """Per-layer gradients, shape-congruent with an AutoencoderParams."""

    encoder: list[LayerGradient]
    decoder: list[LayerGradient]


@dataclass
class ForwardTape:
    """Recorded intermediates of one forward pass, consumed by backward().

    For every layer we keep the layer input and the pre-activation; that is
    sufficient to replay the chain rule without recomputation.
    """

    encoder: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    decoder: list[tuple[np.ndarray, np.ndarray]] = field(default_factory=list)
    batch_rows: int = 0


def init_params(
    layer_sizes: list[int] | tuple[int, ...],
    latent_dim: int,
    seed: int,
    leaky_slope: float = 0.01,
) -> AutoencoderParams:
    """Build a mirrored autoencoder with freshly initialized parameters.

    ``layer_sizes`` is the encoder stack up to (not including) the latent
    layer, starting at the input width: ``[8, 10, 10]`` with ``latent_dim=4``
    yields encoder widths 8 -> 10 -> 10 -> 4 and the mirrored decoder
    4 -> 10 -> 10 -> 8.

    Weights are drawn uniformly in [-sqrt(6/fan_in), +sqrt(6/fan_in)], the
    gain that keeps activation magnitudes roughly constant through the
    leaky-ReLU stack; biases start at zero but are ordinary trainable
    parameters. Identical seeds give bit-identical parameter sets.
    """
    sizes = [int(s) for s in layer_sizes]
    if not sizes:
        raise ValueError("layer_sizes must be non-empty")
    if any(s < 1 for s in sizes) or latent_dim < 1:
        raise ValueError("all layer sizes and the latent dimension must be >= 1")

    rng = np.random.default_rng(seed)
    encoder_dims = sizes + [int(latent_dim)]
    decoder_dims = encoder_dims[::-1]

    def draw_stack(dims: list[int]) -> list[DenseLayer]:
        layers = []
        for fan_in, fan_out in zip(dims[:-1], dims[1:]):
            bound = np.sqrt(6.0 / fan_in)
            weight = rng.uniform(-bound, bound, size=(fan_out, fan_in))
            layers.append(DenseLayer(weight=weight, bias=np.zeros(fan_out)))
        return layers

    return AutoencoderParams(
        encoder_layers=draw_stack(encoder_dims),
        decoder_layers=draw_stack(decoder_dims),
        leaky_slope=float(leaky_slope),
    )


def encode(params: AutoencoderParams, x_batch: np.ndarray) -> np.ndarray:
    """Map a batch to its latent representation.

    Every encoder layer, including the last one, applies leaky ReLU after
    the affine map.
    """
    h = as_batch(x_batch, params.input_dim, "x_batch")
    for layer in params.encoder_layers:
        h = leaky_relu(h @ layer.weight.T + layer.bias, params.leaky_slope)
    return h


def decode(params: AutoencoderParams, z_batch: np.ndarray) -> np.ndarray:
    """Map a latent batch back to input space; the output layer is linear."""
    h = as_batch(z_batch, params.latent_dim, "z_batch")
    last = len(params.decoder_layers) - 1
    for k, layer in enumerate(params.decoder_layers):
        h = h @ layer.weight.T + layer.bias
        if k != last:
            h = leaky_relu(h, params.leaky_slope)
    return h


def forward(
    params: AutoencoderParams, x_batch: np.ndarray
) -> tuple[np.ndarray, np.ndarray, ForwardTape]:
    """Encode and decode a batch, recording intermediates for backward().

    Returns ``(z_batch, xhat_batch, tape)``; z and xhat are identical to the
    encode/decode composition.
    """
    h = as_batch(x_batch, params.input_dim, "x_batch")
    tape = ForwardTape(batch_rows=h.shape[0])
    for layer in params.encoder_layers:
        pre = h @ layer.weight.T + layer.bias
        tape.encoder.append((h, pre))
        h = leaky_relu(pre, params.leaky_slope)
    z = h
    last = len(params.decoder_layers) - 1
    for k, layer in enumerate(params.decoder_layers):
        pre = h @ layer.weight.T + layer.bias
        tape.decoder.append((h, pre))
        h = leaky_relu(pre, params.leaky_slope) if k != last else pre
    return z, h, tape


def _check_tape(params: AutoencoderParams, tape: ForwardTape) -> None:
    if len(tape.encoder) != len(params.encoder_layers) or len(tape.decoder) != len(
        params.decoder_layers
    ):
        raise ValueError("tape does not match the parameter set (layer count)")
    for (x_in, pre), layer in zip(
        tape.encoder + tape.decoder, params.encoder_layers + params.decoder_layers
    ):
        if x_in.shape != (tape.batch_rows, layer.fan_in) or pre.shape != (
            tape.batch_rows,
            layer.fan_out,
        ):
            raise ValueError("tape does not match the parameter set (layer shapes)")


def backward(
    params: AutoencoderParams,
    tape: ForwardTape,
    dloss_dxhat: np.ndarray,
    dloss_dz: np.ndarray,
) -> GradientSet:
    """Exact reverse-mode gradients of a scalar loss.

    ``dloss_dxhat`` and ``dloss_dz`` are the partials of the loss with
    respect to the reconstruction and the latent; the reconstruction seed
    flows through decoder then encoder, the latent seed only through the
    encoder.
    """
    _check_tape(params, tape)
    dxhat = as_batch(dloss_dxhat, params.input_dim, "dloss_dxhat")
    dz_seed = as_batch(dloss_dz, params.latent_dim, "dloss_dz")
    if dxhat.shape[0] != tape.batch_rows or dz_seed.shape[0] != tape.batch_rows:
        raise ValueError("gradient seeds must have one row per batch sample")

    slope = params.leaky_slope
    decoder_grads: list[LayerGradient] = []
    upstream = dxhat
    last = len(params.decoder_layers) - 1
    for k in range(last, -1, -1):
        layer = params.decoder_layers[k]
        x_in, pre = tape.decoder[k]
        dpre = upstream if k == last else upstream * _leaky_relu_grad(pre, slope)
        decoder_grads.append(LayerGradient(weight=dpre.T @ x_in, bias=dpre.sum(axis=0)))
        upstream = dpre @ layer.weight
    decoder_grads.reverse()

    # upstream is now dLoss/dz through the decoder path; add the direct seed
    upstream = upstream + dz_seed
    encoder_grads: list[LayerGradient] = []
    for k in range(len(params.encoder_layers) - 1, -1, -1):
        layer = params.encoder_layers[k]
        x_in, pre = tape.encoder[k]
        dpre = upstream * _leaky_relu_grad(pre, slope)
        encoder_grads.append(LayerGradient(weight=dpre.T @ x_in, bias=dpre.sum(axis=0)))
        upstream = dpre @ layer.weight
    encoder_grads.reverse()

    return GradientSet(encoder=encoder_grads, decoder=decoder_grads)
