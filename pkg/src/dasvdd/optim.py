"""First-order optimizers used during training.

Both optimizers keep their own state and update parameter arrays in place.
They operate on flat lists of float64 arrays so they stay independent of the
network's layer structure; the training loop is responsible for pairing each
parameter array with its gradient.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Adam", "AdaGrad"]


class Adam:
    """Adam with bias correction and optional coupled L2 weight decay.

    Moment estimates follow the standard recursions
    ``m <- beta1*m + (1-beta1)*g`` and ``v <- beta2*v + (1-beta2)*g**2``
    with bias-corrected ``m_hat = m / (1 - beta1**t)`` and
    ``v_hat = v / (1 - beta2**t)``; the update is
    ``p <- p - lr * m_hat / (sqrt(v_hat) + eps)``.

    Weight decay is coupled: ``lam * p`` is added to the raw gradient before
    the moment updates, so decay flows through the adaptive scaling. With
    ``eps`` negligible the per-coordinate step magnitude is bounded by
    roughly ``lr`` regardless of gradient scale.
    """

    def __init__(
        self,
        lr: float,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
        weight_decay: float = 0.0,
    ) -> None:
        if lr <= 0:
            raise ValueError(f"lr must be positive, got {lr}")
        if not (0.0 <= beta1 < 1.0) or not (0.0 <= beta2 < 1.0):
            raise ValueError("beta1 and beta2 must lie in [0, 1)")
        if weight_decay < 0:
            raise ValueError(f"weight_decay must be >= 0, got {weight_decay}")
        self.lr = float(lr)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.weight_decay = float(weight_decay)
        self.t = 0
        self._m: list[np.ndarray] | None = None
        self._v: list[np.ndarray] | None = None

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        """Apply one update to every array in ``params``, in place.

        The params list must keep the same arrays (identity and shape) across
        calls; moment state is allocated on the first call.
        """
        if len(params) != len(grads):
            raise ValueError("params and grads must have equal length")
        if self._m is None:
            self._m = [np.zeros_like(p) for p in params]
            self._v = [np.zeros_like(p) for p in params]
        if len(self._m) != len(params):
            raise ValueError("parameter list changed length between steps")
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self._m, self._v):
            if g.shape != p.shape:
                raise ValueError(f"gradient shape {g.shape} != parameter shape {p.shape}")
            g_eff = g + self.weight_decay * p if self.weight_decay else g
            m *= self.beta1
            m += (1.0 - self.beta1) * g_eff
            v *= self.beta2
            v += (1.0 - self.beta2) * np.square(g_eff)
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


class AdaGrad:
    """AdaGrad with a hyperbolically decaying base rate, used for the center.

    Step ``t`` (1-based) uses ``lr_eff = lr0 / (1 + (t - 1) * decay)``; the
    squared-gradient accumulator is incremented before the update, so the
    very first step divides by ``|g|`` and has magnitude close to ``lr0``.
    """

    def __init__(self, lr0: float, decay: float = 0.0, eps: float = 1e-10) -> None:
        if lr0 <= 0:
            raise ValueError(f"lr0 must be positive, got {lr0}")
        if decay < 0:
            raise ValueError(f"decay must be >= 0, got {decay}")
        self.lr0 = float(lr0)
        self.decay = float(decay)
        self.eps = float(eps)
        self.t = 0
        self._accum: np.ndarray | None = None

    def step(self, param: np.ndarray, grad: np.ndarray) -> None:
        """Apply one update to ``param`` in place."""
        if grad.shape != param.shape:
            raise ValueError(f"gradient shape {grad.shape} != parameter shape {param.shape}")
        if self._accum is None:
            self._accum = np.zeros_like(param)
        elif self._accum.shape != param.shape:
            raise ValueError("parameter shape changed between steps")
        self.t += 1
        lr_eff = self.lr0 / (1.0 + (self.t - 1) * self.decay)
        self._accum += np.square(grad)
        param -= lr_eff * grad / (np.sqrt(self._accum) + self.eps)
