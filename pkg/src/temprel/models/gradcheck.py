"""Finite-difference verification of a whole model's gradients."""

from __future__ import annotations

import numpy as np

from .. import nn


def check_model_gradients(
    model,
    inputs,
    target: int,
    epsilon: float = 1e-5,
    sample_per_tensor: int | None = None,
    seed: int = 0,
) -> float:
    """Max relative error of loss_and_grads against central differences.

    The check runs with dropout disabled so the loss is a deterministic
    function of the parameters.
    """
    _, analytic = model.loss_and_grads(inputs, target, training=False)

    def loss_fn() -> float:
        loss, _ = model.loss_and_grads(inputs, target, training=False)
        return loss

    return nn.gradient_check(
        loss_fn,
        model.tensors(),
        analytic,
        epsilon=epsilon,
        sample_per_tensor=sample_per_tensor,
        rng=np.random.default_rng(seed),
    )
