"""Trainable softmax-weighted sum over the layers of a feature stack."""

from __future__ import annotations

import torch
import torch.nn as nn


class LayerWeights(nn.Module):
    """Unconstrained logits, one per layer; softmax keeps the effective
    weights on the probability simplex."""

    def __init__(self, n_layers: int):
        super().__init__()
        if n_layers < 1:
            raise ValueError("n_layers must be >= 1")
        self.logits = nn.Parameter(torch.zeros(n_layers))

    @property
    def n_layers(self) -> int:
        return self.logits.numel()

    def normalized(self) -> torch.Tensor:
        return torch.softmax(self.logits, dim=0)

    def forward(self, stack: torch.Tensor) -> torch.Tensor:
        return weighted_layer_sum(stack, self)


def weighted_layer_sum(stack: torch.Tensor, weights: LayerWeights) -> torch.Tensor:
    """Collapse a layer stack by the softmax-normalized layer weights.

    ``stack`` is (L, T, D) or batched (B, L, T, D); the layer axis is reduced.
    """
    if stack.dim() not in (3, 4):
        raise ValueError(f"expected (L, T, D) or (B, L, T, D), got shape {tuple(stack.shape)}")
    layer_axis = 0 if stack.dim() == 3 else 1
    n_layers = stack.shape[layer_axis]
    if n_layers != weights.n_layers:
        raise ValueError(
            f"stack has {n_layers} layers but weights cover {weights.n_layers}"
        )
    w = weights.normalized().to(stack.dtype)
    shape = [1, 1, 1] if stack.dim() == 3 else [1, 1, 1, 1]
    shape[layer_axis] = n_layers
    return (stack * w.view(shape)).sum(dim=layer_axis)
