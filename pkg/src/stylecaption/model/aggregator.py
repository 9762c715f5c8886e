"""Variable-length feature sequences pooled into fixed-length style embeddings."""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn
from torch.nn.utils.rnn import pack_padded_sequence, pad_packed_sequence


@dataclass(frozen=True)
class AggregatorConfig:
    input_dim: int
    d_z: int = 256
    blstm_layers: int = 4
    blstm_hidden: int = 256
    mha_heads: int = 8
    pooling: str = "sum"
    dropout: float = 0.0

    def __post_init__(self):
        if self.pooling not in ("sum", "mean"):
            raise ValueError(f"pooling must be 'sum' or 'mean', got {self.pooling!r}")
        if (2 * self.blstm_hidden) % self.mha_heads != 0:
            raise ValueError(
                f"mha_heads ({self.mha_heads}) must divide the BLSTM output width "
                f"({2 * self.blstm_hidden})"
            )
        for name in ("input_dim", "d_z", "blstm_layers", "blstm_hidden", "mha_heads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")


class SequenceAggregator(nn.Module):
    """BLSTM stack, one self-attention block over its outputs, then a
    per-frame projection to d_z and sum or mean pooling along frames."""

    def __init__(self, cfg: AggregatorConfig):
        super().__init__()
        self.cfg = cfg
        self.blstm = nn.LSTM(
            cfg.input_dim,
            cfg.blstm_hidden,
            num_layers=cfg.blstm_layers,
            bidirectional=True,
            batch_first=True,
            dropout=cfg.dropout if cfg.blstm_layers > 1 else 0.0,
        )
        width = 2 * cfg.blstm_hidden
        self.attention = nn.MultiheadAttention(
            width, cfg.mha_heads, dropout=cfg.dropout, batch_first=True
        )
        self.proj = nn.Linear(width, cfg.d_z)

    def pre_pool(
        self, frames: torch.Tensor, lengths: torch.Tensor
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """Everything up to (not including) pooling.

        Returns the (B, T, d_z) pre-pool tensor and the (B, T) validity mask.
        """
        if frames.dim() != 3:
            raise ValueError(f"expected (B, T, D) frames, got shape {tuple(frames.shape)}")
        batch, max_t, dim = frames.shape
        if dim != self.cfg.input_dim:
            raise ValueError(f"feature dim {dim} != configured input_dim {self.cfg.input_dim}")
        if max_t < 1 or bool((lengths < 1).any()):
            raise ValueError("empty feature sequence")

        packed = pack_padded_sequence(
            frames, lengths.cpu(), batch_first=True, enforce_sorted=False
        )
        blstm_out, _ = self.blstm(packed)
        blstm_out, _ = pad_packed_sequence(blstm_out, batch_first=True, total_length=max_t)

        valid = torch.arange(max_t, device=frames.device)[None, :] < lengths[:, None]
        attn_out, _ = self.attention(
            blstm_out, blstm_out, blstm_out, key_padding_mask=~valid, need_weights=False
        )
        hidden = blstm_out + attn_out
        return self.proj(hidden), valid

    def pool(self, pre_pool: torch.Tensor, valid: torch.Tensor, pooling: str | None = None) -> torch.Tensor:
        pooling = pooling or self.cfg.pooling
        masked = pre_pool * valid.unsqueeze(-1).to(pre_pool.dtype)
        total = masked.sum(dim=1)
        if pooling == "sum":
            return total
        return total / valid.sum(dim=1, keepdim=True).to(pre_pool.dtype)

    def forward(self, frames: torch.Tensor, lengths: torch.Tensor) -> torch.Tensor:
        pre, valid = self.pre_pool(frames, lengths)
        return self.pool(pre, valid)


class FixedVectorProjection(nn.Module):
    """Linear map from a fixed speaker vector to the style embedding space;
    the aggregation module is bypassed entirely on this path."""

    def __init__(self, input_dim: int, d_z: int):
        super().__init__()
        self.input_dim = input_dim
        self.proj = nn.Linear(input_dim, d_z)

    def forward(self, vectors: torch.Tensor) -> torch.Tensor:
        if vectors.shape[-1] != self.input_dim:
            raise ValueError(
                f"vector dim {vectors.shape[-1]} != configured input_dim {self.input_dim}"
            )
        return self.proj(vectors)
