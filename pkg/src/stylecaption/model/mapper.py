"""Mapping network: style embedding -> prefix embeddings for the decoder."""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn as nn


@dataclass(frozen=True)
class MapperConfig:
    d_z: int
    d_w: int
    transformer_layers: int = 8
    prefix_length: int = 40
    heads: int = 8
    dropout: float = 0.2
    z_tokens: int = 1
    ffn_mult: int = 4

    def __post_init__(self):
        if self.prefix_length < 1:
            raise ValueError("prefix_length must be >= 1")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")
        if self.d_w % self.heads != 0:
            raise ValueError(f"heads ({self.heads}) must divide d_w ({self.d_w})")
        if self.z_tokens < 1:
            raise ValueError("z_tokens must be >= 1")


class PrefixMapper(nn.Module):
    """Projects z to a few word-width tokens, appends projected trainable
    constants, runs the Transformer stack, and reads the prefix embeddings
    off the last ``prefix_length`` output positions."""

    def __init__(self, cfg: MapperConfig):
        super().__init__()
        self.cfg = cfg
        self.constants = nn.Parameter(torch.randn(cfg.prefix_length, cfg.d_z) * 0.02)
        self.z_proj = nn.Linear(cfg.d_z, cfg.z_tokens * cfg.d_w)
        self.const_proj = nn.Linear(cfg.d_z, cfg.d_w)
        self.encoder = nn.ModuleList(
            [
                nn.TransformerEncoderLayer(
                    d_model=cfg.d_w,
                    nhead=cfg.heads,
                    dim_feedforward=cfg.ffn_mult * cfg.d_w,
                    dropout=cfg.dropout,
                    activation="gelu",
                    batch_first=True,
                    norm_first=True,
                )
                for _ in range(cfg.transformer_layers)
            ]
        )
        self.final_norm = nn.LayerNorm(cfg.d_w)

    @property
    def prefix_length(self) -> int:
        return self.cfg.prefix_length

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        """(B, d_z) -> (B, prefix_length, d_w)."""
        if z.dim() != 2 or z.shape[-1] != self.cfg.d_z:
            raise ValueError(f"expected (B, {self.cfg.d_z}) style embeddings, got {tuple(z.shape)}")
        batch = z.shape[0]
        z_tok = self.z_proj(z).view(batch, self.cfg.z_tokens, self.cfg.d_w)
        const = self.const_proj(self.constants).unsqueeze(0).expand(batch, -1, -1)
        x = torch.cat([z_tok, const], dim=1)
        for layer in self.encoder:
            x = layer(x)
        x = self.final_norm(x)
        return x[:, -self.cfg.prefix_length :, :]
