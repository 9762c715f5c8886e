"""Text decoders that accept continuous prefix embeddings.

``TextDecoderBase`` is the contract every decoder backbone fulfils: it embeds
token ids into its word-embedding space and maps a sequence of embeddings
(prefix vectors followed by embedded tokens) to next-token logits. Pretrained
language models plug in through this interface; ``TinyTransformerDecoder``
is the built-in desk-scale backbone.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass

import torch
import torch.nn as nn


class TextDecoderBase(nn.Module, ABC):
    """Contract: ``embed`` token ids, ``forward`` prefix+token embeddings to logits."""

    vocab_size: int
    d_w: int

    @abstractmethod
    def embed(self, token_ids: torch.Tensor) -> torch.Tensor:
        """(B, S) int ids -> (B, S, d_w) embeddings."""

    @abstractmethod
    def forward(
        self,
        embeddings: torch.Tensor,
        prefix_len: int = 0,
        pad_mask: torch.Tensor | None = None,
    ) -> torch.Tensor:
        """(B, S, d_w) -> (B, S, vocab_size) next-token logits.

        ``prefix_len`` marks how many leading positions are continuous prefix
        vectors rather than embedded tokens; ``pad_mask`` is True at valid
        positions.
        """

    def freeze(self) -> None:
        for p in self.parameters():
            p.requires_grad_(False)

    def unfreeze(self) -> None:
        for p in self.parameters():
            p.requires_grad_(True)

    @property
    def frozen(self) -> bool:
        return all(not p.requires_grad for p in self.parameters())


@dataclass(frozen=True)
class TinyDecoderConfig:
    vocab_size: int
    d_w: int = 128
    layers: int = 2
    heads: int = 4
    ffn: int = 256
    dropout: float = 0.1
    max_positions: int = 256

    def __post_init__(self):
        if self.d_w % self.heads != 0:
            raise ValueError(f"heads ({self.heads}) must divide d_w ({self.d_w})")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must be in [0, 1)")


class TinyTransformerDecoder(TextDecoderBase):
    """Small causal Transformer language model over a word-level vocabulary.

    Positional embeddings attach only to token positions (counted from the
    end of the prefix), so a model pretrained as a plain LM sees tokens at
    the same positions when prefix vectors are later prepended. A learned
    start embedding stands in for BOS during LM pretraining.
    """

    def __init__(self, cfg: TinyDecoderConfig):
        super().__init__()
        self.cfg = cfg
        self.vocab_size = cfg.vocab_size
        self.d_w = cfg.d_w
        self.token_embedding = nn.Embedding(cfg.vocab_size, cfg.d_w)
        self.position_embedding = nn.Embedding(cfg.max_positions, cfg.d_w)
        self.start_embedding = nn.Parameter(torch.zeros(cfg.d_w))
        nn.init.normal_(self.start_embedding, std=0.02)
        layer = nn.TransformerEncoderLayer(
            d_model=cfg.d_w,
            nhead=cfg.heads,
            dim_feedforward=cfg.ffn,
            dropout=cfg.dropout,
            activation="gelu",
            batch_first=True,
            norm_first=True,
        )
        self.layers = nn.ModuleList(
            [type(layer)(cfg.d_w, cfg.heads, cfg.ffn, cfg.dropout, "gelu", batch_first=True, norm_first=True)
             for _ in range(cfg.layers)]
        )
        self.final_norm = nn.LayerNorm(cfg.d_w)
        self.head = nn.Linear(cfg.d_w, cfg.vocab_size)

    def embed(self, token_ids: torch.Tensor) -> torch.Tensor:
        return self.token_embedding(token_ids)

    def start_prefix(self, batch_size: int) -> torch.Tensor:
        """(B, 1, d_w) start embedding acting as a length-1 prefix for LM use."""
        return self.start_embedding.view(1, 1, -1).expand(batch_size, 1, -1)

    def forward(
        self,
        embeddings: torch.Tensor,
        prefix_len: int = 0,
        pad_mask: torch.Tensor | None = None,
    ) -> torch.Tensor:
        batch, seq_len, _ = embeddings.shape
        n_tokens = seq_len - prefix_len
        if n_tokens > self.cfg.max_positions:
            raise ValueError(
                f"{n_tokens} token positions exceed max_positions={self.cfg.max_positions}"
            )
        x = embeddings
        if n_tokens > 0:
            positions = torch.arange(n_tokens, device=x.device)
            pos = self.position_embedding(positions)
            x = torch.cat([x[:, :prefix_len], x[:, prefix_len:] + pos], dim=1)
        causal = torch.triu(
            torch.ones(seq_len, seq_len, dtype=torch.bool, device=x.device), diagonal=1
        )
        key_padding = None if pad_mask is None else ~pad_mask
        for layer in self.layers:
            x = layer(x, src_mask=causal, src_key_padding_mask=key_padding)
        return self.head(self.final_norm(x))
