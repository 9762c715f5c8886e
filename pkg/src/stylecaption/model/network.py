"""End-to-end captioner: features -> style embedding -> prefix -> decoder."""

from __future__ import annotations

import torch
import torch.nn as nn

from ..frontend.layersum import LayerWeights, weighted_layer_sum
from .aggregator import FixedVectorProjection, SequenceAggregator
from .decoder import TextDecoderBase
from .decoding import Strategy, decode
from .losses import caption_cross_entropy
from .mapper import PrefixMapper
from .vocab import Vocabulary

INPUT_KINDS = ("layered", "mel", "fixed")


class StyleCaptioner(nn.Module):
    """Aggregation (or fixed-vector projection), mapping network, and a
    frozen decoder backbone wired into one trainable captioner.

    ``input_kind``: "layered" and "mel" consume (B, L, T, D) stacks through
    the trainable layer weights and the aggregation module ("mel" is simply a
    single-layer stack); "fixed" consumes (B, D_x) vectors through a single
    linear projection, bypassing aggregation.
    """

    def __init__(
        self,
        input_kind: str,
        encoder: SequenceAggregator | FixedVectorProjection,
        mapper: PrefixMapper,
        decoder: TextDecoderBase,
        vocab: Vocabulary,
        layer_weights: LayerWeights | None = None,
    ):
        super().__init__()
        if input_kind not in INPUT_KINDS:
            raise ValueError(f"input_kind must be one of {INPUT_KINDS}")
        uses_stack = input_kind in ("layered", "mel")
        if uses_stack and not isinstance(encoder, SequenceAggregator):
            raise ValueError("layered/mel input requires a SequenceAggregator encoder")
        if uses_stack and layer_weights is None:
            raise ValueError("layered/mel input requires layer weights")
        if input_kind == "fixed" and not isinstance(encoder, FixedVectorProjection):
            raise ValueError("fixed input requires a FixedVectorProjection encoder")
        self.input_kind = input_kind
        self.encoder = encoder
        self.mapper = mapper
        self.decoder = decoder
        self.vocab = vocab
        self.layer_weights = layer_weights if uses_stack else None

    @property
    def d_z(self) -> int:
        return self.mapper.cfg.d_z

    def encode(self, features: torch.Tensor, lengths: torch.Tensor | None = None) -> torch.Tensor:
        """Features -> (B, d_z) style embeddings."""
        if self.input_kind == "fixed":
            return self.encoder(features)
        if features.dim() != 4:
            raise ValueError(f"expected (B, L, T, D) stack, got shape {tuple(features.shape)}")
        if lengths is None:
            lengths = torch.full((features.shape[0],), features.shape[2], dtype=torch.long)
        frames = weighted_layer_sum(features, self.layer_weights)
        return self.encoder(frames, lengths)

    def prefixes(self, z: torch.Tensor) -> torch.Tensor:
        return self.mapper(z)

    def loss(
        self,
        features: torch.Tensor,
        lengths: torch.Tensor | None,
        targets: torch.Tensor,
        target_lens: torch.Tensor,
    ) -> torch.Tensor:
        prefix = self.prefixes(self.encode(features, lengths))
        return caption_cross_entropy(
            prefix, targets, target_lens, self.decoder,
            pad_id=self.vocab.pad_id, eos_id=self.vocab.eos_id,
        )

    @torch.no_grad()
    def generate(
        self,
        features: torch.Tensor,
        lengths: torch.Tensor | None,
        strategy: Strategy,
        max_len: int = 64,
    ) -> list[str]:
        was_training = self.training
        self.eval()
        try:
            prefix = self.prefixes(self.encode(features, lengths))
            token_ids = decode(prefix, self.decoder, strategy, max_len, self.vocab.eos_id)
        finally:
            if was_training:
                self.train()
        return [self.vocab.decode(ids) for ids in token_ids]
