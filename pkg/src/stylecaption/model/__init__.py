"""Captioner network, baseline, losses, decoding, and training."""

from .aggregator import AggregatorConfig, FixedVectorProjection, SequenceAggregator
from .baseline import BaselineConfig, Seq2SeqBaseline
from .checkpoint import load_checkpoint, save_checkpoint
from .data import Batch, ManifestBatches, inspect_features
from .decoder import TextDecoderBase, TinyDecoderConfig, TinyTransformerDecoder
from .decoding import Beam, Greedy, Sample, Strategy, decode
from .losses import caption_cross_entropy
from .mapper import MapperConfig, PrefixMapper
from .network import StyleCaptioner
from .training import (
    TrainConfig,
    TrainState,
    frozen_parameter_digests,
    parameter_digest,
    pretrain_tiny_decoder,
    train_model,
    trainable_parameter_groups,
)
from .vocab import Vocabulary

__all__ = [
    "AggregatorConfig",
    "BaselineConfig",
    "Batch",
    "Beam",
    "FixedVectorProjection",
    "Greedy",
    "ManifestBatches",
    "MapperConfig",
    "PrefixMapper",
    "Sample",
    "Seq2SeqBaseline",
    "SequenceAggregator",
    "Strategy",
    "StyleCaptioner",
    "TextDecoderBase",
    "TinyDecoderConfig",
    "TinyTransformerDecoder",
    "TrainConfig",
    "TrainState",
    "Vocabulary",
    "caption_cross_entropy",
    "decode",
    "frozen_parameter_digests",
    "inspect_features",
    "load_checkpoint",
    "parameter_digest",
    "pretrain_tiny_decoder",
    "save_checkpoint",
    "train_model",
    "trainable_parameter_groups",
]
