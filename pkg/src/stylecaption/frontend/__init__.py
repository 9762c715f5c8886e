"""Model input features: mel spectrograms, layered stacks, fixed vectors."""

from .layersum import LayerWeights, weighted_layer_sum
from .loading import LoadedFeatures, load_features
from .mel import MelConfig, compute_mel, mel_filterbank, num_frames, read_wav, write_wav

__all__ = [
    "LayerWeights",
    "LoadedFeatures",
    "MelConfig",
    "compute_mel",
    "load_features",
    "mel_filterbank",
    "num_frames",
    "read_wav",
    "weighted_layer_sum",
    "write_wav",
]
