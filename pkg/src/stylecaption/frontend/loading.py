"""Resolve a record's speech_ref into model-ready features."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..dataset.records import DatasetRecord, Manifest
from ..dataset.tensorio import read_tensor
from ..errors import FeatureIOError
from .mel import MelConfig, compute_mel, read_wav


@dataclass(frozen=True)
class LoadedFeatures:
    """Either a layered (L, T, D) stack or a rank-1 fixed vector."""

    array: np.ndarray

    @property
    def is_fixed_vector(self) -> bool:
        return self.array.ndim == 1

    @property
    def shape(self) -> tuple[int, ...]:
        return self.array.shape


def load_features(
    record: DatasetRecord,
    manifest: Manifest | None = None,
    mel_cfg: MelConfig = MelConfig(),
) -> LoadedFeatures:
    """Load a record's features from its speech_ref.

    ``.bin`` containers yield a layered stack or a fixed vector depending on
    rank; waveform files are run through ``compute_mel`` and wrapped as a
    single-layer stack.
    """
    path = (
        manifest.resolve_speech_ref(record)
        if manifest is not None
        else Path(record.speech_ref)
    )
    if not path.exists():
        raise FeatureIOError(f"record {record.id!r}: speech_ref {path} does not exist")
    if path.suffix.lower() == ".wav":
        waveform, rate = read_wav(path)
        mel = compute_mel(waveform, rate, mel_cfg)
        return LoadedFeatures(mel[np.newaxis, :, :])
    return LoadedFeatures(read_tensor(path))
