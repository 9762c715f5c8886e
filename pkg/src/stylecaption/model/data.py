"""Batch assembly from manifests: padded feature stacks plus encoded captions."""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np
import torch

from ..dataset.records import Manifest
from ..frontend.loading import load_features
from ..frontend.mel import MelConfig
from .vocab import Vocabulary


@dataclass
class Batch:
    ids: list[str]
    features: torch.Tensor  # (B, L, T, D) stack or (B, D_x) fixed vectors
    lengths: torch.Tensor | None  # frame counts, None for fixed vectors
    targets: torch.Tensor  # (B, S) token ids, pad-filled
    target_lens: torch.Tensor

    @property
    def size(self) -> int:
        return len(self.ids)


def inspect_features(manifest: Manifest, mel_cfg: MelConfig = MelConfig()) -> tuple[str, int, int]:
    """Peek at the first record: returns (kind, n_layers, feature_dim).

    kind is "fixed" for rank-1 containers, else "layered" (waveforms load as
    single-layer mel stacks).
    """
    if not manifest.records:
        raise ValueError("manifest is empty")
    loaded = load_features(manifest.records[0], manifest, mel_cfg)
    if loaded.is_fixed_vector:
        return "fixed", 0, loaded.array.shape[0]
    return "layered", loaded.array.shape[0], loaded.array.shape[2]


class ManifestBatches:
    """Loads a manifest's features (cached in memory) and serves collated batches."""

    def __init__(
        self,
        manifest: Manifest,
        vocab: Vocabulary,
        batch_size: int = 16,
        mel_cfg: MelConfig = MelConfig(),
    ):
        if not manifest.records:
            raise ValueError("manifest is empty")
        if batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        self.manifest = manifest
        self.vocab = vocab
        self.batch_size = batch_size

        self._features: list[np.ndarray] = []
        self._tokens: list[list[int]] = []
        kind = None
        for rec in manifest.records:
            arr = load_features(rec, manifest, mel_cfg).array
            rec_kind = "fixed" if arr.ndim == 1 else "layered"
            if kind is None:
                kind = rec_kind
                self._shape_ref = arr.shape
            elif rec_kind != kind:
                raise ValueError(f"record {rec.id!r}: mixed fixed/layered features in one manifest")
            if kind == "layered" and (
                arr.shape[0] != self._shape_ref[0] or arr.shape[2] != self._shape_ref[2]
            ):
                raise ValueError(
                    f"record {rec.id!r}: layer/feature dims {arr.shape} inconsistent "
                    f"with {self._shape_ref}"
                )
            if kind == "fixed" and arr.shape != self._shape_ref:
                raise ValueError(f"record {rec.id!r}: vector dim {arr.shape} != {self._shape_ref}")
            self._features.append(arr)
            self._tokens.append(vocab.encode(rec.caption))
        self.kind = kind
        self.max_caption_tokens = max(len(t) for t in self._tokens)

    def __len__(self) -> int:
        return len(self._features)

    def _collate(self, indices: list[int]) -> Batch:
        pad = self.vocab.pad_id
        tokens = [self._tokens[i] for i in indices]
        max_s = max(len(t) for t in tokens)
        targets = torch.full((len(indices), max_s), pad, dtype=torch.long)
        target_lens = torch.zeros(len(indices), dtype=torch.long)
        for row, toks in enumerate(tokens):
            targets[row, : len(toks)] = torch.tensor(toks, dtype=torch.long)
            target_lens[row] = len(toks)

        if self.kind == "fixed":
            feats = torch.from_numpy(np.stack([self._features[i] for i in indices])).float()
            return Batch(
                ids=[self.manifest.records[i].id for i in indices],
                features=feats, lengths=None, targets=targets, target_lens=target_lens,
            )

        arrays = [self._features[i] for i in indices]
        n_layers, _, dim = arrays[0].shape
        max_t = max(a.shape[1] for a in arrays)
        feats = torch.zeros(len(indices), n_layers, max_t, dim)
        lengths = torch.zeros(len(indices), dtype=torch.long)
        for row, arr in enumerate(arrays):
            feats[row, :, : arr.shape[1], :] = torch.from_numpy(arr)
            lengths[row] = arr.shape[1]
        return Batch(
            ids=[self.manifest.records[i].id for i in indices],
            features=feats, lengths=lengths, targets=targets, target_lens=target_lens,
        )

    def batches(self, rng: random.Random | None = None) -> list[Batch]:
        """All batches in manifest order, shuffled first when ``rng`` is given."""
        order = list(range(len(self._features)))
        if rng is not None:
            rng.shuffle(order)
        return [
            self._collate(order[start : start + self.batch_size])
            for start in range(0, len(order), self.batch_size)
        ]
