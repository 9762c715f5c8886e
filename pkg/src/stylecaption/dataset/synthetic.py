"""Synthetic speech-caption corpus with linearly recoverable style factors.

Each record carries a layered feature stack built so that every factor
linearly biases its own block of feature dimensions (documented mapping):

* dimensions split into four equal blocks, ordered gender / pitch / speed /
  volume (leftover dimensions are plain noise);
* gender flips the sign of a fixed alternating pattern on its block
  (male ``+``, female ``-``);
* pitch adds a level shift of {low: -1.5, mid: 0.0, high: +1.5} to its block;
* speed adds the same level shift to its block and additionally scales the
  frame count: the frame range splits into thirds and high speed draws from
  the lowest third (fast speech, fewer frames), mid from the middle, low
  from the top;
* volume adds a unit base mean to its block, then applies a global gain of
  {low: 0.6, mid: 1.0, high: 1.6} to the whole feature matrix.

Base noise is N(0, 0.3) per frame and dimension; layer ``l`` adds extra
N(0, 0.1*l) noise on top of the shared signal. Mean-pooled features are
therefore linearly separable per factor by construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .records import FACTOR_LEVELS, FACTOR_NAMES, DatasetRecord, Manifest, StyleFactors
from .tensorio import write_tensor

DEFAULT_TEMPLATES = (
    "the speaker is {gender} with {pitch} pitch , {speed} speed and {volume} volume .",
    "a {gender} voice , the pitch is {pitch} , the speed is {speed} , the volume is {volume} .",
    "this {gender} speaker talks at a {speed} speed with {pitch} pitch and {volume} volume .",
    "{gender} speech whose volume is {volume} , pitch is {pitch} and speed is {speed} .",
)

GENDER_SIGN = {"male": 1.0, "female": -1.0}
LEVEL_SHIFT = {"low": -1.5, "mid": 0.0, "high": 1.5}
VOLUME_GAIN = {"low": 0.6, "mid": 1.0, "high": 1.6}
BASE_NOISE_STD = 0.3
LAYER_NOISE_STD = 0.1
GENDER_PATTERN_SCALE = 1.5

_SLOTS = tuple("{%s}" % name for name in FACTOR_NAMES)


@dataclass(frozen=True)
class SyntheticSpec:
    n_samples: int
    frames_range: tuple[int, int] = (24, 60)
    feature_dim: int = 32
    n_layers: int = 3
    caption_templates: tuple[str, ...] = DEFAULT_TEMPLATES
    seed: int = 0
    n_speakers: int = 10

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")
        lo, hi = self.frames_range
        if not (1 <= lo <= hi):
            raise ValueError(f"frames_range must satisfy 1 <= min <= max, got {self.frames_range}")
        if self.feature_dim < 8:
            raise ValueError("feature_dim must be >= 8 (two dims per factor block)")
        if self.n_layers < 1:
            raise ValueError("n_layers must be >= 1")
        if self.n_speakers < 1:
            raise ValueError("n_speakers must be >= 1")
        if not self.caption_templates:
            raise ValueError("caption_templates must be non-empty")
        for tpl in self.caption_templates:
            missing = [slot for slot in _SLOTS if slot not in tpl]
            if missing:
                raise ValueError(f"template {tpl!r} is missing slot(s) {missing}")


def factor_blocks(feature_dim: int) -> dict[str, slice]:
    """Disjoint feature-dimension block per factor, in FACTOR_NAMES order."""
    width = feature_dim // 4
    return {
        name: slice(i * width, (i + 1) * width)
        for i, name in enumerate(FACTOR_NAMES)
    }


def speed_frame_bounds(frames_range: tuple[int, int]) -> dict[str, tuple[int, int]]:
    """Inclusive frame-count interval per speed level (high = lowest third)."""
    lo, hi = frames_range
    cut1 = lo + (hi - lo) / 3.0
    cut2 = lo + 2.0 * (hi - lo) / 3.0
    return {
        "high": (lo, int(np.floor(cut1))),
        "mid": (int(np.floor(cut1)) + 1 if hi > lo else lo, int(np.floor(cut2))),
        "low": (int(np.floor(cut2)) + 1 if hi > lo else lo, hi),
    }


def _render_caption(template: str, factors: StyleFactors) -> str:
    return template.format(**factors.to_dict())


def synthesize_features(
    factors: StyleFactors, spec: SyntheticSpec, rng: np.random.Generator
) -> np.ndarray:
    """Draw one (L, T, D) stack realizing the documented factor mapping."""
    bounds = speed_frame_bounds(spec.frames_range)[factors.speed]
    n_frames = int(rng.integers(bounds[0], bounds[1] + 1))
    d = spec.feature_dim
    blocks = factor_blocks(d)

    signal = rng.normal(0.0, BASE_NOISE_STD, size=(n_frames, d))
    gender_width = blocks["gender"].stop - blocks["gender"].start
    pattern = GENDER_PATTERN_SCALE * np.where(np.arange(gender_width) % 2 == 0, 1.0, -1.0)
    signal[:, blocks["gender"]] += GENDER_SIGN[factors.gender] * pattern
    signal[:, blocks["pitch"]] += LEVEL_SHIFT[factors.pitch]
    signal[:, blocks["speed"]] += LEVEL_SHIFT[factors.speed]
    signal[:, blocks["volume"]] += 1.0
    signal *= VOLUME_GAIN[factors.volume]

    layers = np.empty((spec.n_layers, n_frames, d), dtype=np.float32)
    layers[0] = signal
    for layer in range(1, spec.n_layers):
        layers[layer] = signal + rng.normal(0.0, LAYER_NOISE_STD * layer, size=(n_frames, d))
    return layers


def _sample_factors(rng: np.random.Generator) -> StyleFactors:
    values = {
        name: FACTOR_LEVELS[name][int(rng.integers(len(FACTOR_LEVELS[name])))]
        for name in FACTOR_NAMES
    }
    return StyleFactors(**values)


def generate_synthetic(spec: SyntheticSpec, out_dir: str | Path) -> Manifest:
    """Generate a synthetic manifest; feature containers land in ``out_dir/features``.

    speech_ref values are stored relative to ``out_dir`` so the manifest can
    be saved anywhere inside it. Deterministic given ``spec.seed``.
    """
    out_dir = Path(out_dir)
    feat_dir = out_dir / "features"
    feat_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(spec.seed)

    records: list[DatasetRecord] = []
    for i in range(spec.n_samples):
        factors = _sample_factors(rng)
        template = spec.caption_templates[int(rng.integers(len(spec.caption_templates)))]
        features = synthesize_features(factors, spec, rng)
        rec_id = f"syn-{i:06d}"
        rel_ref = f"features/{rec_id}.bin"
        write_tensor(out_dir / rel_ref, features)
        records.append(
            DatasetRecord(
                id=rec_id,
                speech_ref=rel_ref,
                caption=_render_caption(template, factors),
                speaker_id=f"spk-{i % spec.n_speakers:03d}",
                factors=factors,
            )
        )

    manifest = Manifest(records=records, split_tag="unsplit")
    manifest.path = out_dir / "manifest.jsonl"
    return manifest
