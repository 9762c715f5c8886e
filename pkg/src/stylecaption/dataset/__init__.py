"""Corpus loading, splitting, synthesis and serialization."""

from .records import (
    FACTOR_LEVELS,
    FACTOR_NAMES,
    DatasetRecord,
    Manifest,
    StyleFactors,
    load_manifest,
    manifest_from_records,
    save_manifest,
)
from .splits import split_manifest
from .synthetic import (
    DEFAULT_TEMPLATES,
    SyntheticSpec,
    factor_blocks,
    generate_synthetic,
    speed_frame_bounds,
    synthesize_features,
)
from .tensorio import read_tensor, write_tensor

__all__ = [
    "DatasetRecord",
    "DEFAULT_TEMPLATES",
    "FACTOR_LEVELS",
    "FACTOR_NAMES",
    "Manifest",
    "StyleFactors",
    "SyntheticSpec",
    "factor_blocks",
    "generate_synthetic",
    "load_manifest",
    "manifest_from_records",
    "read_tensor",
    "save_manifest",
    "speed_frame_bounds",
    "split_manifest",
    "synthesize_features",
    "write_tensor",
]
