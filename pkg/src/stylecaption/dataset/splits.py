"""Speaker-disjoint train/dev/test splitting."""

from __future__ import annotations

import math
import random

from ..errors import TooFewSpeakersError
from .records import Manifest


def split_manifest(
    manifest: Manifest,
    fractions: tuple[float, float, float],
    seed: int,
) -> tuple[Manifest, Manifest, Manifest]:
    """Partition a manifest into speaker-disjoint train/dev/test manifests.

    Speakers are shuffled deterministically by ``seed`` and assigned greedily
    to the split with the largest remaining record deficit, so split record
    counts track ``fractions`` as closely as speaker granularity allows.
    The union of the outputs equals the input, with record order preserved.
    """
    if not math.isclose(sum(fractions), 1.0, abs_tol=1e-9):
        raise ValueError(f"fractions must sum to 1, got {fractions}")
    if any(f < 0 for f in fractions):
        raise ValueError(f"fractions must be nonnegative, got {fractions}")

    speakers = sorted(manifest.speakers())
    if len(speakers) < 3:
        raise TooFewSpeakersError(
            f"speaker-disjoint split needs >= 3 distinct speakers, got {len(speakers)}"
        )

    counts = {spk: 0 for spk in speakers}
    for rec in manifest.records:
        counts[rec.speaker_id] += 1

    rng = random.Random(seed)
    rng.shuffle(speakers)

    n_total = len(manifest)
    deficits = [frac * n_total for frac in fractions]
    assignment: dict[str, int] = {}
    for spk in speakers:
        bucket = max(range(3), key=lambda i: deficits[i])
        assignment[spk] = bucket
        deficits[bucket] -= counts[spk]

    # Positive-fraction splits must not come out empty; steal a speaker from
    # the most populated split if speaker granularity left one bare.
    for bucket in range(3):
        if fractions[bucket] > 0 and not any(b == bucket for b in assignment.values()):
            by_bucket: dict[int, list[str]] = {0: [], 1: [], 2: []}
            for spk, b in assignment.items():
                by_bucket[b].append(spk)
            donor = max(by_bucket, key=lambda b: len(by_bucket[b]))
            moved = min(by_bucket[donor], key=lambda s: counts[s])
            assignment[moved] = bucket

    tags = ("train", "dev", "test")
    outputs = []
    for bucket, tag in enumerate(tags):
        recs = [rec for rec in manifest.records if assignment[rec.speaker_id] == bucket]
        out = Manifest(records=recs, split_tag=tag)
        out.path = manifest.path
        outputs.append(out)
    return outputs[0], outputs[1], outputs[2]
