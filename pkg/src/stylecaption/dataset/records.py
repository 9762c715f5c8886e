"""Speech-caption corpus records and JSON-lines manifest IO."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from ..errors import DuplicateIdError, ManifestError

GENDER_LEVELS = ("male", "female")
TERNARY_LEVELS = ("low", "mid", "high")

FACTOR_NAMES = ("gender", "pitch", "speed", "volume")
FACTOR_LEVELS: dict[str, tuple[str, ...]] = {
    "gender": GENDER_LEVELS,
    "pitch": TERNARY_LEVELS,
    "speed": TERNARY_LEVELS,
    "volume": TERNARY_LEVELS,
}

SPLIT_TAGS = ("train", "dev", "test", "unsplit")


@dataclass(frozen=True)
class StyleFactors:
    """Categorical style labels attached to a corpus record."""

    gender: str
    pitch: str
    speed: str
    volume: str

    def __post_init__(self):
        for name in FACTOR_NAMES:
            value = getattr(self, name)
            if value not in FACTOR_LEVELS[name]:
                raise ValueError(f"{name} must be one of {FACTOR_LEVELS[name]}, got {value!r}")

    def to_dict(self) -> dict[str, str]:
        return {name: getattr(self, name) for name in FACTOR_NAMES}

    @classmethod
    def from_dict(cls, d: dict) -> "StyleFactors":
        missing = [name for name in FACTOR_NAMES if name not in d]
        if missing:
            raise ValueError(f"factors missing fields: {missing}")
        return cls(**{name: d[name] for name in FACTOR_NAMES})

    def level(self, factor: str) -> str:
        return getattr(self, factor)


@dataclass(frozen=True)
class DatasetRecord:
    """One speech sample paired with a speaking-style caption."""

    id: str
    speech_ref: str
    caption: str
    speaker_id: str
    factors: StyleFactors | None = None
    source_id: str | None = None

    def __post_init__(self):
        if not self.caption.strip():
            raise ValueError(f"record {self.id!r}: caption empty after trimming")

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "speech_ref": self.speech_ref,
            "caption": self.caption,
            "speaker_id": self.speaker_id,
        }
        if self.factors is not None:
            d["factors"] = self.factors.to_dict()
        if self.source_id is not None:
            d["source_id"] = self.source_id
        return d


@dataclass
class Manifest:
    """Ordered record collection with a split tag."""

    records: list[DatasetRecord] = field(default_factory=list)
    split_tag: str = "unsplit"
    path: Path | None = None  # where the manifest was loaded from, for speech_ref resolution

    def __post_init__(self):
        if self.split_tag not in SPLIT_TAGS:
            raise ValueError(f"split_tag must be one of {SPLIT_TAGS}")
        seen: set[str] = set()
        for rec in self.records:
            if rec.id in seen:
                raise DuplicateIdError(f"duplicate record id {rec.id!r}")
            seen.add(rec.id)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def speakers(self) -> set[str]:
        return {rec.speaker_id for rec in self.records}

    def resolve_speech_ref(self, record: DatasetRecord) -> Path:
        """Resolve a record's speech_ref; relative refs are anchored at the manifest's directory."""
        ref = Path(record.speech_ref)
        if ref.is_absolute() or self.path is None:
            return ref
        return self.path.parent / ref


_REQUIRED_FIELDS = ("id", "speech_ref", "caption", "speaker_id")


def _record_from_dict(d: dict, line: int) -> DatasetRecord:
    missing = [name for name in _REQUIRED_FIELDS if name not in d]
    if missing:
        raise ManifestError(f"missing required field(s) {missing}", line=line)
    factors = None
    if d.get("factors") is not None:
        try:
            factors = StyleFactors.from_dict(d["factors"])
        except ValueError as exc:
            raise ManifestError(str(exc), line=line) from exc
    try:
        return DatasetRecord(
            id=str(d["id"]),
            speech_ref=str(d["speech_ref"]),
            caption=str(d["caption"]),
            speaker_id=str(d["speaker_id"]),
            factors=factors,
            source_id=str(d["source_id"]) if d.get("source_id") is not None else None,
        )
    except ValueError as exc:
        raise ManifestError(str(exc), line=line) from exc


def load_manifest(path: str | Path, split_tag: str = "unsplit") -> Manifest:
    """Load a JSONL manifest. Raises ManifestError with the offending line number."""
    path = Path(path)
    records: list[DatasetRecord] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                payload = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"invalid JSON: {exc.msg}", line=lineno) from exc
            if not isinstance(payload, dict):
                raise ManifestError("manifest line is not a JSON object", line=lineno)
            rec = _record_from_dict(payload, lineno)
            if rec.id in seen:
                raise DuplicateIdError(f"duplicate record id {rec.id!r}", line=lineno)
            seen.add(rec.id)
            records.append(rec)
    manifest = Manifest(records=records, split_tag=split_tag)
    manifest.path = path
    return manifest


def save_manifest(manifest: Manifest, path: str | Path) -> Path:
    """Write a manifest as JSONL with a normalized field order."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        for rec in manifest.records:
            f.write(json.dumps(rec.to_dict(), ensure_ascii=False) + "\n")
    manifest.path = path
    return path


def manifest_from_records(records: Iterable[DatasetRecord], split_tag: str = "unsplit") -> Manifest:
    return Manifest(records=list(records), split_tag=split_tag)
