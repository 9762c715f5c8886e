"""Single-archive checkpoints: config, vocabulary, parameters, digests."""

from __future__ import annotations

from pathlib import Path

import torch

FORMAT_VERSION = 1


def save_checkpoint(
    path: str | Path,
    model_kind: str,
    model_state: dict,
    run_config: dict,
    vocab_tokens: list[str],
    train_state: dict,
    frozen_digests: dict[str, str],
    optimizer_state: dict | None = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(
        {
            "format_version": FORMAT_VERSION,
            "model_kind": model_kind,
            "model_state": model_state,
            "run_config": run_config,
            "vocab_tokens": vocab_tokens,
            "train_state": train_state,
            "frozen_digests": frozen_digests,
            "optimizer_state": optimizer_state,
        },
        path,
    )
    return path


def load_checkpoint(path: str | Path) -> dict:
    payload = torch.load(path, map_location="cpu", weights_only=False)
    version = payload.get("format_version")
    if version != FORMAT_VERSION:
        raise ValueError(f"unsupported checkpoint format version {version!r}")
    return payload
