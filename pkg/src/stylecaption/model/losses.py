"""Teacher-forced caption cross entropy."""

from __future__ import annotations

import torch
import torch.nn.functional as F

from .decoder import TextDecoderBase


def caption_cross_entropy(
    prefix: torch.Tensor,
    targets: torch.Tensor,
    target_lens: torch.Tensor,
    decoder: TextDecoderBase,
    pad_id: int,
    eos_id: int,
) -> torch.Tensor:
    """Mean token-level cross entropy of ``targets`` under the decoder
    conditioned on ``prefix``.

    Token ``i`` is predicted from the prefix plus tokens ``< i``; the final
    prediction at each sample's last position targets EOS. Prefix positions
    and padding contribute no loss.
    """
    if prefix.dim() != 3:
        raise ValueError(f"expected (B, K, d_w) prefix, got shape {tuple(prefix.shape)}")
    if targets.dim() != 2 or targets.shape[0] != prefix.shape[0]:
        raise ValueError("targets must be (B, S) aligned with the prefix batch")
    if bool((target_lens < 1).any()):
        raise ValueError("empty target caption")
    if bool(targets.max() >= decoder.vocab_size) or bool(targets.min() < 0):
        raise ValueError(
            f"target token id out of vocabulary (vocab size {decoder.vocab_size})"
        )

    batch, k, _ = prefix.shape
    seq = targets.shape[1]
    token_embs = decoder.embed(targets)
    inputs = torch.cat([prefix, token_embs.to(prefix.dtype)], dim=1)

    positions = torch.arange(seq + k, device=targets.device)
    pad_mask = positions[None, :] < (k + target_lens)[:, None]

    logits = decoder(inputs, prefix_len=k, pad_mask=pad_mask)

    # Predictions start at the last prefix position; sample i yields
    # target_lens[i] + 1 predictions (its tokens, then EOS).
    shifted = torch.full((batch, seq + 1), pad_id, dtype=targets.dtype, device=targets.device)
    token_positions = torch.arange(seq, device=targets.device)
    in_range = token_positions[None, :] < target_lens[:, None]
    shifted[:, :seq] = torch.where(in_range, targets, torch.full_like(targets, pad_id))
    shifted[torch.arange(batch, device=targets.device), target_lens] = eos_id

    pred_logits = logits[:, k - 1 :, :]
    return F.cross_entropy(
        pred_logits.reshape(-1, decoder.vocab_size),
        shifted.reshape(-1),
        ignore_index=pad_id,
    )
