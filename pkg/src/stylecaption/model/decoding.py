"""Autoregressive caption decoding: greedy, beam search, seeded sampling."""

from __future__ import annotations

from dataclasses import dataclass

import torch
import torch.nn.functional as F

from .decoder import TextDecoderBase


@dataclass(frozen=True)
class Greedy:
    pass


@dataclass(frozen=True)
class Beam:
    width: int = 4

    def __post_init__(self):
        if self.width < 1:
            raise ValueError("beam width must be >= 1")


@dataclass(frozen=True)
class Sample:
    temperature: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.temperature <= 0:
            raise ValueError("temperature must be positive")


Strategy = Greedy | Beam | Sample


def _next_logits(decoder: TextDecoderBase, prefix: torch.Tensor, tokens: list[list[int]]) -> torch.Tensor:
    """Logits for the next token of every hypothesis (no cache; desk scale)."""
    batch = prefix.shape[0]
    steps = len(tokens[0])
    if steps:
        ids = torch.tensor(tokens, dtype=torch.long, device=prefix.device)
        inputs = torch.cat([prefix, decoder.embed(ids).to(prefix.dtype)], dim=1)
    else:
        inputs = prefix
    logits = decoder(inputs, prefix_len=prefix.shape[1])
    return logits[:, -1, :]


@torch.no_grad()
def decode(
    prefix: torch.Tensor,
    decoder: TextDecoderBase,
    strategy: Strategy,
    max_len: int,
    eos_id: int,
) -> list[list[int]]:
    """Decode one caption per prefix row; EOS is stripped from the outputs.

    ``prefix`` is (B, K, d_w) or (K, d_w). Greedy and beam are deterministic;
    sampling is deterministic given the strategy seed.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if prefix.dim() == 2:
        prefix = prefix.unsqueeze(0)
    if prefix.shape[-1] != decoder.d_w:
        raise ValueError(
            f"prefix width {prefix.shape[-1]} != decoder word-embedding dim {decoder.d_w}"
        )
    was_training = decoder.training
    decoder.eval()
    try:
        if isinstance(strategy, Beam):
            out = [
                _beam_one(prefix[i : i + 1], decoder, strategy.width, max_len, eos_id)
                for i in range(prefix.shape[0])
            ]
        else:
            out = _sequential(prefix, decoder, strategy, max_len, eos_id)
    finally:
        if was_training:
            decoder.train()
    return out


def _sequential(
    prefix: torch.Tensor,
    decoder: TextDecoderBase,
    strategy: Greedy | Sample,
    max_len: int,
    eos_id: int,
) -> list[list[int]]:
    batch = prefix.shape[0]
    generator = None
    if isinstance(strategy, Sample):
        generator = torch.Generator(device=prefix.device)
        generator.manual_seed(strategy.seed)
    tokens: list[list[int]] = [[] for _ in range(batch)]
    finished = [False] * batch
    current = [[] for _ in range(batch)]  # running ids incl. post-EOS padding
    for _ in range(max_len):
        logits = _next_logits(decoder, prefix, current)
        if isinstance(strategy, Sample):
            probs = F.softmax(logits / strategy.temperature, dim=-1)
            next_ids = torch.multinomial(probs, 1, generator=generator).squeeze(1)
        else:
            next_ids = logits.argmax(dim=-1)
        for i in range(batch):
            nid = int(next_ids[i])
            current[i].append(nid if not finished[i] else eos_id)
            if finished[i]:
                continue
            if nid == eos_id:
                finished[i] = True
            else:
                tokens[i].append(nid)
        if all(finished):
            break
    return tokens


def _beam_one(
    prefix: torch.Tensor,
    decoder: TextDecoderBase,
    width: int,
    max_len: int,
    eos_id: int,
) -> list[int]:
    # Hypotheses are (total logprob, ids); completed ones leave the beam.
    beams: list[tuple[float, list[int]]] = [(0.0, [])]
    completed: list[tuple[float, list[int]]] = []
    for _ in range(max_len):
        if not beams:
            break
        expanded = prefix.expand(len(beams), -1, -1)
        logits = _next_logits(decoder, expanded, [ids for _, ids in beams])
        logprobs = F.log_softmax(logits, dim=-1)
        candidates: list[tuple[float, list[int], int]] = []
        for b, (score, ids) in enumerate(beams):
            top = torch.topk(logprobs[b], min(width, logprobs.shape[-1]))
            for lp, tok in zip(top.values.tolist(), top.indices.tolist()):
                candidates.append((score + lp, ids, tok))
        candidates.sort(key=lambda c: c[0], reverse=True)
        beams = []
        for score, ids, tok in candidates:
            if tok == eos_id:
                completed.append((score, ids))
            else:
                beams.append((score, ids + [tok]))
            if len(beams) >= width:
                break
        if len(completed) >= width:
            break
    completed.extend(beams)  # length-capped hypotheses compete too
    best = max(completed, key=lambda c: c[0])
    return best[1]
