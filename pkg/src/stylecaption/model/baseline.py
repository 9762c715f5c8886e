"""Plain Transformer encoder-decoder baseline with cross attention.

Unlike the captioner, nothing here is frozen: every parameter trains,
including the optional layer weights used when the input is a layered stack.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..frontend.layersum import LayerWeights, weighted_layer_sum
from .decoding import Beam, Greedy, Sample, Strategy
from .vocab import Vocabulary


@dataclass(frozen=True)
class BaselineConfig:
    input_dim: int
    vocab_size: int
    width: int = 256
    encoder_blocks: int = 12
    decoder_blocks: int = 6
    heads: int = 4
    ffn_mult: int = 4
    dropout: float = 0.1
    max_positions: int = 256
    n_layers: int = 1  # layered input stacks collapse through trainable weights

    def __post_init__(self):
        if self.width % self.heads != 0:
            raise ValueError(f"heads ({self.heads}) must divide width ({self.width})")


def _sinusoidal(max_len: int, dim: int) -> torch.Tensor:
    position = torch.arange(max_len).unsqueeze(1).float()
    div = torch.exp(torch.arange(0, dim, 2).float() * (-math.log(10000.0) / dim))
    table = torch.zeros(max_len, dim)
    table[:, 0::2] = torch.sin(position * div)
    table[:, 1::2] = torch.cos(position * div)
    return table


class Seq2SeqBaseline(nn.Module):
    def __init__(self, cfg: BaselineConfig, vocab: Vocabulary):
        super().__init__()
        self.cfg = cfg
        self.vocab = vocab
        self.layer_weights = LayerWeights(cfg.n_layers) if cfg.n_layers > 1 else None
        self.input_proj = nn.Linear(cfg.input_dim, cfg.width)
        self.register_buffer("frame_pos", _sinusoidal(4096, cfg.width), persistent=False)
        enc_layer = nn.TransformerEncoderLayer(
            cfg.width, cfg.heads, cfg.ffn_mult * cfg.width, cfg.dropout,
            activation="gelu", batch_first=True, norm_first=True,
        )
        self.encoder = nn.TransformerEncoder(enc_layer, cfg.encoder_blocks)
        self.token_embedding = nn.Embedding(cfg.vocab_size, cfg.width)
        self.token_pos = nn.Embedding(cfg.max_positions, cfg.width)
        self.start_embedding = nn.Parameter(torch.randn(cfg.width) * 0.02)
        dec_layer = nn.TransformerDecoderLayer(
            cfg.width, cfg.heads, cfg.ffn_mult * cfg.width, cfg.dropout,
            activation="gelu", batch_first=True, norm_first=True,
        )
        self.decoder = nn.TransformerDecoder(dec_layer, cfg.decoder_blocks)
        self.head = nn.Linear(cfg.width, cfg.vocab_size)

    def _encode(self, features: torch.Tensor, lengths: torch.Tensor) -> tuple[torch.Tensor, torch.Tensor]:
        if features.dim() == 4:
            if self.layer_weights is None:
                raise ValueError("layered input requires n_layers > 1 in the config")
            features = weighted_layer_sum(features, self.layer_weights)
        batch, max_t, _ = features.shape
        x = self.input_proj(features) + self.frame_pos[:max_t].to(features.dtype)
        valid = torch.arange(max_t, device=features.device)[None, :] < lengths[:, None]
        memory = self.encoder(x, src_key_padding_mask=~valid)
        return memory, valid

    def _decode_states(
        self,
        memory: torch.Tensor,
        memory_valid: torch.Tensor,
        targets: torch.Tensor,
        target_valid: torch.Tensor | None,
    ) -> torch.Tensor:
        batch, seq = targets.shape
        start = self.start_embedding.view(1, 1, -1).expand(batch, 1, -1)
        embs = torch.cat([start, self.token_embedding(targets)], dim=1)
        positions = torch.arange(seq + 1, device=targets.device)
        embs = embs + self.token_pos(positions)
        causal = torch.triu(torch.ones(seq + 1, seq + 1, dtype=torch.bool, device=targets.device), 1)
        tgt_key_padding = None
        if target_valid is not None:
            tgt_key_padding = ~torch.cat(
                [torch.ones(batch, 1, dtype=torch.bool, device=targets.device), target_valid], dim=1
            )
        states = self.decoder(
            embs,
            memory,
            tgt_mask=causal,
            tgt_key_padding_mask=tgt_key_padding,
            memory_key_padding_mask=~memory_valid,
        )
        return self.head(states)

    def forward(
        self,
        features: torch.Tensor,
        lengths: torch.Tensor,
        targets: torch.Tensor,
        target_lens: torch.Tensor,
    ) -> torch.Tensor:
        """Teacher-forced logits, shape (B, S + 1, V): positions predict
        [y_0, ..., y_{S-1}, EOS]."""
        memory, memory_valid = self._encode(features, lengths)
        seq = targets.shape[1]
        target_valid = torch.arange(seq, device=targets.device)[None, :] < target_lens[:, None]
        return self._decode_states(memory, memory_valid, targets, target_valid)

    def loss(
        self,
        features: torch.Tensor,
        lengths: torch.Tensor,
        targets: torch.Tensor,
        target_lens: torch.Tensor,
    ) -> torch.Tensor:
        if bool((target_lens < 1).any()):
            raise ValueError("empty target caption")
        logits = self.forward(features, lengths, targets, target_lens)
        batch, seq = targets.shape
        pad_id = self.vocab.pad_id
        shifted = torch.full((batch, seq + 1), pad_id, dtype=targets.dtype, device=targets.device)
        in_range = torch.arange(seq, device=targets.device)[None, :] < target_lens[:, None]
        shifted[:, :seq] = torch.where(in_range, targets, torch.full_like(targets, pad_id))
        shifted[torch.arange(batch, device=targets.device), target_lens] = self.vocab.eos_id
        return F.cross_entropy(
            logits.reshape(-1, self.cfg.vocab_size), shifted.reshape(-1), ignore_index=pad_id
        )

    @torch.no_grad()
    def generate(
        self,
        features: torch.Tensor,
        lengths: torch.Tensor,
        strategy: Strategy,
        max_len: int = 64,
    ) -> list[str]:
        was_training = self.training
        self.eval()
        try:
            memory, memory_valid = self._encode(features, lengths)
            if isinstance(strategy, Beam):
                ids = [
                    self._beam_one(memory[i : i + 1], memory_valid[i : i + 1], strategy.width, max_len)
                    for i in range(memory.shape[0])
                ]
            else:
                ids = self._sequential(memory, memory_valid, strategy, max_len)
        finally:
            if was_training:
                self.train()
        return [self.vocab.decode(seq) for seq in ids]

    def _step_logits(self, memory, memory_valid, rows: list[list[int]]) -> torch.Tensor:
        device = memory.device
        if rows[0]:
            targets = torch.tensor(rows, dtype=torch.long, device=device)
        else:
            targets = torch.zeros(len(rows), 0, dtype=torch.long, device=device)
        logits = self._decode_states(memory, memory_valid, targets, None)
        return logits[:, -1, :]

    def _sequential(self, memory, memory_valid, strategy: Greedy | Sample, max_len: int) -> list[list[int]]:
        batch = memory.shape[0]
        eos = self.vocab.eos_id
        generator = None
        if isinstance(strategy, Sample):
            generator = torch.Generator(device=memory.device)
            generator.manual_seed(strategy.seed)
        out: list[list[int]] = [[] for _ in range(batch)]
        rows: list[list[int]] = [[] for _ in range(batch)]
        finished = [False] * batch
        for _ in range(max_len):
            logits = self._step_logits(memory, memory_valid, rows)
            if isinstance(strategy, Sample):
                probs = F.softmax(logits / strategy.temperature, dim=-1)
                next_ids = torch.multinomial(probs, 1, generator=generator).squeeze(1)
            else:
                next_ids = logits.argmax(dim=-1)
            for i in range(batch):
                nid = int(next_ids[i])
                rows[i].append(nid if not finished[i] else eos)
                if finished[i]:
                    continue
                if nid == eos:
                    finished[i] = True
                else:
                    out[i].append(nid)
            if all(finished):
                break
        return out

    def _beam_one(self, memory, memory_valid, width: int, max_len: int) -> list[int]:
        eos = self.vocab.eos_id
        beams: list[tuple[float, list[int]]] = [(0.0, [])]
        completed: list[tuple[float, list[int]]] = []
        for _ in range(max_len):
            if not beams:
                break
            mem = memory.expand(len(beams), -1, -1)
            mem_valid = memory_valid.expand(len(beams), -1)
            logits = self._step_logits(mem, mem_valid, [ids for _, ids in beams])
            logprobs = F.log_softmax(logits, dim=-1)
            candidates: list[tuple[float, list[int], int]] = []
            for b, (score, ids) in enumerate(beams):
                top = torch.topk(logprobs[b], min(width, logprobs.shape[-1]))
                for lp, tok in zip(top.values.tolist(), top.indices.tolist()):
                    candidates.append((score + lp, ids, tok))
            candidates.sort(key=lambda c: c[0], reverse=True)
            beams = []
            for score, ids, tok in candidates:
                if tok == eos:
                    completed.append((score, ids))
                else:
                    beams.append((score, ids + [tok]))
                if len(beams) >= width:
                    break
            if len(completed) >= width:
                break
        completed.extend(beams)
        return max(completed, key=lambda c: c[0])[1]
