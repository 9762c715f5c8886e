"""Training loops and the frozen-backbone contract.

Only four parameter groups of the captioner ever receive gradient updates:
the mapping network, its prefix constants, the aggregation module (or the
fixed-vector projection), and the layer weights. The decoder backbone stays
frozen; SHA-256 digests of its parameters are recorded so bit-identity can
be checked across any number of steps.
"""

from __future__ import annotations

import hashlib
import math
import random
from dataclasses import asdict, dataclass, field

import torch
import torch.nn as nn

from ..errors import TrainingDivergedError
from .baseline import Seq2SeqBaseline
from .data import ManifestBatches
from .decoder import TextDecoderBase, TinyTransformerDecoder
from .losses import caption_cross_entropy
from .network import StyleCaptioner


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    batch_size: int = 16
    lr: float = 1e-4
    grad_clip: float = 1.0
    seed: int = 0


@dataclass
class TrainState:
    epoch: int = 0
    step: int = 0
    loss_history: list[dict] = field(default_factory=list)
    frozen_digests: dict[str, str] = field(default_factory=dict)
    rng_seed: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrainState":
        return cls(**d)


def parameter_digest(module: nn.Module) -> str:
    """SHA-256 over the module's parameters in sorted state-dict order."""
    digest = hashlib.sha256()
    state = module.state_dict()
    for name in sorted(state):
        tensor = state[name].detach().cpu().contiguous()
        digest.update(name.encode())
        digest.update(str(tensor.dtype).encode())
        digest.update(str(tuple(tensor.shape)).encode())
        digest.update(tensor.numpy().tobytes())
    return digest.hexdigest()


def frozen_parameter_digests(model: nn.Module) -> dict[str, str]:
    """Digests of the frozen backbone groups (the decoder; feature
    extraction happens outside the model, so nothing else qualifies)."""
    if isinstance(model, StyleCaptioner):
        return {"decoder_backbone": parameter_digest(model.decoder)}
    return {}


def trainable_parameter_groups(model: nn.Module) -> dict[str, list[tuple[str, nn.Parameter]]]:
    """Named parameter groups that receive gradient updates.

    Captioner: exactly {mapper, prefix_constants, aggregator | fixed_projection,
    layer_weights (stack inputs only)}. Baseline: every parameter.
    """
    if isinstance(model, StyleCaptioner):
        groups: dict[str, list[tuple[str, nn.Parameter]]] = {
            "mapper": [
                (f"mapper.{n}", p)
                for n, p in model.mapper.named_parameters()
                if n != "constants"
            ],
            "prefix_constants": [("mapper.constants", model.mapper.constants)],
        }
        encoder_name = "fixed_projection" if model.input_kind == "fixed" else "aggregator"
        groups[encoder_name] = [
            (f"encoder.{n}", p) for n, p in model.encoder.named_parameters()
        ]
        if model.layer_weights is not None:
            groups["layer_weights"] = [
                (f"layer_weights.{n}", p) for n, p in model.layer_weights.named_parameters()
            ]
        return groups
    if isinstance(model, Seq2SeqBaseline):
        return {"baseline": list(model.named_parameters())}
    return {"model": list(model.named_parameters())}


def _all_trainable(groups: dict[str, list[tuple[str, nn.Parameter]]]) -> list[nn.Parameter]:
    return [p for params in groups.values() for _, p in params]


def _check_finite(loss: torch.Tensor, epoch: int, step: int) -> float:
    value = float(loss.detach())
    if not math.isfinite(value):
        raise TrainingDivergedError(
            f"non-finite loss {value} at epoch {epoch}, step {step}; "
            "reduce the learning rate or inspect the input features"
        )
    return value


@torch.no_grad()
def _mean_loss(model, batches: list) -> float:
    was_training = model.training
    model.eval()
    try:
        total, count = 0.0, 0
        for batch in batches:
            loss = _batch_loss(model, batch)
            total += float(loss) * batch.size
            count += batch.size
    finally:
        if was_training:
            model.train()
    return total / max(count, 1)


def _batch_loss(model, batch) -> torch.Tensor:
    return model.loss(batch.features, batch.lengths, batch.targets, batch.target_lens)


def train_model(
    model: StyleCaptioner | Seq2SeqBaseline,
    train_data: ManifestBatches,
    dev_data: ManifestBatches | None,
    cfg: TrainConfig,
    state: TrainState | None = None,
    optimizer_state: dict | None = None,
) -> tuple[TrainState, dict]:
    """Run ``cfg.epochs`` epochs; returns the updated state and optimizer state.

    Deterministic given ``cfg.seed``. For the captioner the decoder must
    already be frozen; its parameters are digest-checked before and after.
    """
    if isinstance(model, StyleCaptioner) and not model.decoder.frozen:
        raise ValueError(
            "captioner training requires a frozen decoder backbone; call decoder.freeze() "
            "(pretrain the built-in decoder first)"
        )

    torch.manual_seed(cfg.seed)
    groups = trainable_parameter_groups(model)
    params = _all_trainable(groups)
    optimizer = torch.optim.Adam(params, lr=cfg.lr)
    if optimizer_state is not None:
        optimizer.load_state_dict(optimizer_state)

    state = state or TrainState(rng_seed=cfg.seed)
    digests_before = frozen_parameter_digests(model)
    if not state.frozen_digests:
        state.frozen_digests = dict(digests_before)
    elif state.frozen_digests != digests_before:
        raise ValueError("frozen parameter digests changed since the recorded train state")

    for _ in range(cfg.epochs):
        epoch = state.epoch + 1
        rng = random.Random(cfg.seed * 100003 + epoch)
        model.train()
        running, seen = 0.0, 0
        for batch in train_data.batches(rng):
            optimizer.zero_grad()
            loss = _batch_loss(model, batch)
            value = _check_finite(loss, epoch, state.step)
            loss.backward()
            if cfg.grad_clip > 0:
                torch.nn.utils.clip_grad_norm_(params, cfg.grad_clip)
            optimizer.step()
            state.step += 1
            running += value * batch.size
            seen += batch.size
        entry = {"epoch": epoch, "train_loss": running / max(seen, 1)}
        if dev_data is not None:
            entry["dev_loss"] = _mean_loss(model, dev_data.batches())
        state.loss_history.append(entry)
        state.epoch = epoch

    digests_after = frozen_parameter_digests(model)
    if digests_after != digests_before:
        raise RuntimeError("frozen backbone parameters changed during training")
    return state, optimizer.state_dict()


def pretrain_tiny_decoder(
    decoder: TinyTransformerDecoder,
    captions_tokens: list[list[int]],
    pad_id: int,
    eos_id: int,
    epochs: int = 5,
    batch_size: int = 16,
    lr: float = 1e-3,
    seed: int = 0,
) -> list[float]:
    """Language-model pretraining of the built-in decoder on caption tokens.

    Runs before captioner training: the pretrained backbone is then frozen,
    mirroring the use of an externally pretrained LM. Returns per-epoch
    mean losses.
    """
    if not captions_tokens or any(len(t) == 0 for t in captions_tokens):
        raise ValueError("captions for pretraining must be non-empty")
    torch.manual_seed(seed)
    decoder.unfreeze()
    decoder.train()
    optimizer = torch.optim.Adam(decoder.parameters(), lr=lr)
    losses: list[float] = []
    for epoch in range(epochs):
        rng = random.Random(seed * 7919 + epoch)
        order = list(range(len(captions_tokens)))
        rng.shuffle(order)
        running, seen = 0.0, 0
        for start in range(0, len(order), batch_size):
            chunk = [captions_tokens[i] for i in order[start : start + batch_size]]
            max_s = max(len(t) for t in chunk)
            targets = torch.full((len(chunk), max_s), pad_id, dtype=torch.long)
            lens = torch.zeros(len(chunk), dtype=torch.long)
            for row, toks in enumerate(chunk):
                targets[row, : len(toks)] = torch.tensor(toks, dtype=torch.long)
                lens[row] = len(toks)
            prefix = decoder.start_prefix(len(chunk))
            optimizer.zero_grad()
            loss = caption_cross_entropy(prefix, targets, lens, decoder, pad_id, eos_id)
            value = _check_finite(loss, epoch, start)
            loss.backward()
            optimizer.step()
            running += value * len(chunk)
            seen += len(chunk)
        losses.append(running / max(seen, 1))
    decoder.eval()
    return losses
