"""Word-level vocabulary with reserved pad/eos/unk tokens."""

from __future__ import annotations

from typing import Iterable

from ..texttokens import tokenize

PAD_TOKEN = "<pad>"
EOS_TOKEN = "<eos>"
UNK_TOKEN = "<unk>"
RESERVED = (PAD_TOKEN, EOS_TOKEN, UNK_TOKEN)


class Vocabulary:
    """Maps caption words to ids; unknown words fall back to ``<unk>``."""

    def __init__(self, tokens: list[str]):
        if list(tokens[: len(RESERVED)]) != list(RESERVED):
            raise ValueError(f"vocabulary must start with reserved tokens {RESERVED}")
        self.tokens = list(tokens)
        self._ids = {tok: i for i, tok in enumerate(self.tokens)}
        if len(self._ids) != len(self.tokens):
            raise ValueError("vocabulary contains duplicate tokens")

    @classmethod
    def build(cls, captions: Iterable[str], min_count: int = 1) -> "Vocabulary":
        counts: dict[str, int] = {}
        for caption in captions:
            for tok in tokenize(caption):
                counts[tok] = counts.get(tok, 0) + 1
        words = sorted(tok for tok, c in counts.items() if c >= min_count)
        return cls(list(RESERVED) + words)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def pad_id(self) -> int:
        return 0

    @property
    def eos_id(self) -> int:
        return 1

    @property
    def unk_id(self) -> int:
        return 2

    def encode(self, text: str) -> list[int]:
        unk = self.unk_id
        return [self._ids.get(tok, unk) for tok in tokenize(text)]

    def decode(self, ids: Iterable[int]) -> str:
        words = []
        for i in ids:
            if i == self.eos_id or i == self.pad_id:
                break
            words.append(self.tokens[i] if 0 <= i < len(self.tokens) else UNK_TOKEN)
        return " ".join(words)
