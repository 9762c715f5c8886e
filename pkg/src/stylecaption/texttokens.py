"""Deterministic text tokenization shared by the evaluation metrics and the
word-level decoder vocabulary.

Rules (versioned as ``TOKENIZER_ID``): the text is lowercased; maximal runs
of alphanumerics, optionally with a single internal apostrophe ("speaker's"),
form word tokens; every other non-space character becomes a one-character
token.
"""

from __future__ import annotations

import re

TOKENIZER_ID = "lower-punct-split-v1"

_TOKEN_RE = re.compile(r"[a-z0-9]+(?:'[a-z0-9]+)*|[^\sa-z0-9]")


def tokenize(text: str) -> list[str]:
    """Split ``text`` into lowercase word and punctuation tokens."""
    return _TOKEN_RE.findall(text.lower())
