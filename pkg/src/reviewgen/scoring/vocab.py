"""Token vocabulary with reserved UNK/PAD/SEP indices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

UNK_TOKEN = "<unk>"
PAD_TOKEN = "<pad>"
SEP_TOKEN = "<sep>"

UNK_INDEX = 0
PAD_INDEX = 1
SEP_INDEX = 2

_SPECIALS = (UNK_TOKEN, PAD_TOKEN, SEP_TOKEN)


@dataclass(frozen=True)
class Vocab:
    """Dense token -> index map; indices 0-2 are reserved specials."""

    index: dict[str, int]
    min_count: int = 1

    @classmethod
    def build(cls, sequences: Iterable[Sequence[str]], min_count: int = 1) -> "Vocab":
        """Build from token sequences, input-order independent.

        Tokens below ``min_count`` fall back to UNK at encode time.
        Surviving tokens are indexed in sorted order after the specials,
        so any permutation of the same multiset yields the same vocab.
        """
        counts: dict[str, int] = {}
        for seq in sequences:
            for token in seq:
                if token in _SPECIALS:
                    continue
                counts[token] = counts.get(token, 0) + 1
        index = {token: i for i, token in enumerate(_SPECIALS)}
        kept = sorted(t for t, c in counts.items() if c >= min_count)
        for offset, token in enumerate(kept):
            index[token] = len(_SPECIALS) + offset
        return cls(index=index, min_count=min_count)

    def __len__(self) -> int:
        return len(self.index)

    def encode(self, tokens: Sequence[str]) -> tuple[int, ...]:
        return tuple(self.index.get(t, UNK_INDEX) for t in tokens)

    def to_list(self) -> list[str]:
        """Tokens in index order (for serialization)."""
        ordered = sorted(self.index.items(), key=lambda kv: kv[1])
        return [token for token, _ in ordered]

    @classmethod
    def from_list(cls, tokens: list[str], min_count: int = 1) -> "Vocab":
        if tuple(tokens[:3]) != _SPECIALS:
            raise ValueError("vocab list must start with the reserved specials")
        return cls(index={t: i for i, t in enumerate(tokens)}, min_count=min_count)
