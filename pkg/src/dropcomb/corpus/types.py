"""Immutable conversation data types."""
from dataclasses import dataclass, replace
from typing import Optional, Tuple


@dataclass(frozen=True)
class Token:
    """One token; ``gold_label`` tags the pronoun dropped right before it."""

    surface: str
    vocab_id: int = 0
    gold_label: Optional[int] = None


@dataclass(frozen=True)
class Utterance:
    """A simple (post-split) utterance."""

    tokens: Tuple[Token, ...]
    speaker: int
    source_turn: int
    speaker_name: str = ''

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ValueError("Utterance needs at least one token")

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def surfaces(self) -> Tuple[str, ...]:
        return tuple(t.surface for t in self.tokens)

    @property
    def gold_labels(self) -> Tuple[Optional[int], ...]:
        return tuple(t.gold_label for t in self.tokens)

    def with_tokens(self, tokens: Tuple[Token, ...]) -> 'Utterance':
        return replace(self, tokens=tokens)


@dataclass(frozen=True)
class Snippet:
    """A window of consecutive utterances labeled jointly."""

    snippet_id: str
    utterances: Tuple[Utterance, ...]
    conversation_id: str = ''

    def __len__(self) -> int:
        return len(self.utterances)

    @property
    def lengths(self) -> Tuple[int, ...]:
        return tuple(len(u) for u in self.utterances)

    @property
    def token_count(self) -> int:
        return sum(self.lengths)

    @property
    def is_labeled(self) -> bool:
        return all(t.gold_label is not None for u in self.utterances for t in u.tokens)
