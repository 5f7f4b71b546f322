"""Word vocabulary with reserved UNK and SEP entries."""
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Dict, List, Sequence, Tuple

from ..errors import CorpusError
from .types import Snippet

UNK = '[UNK]'
SEP = '[SEP]'


@dataclass(frozen=True)
class Vocab:
    """Dense surface-to-id map. ``[UNK]`` is id 0 and ``[SEP]`` id 1."""

    surfaces: Tuple[str, ...]
    min_frequency: int = 1
    _ids: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, '_ids', {s: i for i, s in enumerate(self.surfaces)})

    @property
    def unk_id(self) -> int:
        return 0

    @property
    def sep_id(self) -> int:
        return 1

    def __len__(self) -> int:
        return len(self.surfaces)

    def __contains__(self, surface: object) -> bool:
        return surface in self._ids

    def id_of(self, surface: str) -> int:
        return self._ids.get(surface, self.unk_id)

    def index_snippets(self, snippets: Sequence[Snippet]) -> List[Snippet]:
        """Return copies of ``snippets`` whose tokens carry this vocab's ids."""
        indexed = []
        for snippet in snippets:
            utterances = tuple(
                u.with_tokens(tuple(replace(t, vocab_id=self.id_of(t.surface))
                                    for t in u.tokens))
                for u in snippet.utterances
            )
            indexed.append(replace(snippet, utterances=utterances))
        return indexed

    def to_dict(self) -> Dict:
        return {'surfaces': list(self.surfaces), 'min_frequency': self.min_frequency}

    @classmethod
    def from_dict(cls, data: Dict) -> 'Vocab':
        return cls(tuple(data['surfaces']), int(data.get('min_frequency', 1)))


def build_vocab(snippets: Sequence[Snippet], min_freq: int = 1) -> Vocab:
    """Collect surfaces seen at least ``min_freq`` times.

    Ids follow descending frequency, ties broken lexicographically, after
    the two reserved entries.

    Raises:
        CorpusError: If the corpus has no tokens
        ValueError: If ``min_freq`` is below 1
    """
    if min_freq < 1:
        raise ValueError("min_freq must be at least 1")
    counts = Counter(t.surface for s in snippets for u in s.utterances for t in u.tokens)
    if not counts:
        raise CorpusError("Cannot build a vocabulary from an empty corpus")
    kept = sorted((s for s, c in counts.items() if c >= min_freq and s not in (UNK, SEP)),
                  key=lambda s: (-counts[s], s))
    return Vocab((UNK, SEP) + tuple(kept), min_freq)
