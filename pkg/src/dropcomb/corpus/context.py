"""Context windows around a pro-drop utterance."""
from dataclasses import dataclass
from typing import Tuple

from .types import Snippet, Utterance
from .vocab import SEP

PRECEDING = 5
FOLLOWING = 2


@dataclass(frozen=True)
class ContextWindow:
    """The flattened context of utterance ``target_index``.

    ``token_ids``, ``speakers`` and ``surfaces`` describe the context
    sequence with a delimiter between each pair of utterances; each
    delimiter takes the speaker of the utterance it precedes.
    """

    target_index: int
    context_indices: Tuple[int, ...]
    context_utterances: Tuple[Utterance, ...]
    sep_positions: Tuple[int, ...]
    token_ids: Tuple[int, ...]
    speakers: Tuple[int, ...]
    surfaces: Tuple[str, ...]

    def __len__(self) -> int:
        return len(self.token_ids)

    @property
    def is_empty(self) -> bool:
        return not self.context_indices


def context_indices(n: int, i: int, preceding: int = PRECEDING,
                    following: int = FOLLOWING) -> Tuple[int, ...]:
    """In-bounds members of {i-preceding, ..., i-1, i+1, ..., i+following}."""
    before = range(max(0, i - preceding), i)
    after = range(i + 1, min(n, i + following + 1))
    return tuple(before) + tuple(after)


def attach_context(snippet: Snippet, i: int, sep_id: int = 1,
                   preceding: int = PRECEDING, following: int = FOLLOWING) -> ContextWindow:
    """Collect the context of utterance ``i``; snippet edges truncate silently.

    Raises:
        IndexError: If ``i`` is not an utterance index of ``snippet``
    """
    if not 0 <= i < len(snippet):
        raise IndexError(f"utterance {i} out of range for snippet of {len(snippet)}")
    indices = context_indices(len(snippet), i, preceding, following)
    utterances = tuple(snippet.utterances[k] for k in indices)

    ids, speakers, surfaces, seps = [], [], [], []
    for position, utterance in enumerate(utterances):
        if position > 0:
            seps.append(len(ids))
            ids.append(sep_id)
            speakers.append(utterance.speaker)
            surfaces.append(SEP)
        ids.extend(t.vocab_id for t in utterance.tokens)
        speakers.extend([utterance.speaker] * len(utterance))
        surfaces.extend(utterance.surfaces)
    return ContextWindow(i, indices, utterances, tuple(seps), tuple(ids),
                         tuple(speakers), tuple(surfaces))
