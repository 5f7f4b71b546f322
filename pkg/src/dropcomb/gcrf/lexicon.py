"""Overt-pronoun and interjection lexicons used by graph refinement."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, Tuple

from ..corpus.labels import LabelSet
from ..errors import CorpusError

DEFAULT_INTERJECTIONS = frozenset({'嗯', '哈哈'})


@dataclass(frozen=True)
class PronounLexicon:
    """Surface -> label index for overt pronouns."""

    entries: Dict[str, int] = field(default_factory=dict)

    def __contains__(self, surface: object) -> bool:
        return surface in self.entries

    def __getitem__(self, surface: str) -> int:
        return self.entries[surface]

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[str, str]], labels: LabelSet) -> 'PronounLexicon':
        entries = {}
        for surface, name in pairs:
            if name not in labels:
                raise CorpusError(f"pronoun lexicon maps '{surface}' to unknown label '{name}'")
            entries[surface] = labels.index(name)
        return cls(entries)


@dataclass(frozen=True)
class InterjectionLexicon:
    """Surfaces that open an utterance skipped on the spine."""

    surfaces: FrozenSet[str] = DEFAULT_INTERJECTIONS

    def __post_init__(self) -> None:
        if not self.surfaces:
            raise CorpusError("Interjection lexicon must not be empty")

    def __contains__(self, surface: object) -> bool:
        return surface in self.surfaces


def load_pronoun_lexicon(path: Path, labels: LabelSet) -> PronounLexicon:
    """Read ``surface<TAB>label`` lines; ``#`` lines are comments."""
    pairs = []
    with open(path, 'r', encoding='utf-8') as handle:
        for line_no, raw in enumerate(handle, start=1):
            line = raw.rstrip('\n')
            if not line.strip() or line.startswith('#'):
                continue
            parts = line.split('\t')
            if len(parts) != 2:
                raise CorpusError("pronoun lexicon lines are 'surface<TAB>label'", line_no)
            pairs.append((parts[0].strip(), parts[1].strip()))
    return PronounLexicon.from_pairs(pairs, labels)


def load_interjections(path: Path) -> InterjectionLexicon:
    """Read one interjection per line; ``#`` lines are comments."""
    with open(path, 'r', encoding='utf-8') as handle:
        surfaces = frozenset(
            line.strip() for line in handle if line.strip() and not line.startswith('#')
        )
    return InterjectionLexicon(surfaces)
