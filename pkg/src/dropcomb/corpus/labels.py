"""The tag inventory: pronoun types plus the reserved "None" label."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, Tuple

from ..errors import CorpusError

NONE_LABEL = 'None'


@dataclass(frozen=True)
class LabelSet:
    """Ordered, unique label names; index order is stable across save/load."""

    labels: Tuple[str, ...]
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.labels)) != len(self.labels):
            raise CorpusError("Label names must be unique")
        if self.labels.count(NONE_LABEL) != 1:
            raise CorpusError(f'Label set must contain "{NONE_LABEL}" exactly once')
        if len(self.labels) < 2:
            raise CorpusError("Label set needs at least one pronoun label besides None")
        object.__setattr__(self, '_index', {name: i for i, name in enumerate(self.labels)})

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def none_index(self) -> int:
        return self._index[NONE_LABEL]

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    def index(self, name: str) -> int:
        """Index of ``name``; raises KeyError for unknown labels."""
        return self._index[name]

    def name(self, index: int) -> str:
        return self.labels[index]

    def pronoun_indices(self) -> Tuple[int, ...]:
        return tuple(i for i in range(self.size) if i != self.none_index)

    @classmethod
    def from_names(cls, names: Iterable[str]) -> 'LabelSet':
        return cls(tuple(names))


def load_label_set(path: Path) -> LabelSet:
    """Read a label file: one label per line, ``#`` starts a comment line."""
    names = []
    with open(path, 'r', encoding='utf-8') as handle:
        for raw in handle:
            line = raw.strip()
            if not line or line.startswith('#'):
                continue
            names.append(line)
    return LabelSet.from_names(names)


def save_label_set(labels: LabelSet, path: Path) -> None:
    Path(path).write_text('\n'.join(labels.labels) + '\n', encoding='utf-8')
