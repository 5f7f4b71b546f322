"""Label set, lexicons and splitter shared by every command."""
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

from ..config import RunConfig
from ..corpus.labels import LabelSet, load_label_set
from ..corpus.reader import Splitter, read_corpus
from ..corpus.types import Snippet
from ..corpus.vocab import Vocab
from ..gcrf.graph import make_splitter
from ..gcrf.lexicon import (
    InterjectionLexicon,
    PronounLexicon,
    load_interjections,
    load_pronoun_lexicon,
)


@dataclass
class Resources:
    """Everything needed to turn corpus files into snippets and graphs."""

    labels: LabelSet
    pronouns: PronounLexicon
    interjections: InterjectionLexicon
    punctuation: List[str]
    snippet_length: int
    num_speakers: int

    @property
    def splitter(self) -> Splitter:
        return make_splitter(self.punctuation)

    @classmethod
    def from_config(cls, config: RunConfig) -> 'Resources':
        labels = load_label_set(config.labels_path)
        return cls(labels, load_pronoun_lexicon(config.pronouns_path, labels),
                   load_interjections(config.interjections_path), list(config.punctuation),
                   config.snippet_length, config.num_speakers)

    def read(self, path: Path, vocab: Optional[Vocab] = None) -> List[Snippet]:
        return read_corpus(path, self.labels, vocab=vocab, splitter=self.splitter,
                           snippet_length=self.snippet_length, num_speakers=self.num_speakers)

    def to_dict(self) -> Dict:
        return {
            'labels': list(self.labels.labels),
            'pronouns': {s: self.labels.name(y) for s, y in self.pronouns.entries.items()},
            'interjections': sorted(self.interjections.surfaces),
            'punctuation': list(self.punctuation),
            'snippet_length': self.snippet_length,
            'num_speakers': self.num_speakers,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'Resources':
        labels = LabelSet.from_names(data['labels'])
        pronouns = PronounLexicon.from_pairs(data['pronouns'].items(), labels)
        return cls(labels, pronouns, InterjectionLexicon(frozenset(data['interjections'])),
                   list(data['punctuation']), int(data['snippet_length']),
                   int(data['num_speakers']))


