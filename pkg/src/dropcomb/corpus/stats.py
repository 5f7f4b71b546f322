"""Corpus statistics over gold dropped-pronoun labels."""
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from .labels import LabelSet
from .types import Snippet


def get_empty_counts(labels: LabelSet) -> Dict[str, int]:
    """Return a per-pronoun-label dict of zero counts."""
    return {labels.name(i): 0 for i in labels.pronoun_indices()}


@dataclass
class StatsReport:
    """Counts of dropped pronouns (DPs) and utterance-initial DP pairs.

    ``pair_counts[a, b]`` counts consecutive utterances of a snippet whose
    first tokens carry DPs labeled ``a`` then ``b``.
    """

    labels: LabelSet
    conversations: int = 0
    snippets: int = 0
    utterances: int = 0
    tokens: int = 0
    dropped: int = 0
    initial_dropped: int = 0
    label_counts: Dict[str, int] = field(default_factory=dict)
    pair_counts: np.ndarray = field(default_factory=lambda: np.zeros((0, 0), dtype=np.int64))

    @property
    def initial_fraction(self) -> float:
        return self.initial_dropped / self.dropped if self.dropped else 0.0

    def to_dict(self) -> Dict:
        names = list(self.labels.labels)
        return {
            'conversations': self.conversations,
            'snippets': self.snippets,
            'utterances': self.utterances,
            'tokens': self.tokens,
            'dropped_pronouns': self.dropped,
            'utterance_initial': self.initial_dropped,
            'utterance_initial_fraction': self.initial_fraction,
            'label_counts': dict(self.label_counts),
            'pair_labels': names,
            'pair_counts': self.pair_counts.tolist(),
        }

    def pair_rows(self) -> List[List[str]]:
        """Pair matrix as CSV rows with a label-name header."""
        names = list(self.labels.labels)
        rows = [[''] + names]
        for a, name in enumerate(names):
            rows.append([name] + [str(int(c)) for c in self.pair_counts[a]])
        return rows


def corpus_stats(snippets: Sequence[Snippet], labels: LabelSet) -> StatsReport:
    """Summarize gold DPs; a corpus without DPs yields zero counts."""
    none = labels.none_index
    report = StatsReport(labels=labels, label_counts=get_empty_counts(labels),
                         pair_counts=np.zeros((labels.size, labels.size), dtype=np.int64))
    report.conversations = len({s.conversation_id for s in snippets})
    report.snippets = len(snippets)
    for snippet in snippets:
        report.utterances += len(snippet)
        report.tokens += snippet.token_count
        for utterance in snippet.utterances:
            for position, token in enumerate(utterance.tokens):
                if token.gold_label is None or token.gold_label == none:
                    continue
                report.dropped += 1
                report.label_counts[labels.name(token.gold_label)] += 1
                if position == 0:
                    report.initial_dropped += 1
        heads = [u.tokens[0].gold_label for u in snippet.utterances]
        for first, second in zip(heads, heads[1:]):
            if first not in (None, none) and second not in (None, none):
                report.pair_counts[first, second] += 1
    return report
