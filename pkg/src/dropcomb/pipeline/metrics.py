"""Micro precision, recall and F-score over dropped-pronoun slots."""
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Sequence, Union

import numpy as np

from ..corpus.labels import LabelSet
from ..corpus.types import Snippet
from ..errors import CorpusError, LabelSetMismatchError
from ..gcrf.inference import LabelAssignment


def _ratio(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 0.0


@dataclass
class EvalReport:
    """Slot counts and the scores derived from them.

    A slot is predicted when its predicted label is not None, and correct when
    it equals a non-None gold label at the same position.
    """

    labels: LabelSet
    correct: int = 0
    predicted: int = 0
    gold: int = 0
    per_label: Dict[str, Dict[str, int]] = field(default_factory=dict)
    confusion: np.ndarray = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.confusion is None:
            self.confusion = np.zeros((self.labels.size, self.labels.size), dtype=np.int64)
        if not self.per_label:
            self.per_label = {name: {'correct': 0, 'predicted': 0, 'gold': 0}
                              for name in self.labels.labels
                              if name != self.labels.name(self.labels.none_index)}

    @property
    def precision(self) -> float:
        return _ratio(self.correct, self.predicted)

    @property
    def recall(self) -> float:
        return _ratio(self.correct, self.gold)

    @property
    def f_score(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r > 0 else 0.0

    def add(self, gold_row: Sequence[int], predicted_row: Sequence[int]) -> None:
        """Count one utterance's gold and predicted labels."""
        if len(gold_row) != len(predicted_row):
            raise ValueError(f"gold has {len(gold_row)} labels, prediction {len(predicted_row)}")
        none = self.labels.none_index
        for y, y_hat in zip(gold_row, predicted_row):
            self.confusion[y, y_hat] += 1
            if y != none:
                self.gold += 1
                self.per_label[self.labels.name(y)]['gold'] += 1
            if y_hat != none:
                self.predicted += 1
                self.per_label[self.labels.name(y_hat)]['predicted'] += 1
                if y_hat == y:
                    self.correct += 1
                    self.per_label[self.labels.name(y)]['correct'] += 1

    def to_dict(self) -> Dict:
        return {
            'precision': self.precision,
            'recall': self.recall,
            'f_score': self.f_score,
            'correct': self.correct,
            'predicted': self.predicted,
            'gold': self.gold,
            'per_label': self.per_label,
            'labels': list(self.labels.labels),
            'confusion': self.confusion.tolist(),
        }

    def summary(self) -> str:
        return (f"P={self.precision:.4f} R={self.recall:.4f} F={self.f_score:.4f} "
                f"({self.correct} correct, {self.predicted} predicted, {self.gold} gold)")


def check_label_sets(expected: LabelSet, actual: LabelSet) -> None:
    """Raise LabelSetMismatchError unless both inventories are identical."""
    if expected.labels != actual.labels:
        missing = sorted(set(expected.labels) ^ set(actual.labels))
        detail = f"differing labels {missing}" if missing else "different label order"
        raise LabelSetMismatchError(f"Label sets do not match: {detail}")


def evaluate_assignments(snippets: Iterable[Snippet],
                         predictions: Mapping[str, LabelAssignment],
                         labels: LabelSet) -> EvalReport:
    """Score predictions against the gold labels of ``snippets``.

    Raises:
        ValueError: If a snippet is unlabeled or has no prediction
    """
    report = EvalReport(labels)
    for snippet in snippets:
        if not snippet.is_labeled:
            raise ValueError(f"snippet {snippet.snippet_id} carries no gold labels")
        if snippet.snippet_id not in predictions:
            raise ValueError(f"no prediction for snippet {snippet.snippet_id}")
        rows = predictions[snippet.snippet_id].labels
        for utterance, row in zip(snippet.utterances, rows):
            report.add(utterance.gold_labels, row)
    return report


def _resolve(names: Sequence[str], labels: LabelSet, line: int) -> List[int]:
    try:
        return [labels.index(name) for name in names]
    except KeyError as error:
        raise LabelSetMismatchError(f"label {error} is not in the label set", line) from error


def evaluate_prediction_file(source: Union[str, Path, Sequence[Dict]],
                             labels: LabelSet) -> EvalReport:
    """Score a ``predict`` output from its ``labels`` and ``predicted`` fields alone.

    Args:
        source: Path of a prediction JSONL file, or its parsed records
        labels: Label inventory used when predicting

    Returns:
        The same report ``evaluate`` computes in process

    Raises:
        CorpusError: If a turn lacks gold or predicted labels
        LabelSetMismatchError: If a label name is not in ``labels``
    """
    if isinstance(source, (str, Path)):
        with open(source, 'r', encoding='utf-8') as handle:
            records = [json.loads(line) for line in handle if line.strip()]
    else:
        records = list(source)
    report = EvalReport(labels)
    for line_no, record in enumerate(records, start=1):
        for turn in record.get('turns', []):
            if 'labels' not in turn or 'predicted' not in turn:
                raise CorpusError("turn needs both 'labels' and 'predicted'", line_no)
            report.add(_resolve(turn['labels'], labels, line_no),
                       _resolve(turn['predicted'], labels, line_no))
    return report
