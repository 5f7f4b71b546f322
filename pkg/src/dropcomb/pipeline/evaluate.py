"""Evaluation and prediction with a trained model."""
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from ..corpus.labels import LabelSet
from ..corpus.reader import serialize_corpus, write_corpus
from ..corpus.types import Snippet
from ..gcrf.inference import decode, dump_messages
from ..utils.logger import logger
from .bundle import DropCombModel
from .metrics import EvalReport, check_label_sets, evaluate_assignments


def evaluate(model: DropCombModel, snippets: Sequence[Snippet],
             labels: Optional[LabelSet] = None) -> EvalReport:
    """Decode ``snippets`` and score them against their gold labels.

    Args:
        model: Trained model
        snippets: Labeled snippets indexed with the model's vocabulary
        labels: Label set the corpus was read with, when it differs from the
            model's own

    Raises:
        LabelSetMismatchError: If ``labels`` differs from the model's labels
    """
    if labels is not None:
        check_label_sets(model.labels, labels)
    return evaluate_assignments(snippets, model.predict_all(list(snippets)), model.labels)


def predict_records(model: DropCombModel, snippets: Sequence[Snippet]) -> List[Dict]:
    """Conversation records with a ``predicted`` list next to every turn."""
    predictions = {sid: [list(row) for row in assignment.labels]
                   for sid, assignment in model.predict_all(list(snippets)).items()}
    return serialize_corpus(snippets, model.labels, predictions)


def write_predictions(model: DropCombModel, snippets: Sequence[Snippet], path: Path) -> Path:
    records = predict_records(model, snippets)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as handle:
        write_corpus(records, handle)
    logger.info(f"Wrote predictions for {len(records)} conversations to {path}")
    return path


def dump_snippet_messages(model: DropCombModel, snippets: Sequence[Snippet],
                          directory: Path) -> List[Path]:
    """Write chain messages and backpointers of every snippet as CSV.

    Token-level models have no chain messages; nothing is written for them.
    """
    if model.ablation.no_gcrf:
        logger.warning("Message dump requested for a model without the structured layer")
        return []
    written: List[Path] = []
    for snippet in snippets:
        graph = model.graph(snippet)
        emissions = model.emit(snippet)
        prefix = snippet.snippet_id.replace('#', '_')
        written.extend(dump_messages(graph, emissions, model.params, directory, prefix))
        logger.debug(f"{snippet.snippet_id}: score "
                     f"{decode(graph, emissions, model.params).score!r}")
    return written
