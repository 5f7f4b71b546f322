"""CSV exports: transition matrices and interaction-attention weights."""
import csv
from pathlib import Path
from typing import List, Tuple

import numpy as np

from ..corpus.types import Snippet
from ..gcrf.inference import A1_NAME, A2_NAME
from ..utils.logger import logger
from .bundle import DropCombModel

MATRICES = {'A1': A1_NAME, 'A2': A2_NAME}


def export_transitions(model: DropCombModel, path: Path, matrix: str = 'A2',
                       include_none: bool = False) -> Path:
    """Write a k x k transition matrix with label-name headers.

    Values are printed with ``repr`` so re-reading reproduces them exactly.

    Raises:
        ValueError: If ``matrix`` is neither A1 nor A2
    """
    if matrix not in MATRICES:
        raise ValueError(f"Unknown transition matrix: {matrix} (expected A1 or A2)")
    labels = model.labels
    keep = [i for i in range(labels.size) if include_none or i != labels.none_index]
    values = model.store[MATRICES[matrix]].data[np.ix_(keep, keep)]
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.writer(handle)
        writer.writerow(['from/to'] + [labels.name(i) for i in keep])
        for i, row in zip(keep, values):
            writer.writerow([labels.name(i)] + [repr(float(v)) for v in row])
    logger.info(f"Wrote {matrix} ({len(keep)}x{len(keep)}) to {path}")
    return path


def read_transitions(path: Path) -> Tuple[List[str], np.ndarray]:
    """Label names and values of an ``export_transitions`` file."""
    with open(path, 'r', newline='', encoding='utf-8') as handle:
        rows = list(csv.reader(handle))
    names = rows[0][1:]
    values = np.array([[float(v) for v in row[1:]] for row in rows[1:]], dtype=np.float64)
    return names, values


def export_attention(model: DropCombModel, snippet: Snippet, i: int,
                     directory: Path) -> List[Path]:
    """Write ``layer{l}_head{h}.csv`` for utterance ``i`` of ``snippet``.

    Rows are target tokens and columns context tokens (delimiters included);
    every row sums to one. Nothing is written when the utterance has no
    context.

    Raises:
        IndexError: If ``i`` is not an utterance index of ``snippet``
    """
    exported = model.emitter.export_attention(snippet, i)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    for layer, heads in enumerate(exported.layers):
        for head, weights in enumerate(heads):
            path = directory / f"layer{layer}_head{head}.csv"
            with open(path, 'w', newline='', encoding='utf-8') as handle:
                writer = csv.writer(handle)
                writer.writerow(['target'] + list(exported.context_surfaces))
                for surface, row in zip(exported.target_surfaces, weights):
                    writer.writerow([surface] + [repr(float(w)) for w in row])
            written.append(path)
    return written
