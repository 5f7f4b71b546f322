"""Shared fixtures and builders for the DropComb tests."""
import json
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pytest

from dropcomb.config import ModelConfig
from dropcomb.corpus.labels import LabelSet
from dropcomb.corpus.reader import write_corpus
from dropcomb.corpus.synth import synthesize
from dropcomb.corpus.types import Snippet, Token, Utterance
from dropcomb.gcrf.lexicon import InterjectionLexicon, PronounLexicon


def make_snippet(rows: Sequence[Sequence[str]],
                 labels: Optional[Sequence[Sequence[int]]] = None,
                 speakers: Optional[Sequence[int]] = None,
                 snippet_id: str = 's#0') -> Snippet:
    """Build a snippet straight from token surfaces (vocab id = position + 2)."""
    utterances = []
    for i, row in enumerate(rows):
        tokens = tuple(
            Token(surface, 2 + (i * 7 + j) % 11, None if labels is None else labels[i][j])
            for j, surface in enumerate(row)
        )
        speaker = speakers[i] if speakers is not None else i % 2
        utterances.append(Utterance(tokens, speaker, i))
    return Snippet(snippet_id, tuple(utterances), snippet_id.split('#')[0])


def corpus_lines(records: List[dict]) -> List[str]:
    return [json.dumps(r, ensure_ascii=False) + '\n' for r in records]


@pytest.fixture
def labels():
    """A four-label inventory: three pronouns plus None."""
    return LabelSet(('我', '你', '他', 'None'))


@pytest.fixture
def pronouns(labels):
    return PronounLexicon.from_pairs([('我', '我'), ('你', '你'), ('他', '他')], labels)


@pytest.fixture
def interjections():
    return InterjectionLexicon()


@pytest.fixture
def tiny_model_config():
    """Small emitter used wherever a full model is built."""
    return ModelConfig(d_model=8, heads=2, layers=1, ffn_dim=12, head_hidden=6, max_len=64)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def write_synth_corpus(path: Path, pattern: str = 'mixed', n: int = 4, seed: int = 5,
                       turns: int = 6, object_rate: float = 0.3) -> Path:
    """Write a synthetic corpus file and return its path."""
    records = synthesize(pattern, n, np.random.default_rng(seed), turns=turns,
                         object_rate=object_rate)
    with open(path, 'w', encoding='utf-8') as handle:
        write_corpus(records, handle)
    return path


def run_config_dict(output_dir: Path, train: Path, model: ModelConfig,
                    **training: Any) -> Dict[str, Any]:
    """A YAML-shaped run configuration for small training runs."""
    data = {'output_dir': str(output_dir),
            'data': {'train': str(train), 'snippet_length': 4, 'num_speakers': 2},
            'model': asdict(model),
            'training': {'epochs': 1, 'learning_rate': 0.01, 'seed': 3}}
    data['training'].update(training)
    return data
