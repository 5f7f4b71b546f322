"""Line-delimited JSON corpus reading and writing.

One conversation per line::

    {"id": "c1", "turns": [{"speaker": "A", "tokens": [...], "labels": [...]}]}

``labels`` holds one label name per token ("None" or a pronoun type) and may
be omitted for unlabeled input. Turns are optionally split into simple
utterances and then windowed into snippets.
"""
import json
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, TextIO, Union

from ..errors import CorpusError
from .labels import LabelSet
from .types import Snippet, Token, Utterance
from .vocab import Vocab

Splitter = Callable[[Utterance], List[Utterance]]

DEFAULT_SNIPPET_LENGTH = 8
DEFAULT_NUM_SPEAKERS = 4


def _parse_turn(turn: Any, turn_index: int, speakers: Dict[str, int], labels: LabelSet,
                vocab: Optional[Vocab], num_speakers: int, line_no: int) -> Utterance:
    if not isinstance(turn, dict) or 'tokens' not in turn or 'speaker' not in turn:
        raise CorpusError(f"turn {turn_index} needs 'speaker' and 'tokens'", line_no)
    surfaces = turn['tokens']
    if not isinstance(surfaces, list) or not surfaces:
        raise CorpusError(f"turn {turn_index} is empty", line_no)
    names = turn.get('labels')
    if names is not None and len(names) != len(surfaces):
        raise CorpusError(
            f"turn {turn_index} has {len(surfaces)} tokens but {len(names)} labels", line_no
        )

    speaker_name = str(turn['speaker'])
    if speaker_name not in speakers:
        if len(speakers) >= num_speakers:
            raise CorpusError(
                f"more than {num_speakers} speakers (new speaker '{speaker_name}')", line_no
            )
        speakers[speaker_name] = len(speakers)

    tokens = []
    for position, surface in enumerate(surfaces):
        gold = None
        if names is not None:
            name = names[position]
            if name not in labels:
                raise CorpusError(f"unknown label '{name}'", line_no)
            gold = labels.index(name)
        vocab_id = vocab.id_of(str(surface)) if vocab is not None else 0
        tokens.append(Token(str(surface), vocab_id, gold))
    return Utterance(tuple(tokens), speakers[speaker_name], turn_index, speaker_name)


def _window(conversation_id: str, utterances: List[Utterance],
            snippet_length: int) -> List[Snippet]:
    return [
        Snippet(f"{conversation_id}#{start // snippet_length}",
                tuple(utterances[start:start + snippet_length]), conversation_id)
        for start in range(0, len(utterances), snippet_length)
    ]


def parse_corpus(stream: Iterable[str], labels: LabelSet, vocab: Optional[Vocab] = None,
                 splitter: Optional[Splitter] = None,
                 snippet_length: int = DEFAULT_SNIPPET_LENGTH,
                 num_speakers: int = DEFAULT_NUM_SPEAKERS) -> List[Snippet]:
    """Parse JSONL conversations into snippets, in document order.

    Args:
        stream: Lines of the corpus file
        labels: Inventory the label names are resolved against
        vocab: Vocabulary for token ids; without one every id is UNK (0)
        splitter: Compound-utterance splitter applied to each turn
        snippet_length: Maximum utterances per snippet
        num_speakers: Maximum distinct speakers per conversation

    Returns:
        Snippets of at most ``snippet_length`` utterances

    Raises:
        CorpusError: On malformed JSON, empty turns or unknown labels,
            naming the offending line
    """
    if snippet_length < 1:
        raise ValueError("snippet_length must be at least 1")
    snippets: List[Snippet] = []
    for line_no, raw in enumerate(stream, start=1):
        if not raw.strip():
            continue
        try:
            record = json.loads(raw)
        except json.JSONDecodeError as error:
            raise CorpusError(f"invalid JSON: {error.msg}", line_no) from error
        if not isinstance(record, dict) or not isinstance(record.get('turns'), list):
            raise CorpusError("record needs a 'turns' list", line_no)
        conversation_id = str(record.get('id', f"line{line_no}"))

        speakers: Dict[str, int] = {}
        utterances: List[Utterance] = []
        for turn_index, turn in enumerate(record['turns']):
            utterance = _parse_turn(turn, turn_index, speakers, labels, vocab,
                                    num_speakers, line_no)
            utterances.extend(splitter(utterance) if splitter else [utterance])
        snippets.extend(_window(conversation_id, utterances, snippet_length))
    return snippets


def read_corpus(path: Union[str, Path], labels: LabelSet, **kwargs: Any) -> List[Snippet]:
    """Parse the corpus file at ``path``; keyword arguments as ``parse_corpus``."""
    with open(path, 'r', encoding='utf-8') as handle:
        return parse_corpus(handle, labels, **kwargs)


def _speaker_names(snippets: Sequence[Snippet]) -> List[str]:
    count = 1 + max((u.speaker for s in snippets for u in s.utterances), default=0)
    return [chr(ord('A') + i) if i < 26 else f"S{i}" for i in range(count)]


def serialize_corpus(snippets: Sequence[Snippet], labels: LabelSet,
                     predictions: Optional[Dict[str, List[List[int]]]] = None) -> List[Dict]:
    """Regroup snippets into conversation records.

    Simple utterances sharing a ``source_turn`` are merged back into one
    turn. Speakers keep their parsed names; nameless ones become A, B, ...
    by id, which parsing maps back to the same ids.

    Args:
        snippets: Snippets in document order
        labels: Label inventory for gold and predicted names
        predictions: Optional snippet id -> per-utterance label indices;
            adds a ``predicted`` list to every turn

    Returns:
        One JSON-ready record per conversation
    """
    names = _speaker_names(snippets)
    records: List[Dict] = []
    by_id: Dict[str, Dict] = {}
    for snippet in snippets:
        record = by_id.get(snippet.conversation_id)
        if record is None:
            record = {'id': snippet.conversation_id, 'turns': [], '_turns': {}}
            by_id[snippet.conversation_id] = record
            records.append(record)
        predicted = predictions.get(snippet.snippet_id) if predictions is not None else None
        for i, utterance in enumerate(snippet.utterances):
            turn = record['_turns'].get(utterance.source_turn)
            if turn is None:
                turn = {'speaker': utterance.speaker_name or names[utterance.speaker],
                        'tokens': []}
                if snippet.is_labeled:
                    turn['labels'] = []
                if predicted is not None:
                    turn['predicted'] = []
                record['_turns'][utterance.source_turn] = turn
                record['turns'].append(turn)
            turn['tokens'].extend(utterance.surfaces)
            if 'labels' in turn:
                turn['labels'].extend(labels.name(t.gold_label) for t in utterance.tokens
                                      if t.gold_label is not None)
            if predicted is not None:
                turn['predicted'].extend(labels.name(y) for y in predicted[i])
    for record in records:
        del record['_turns']
    return records


def write_corpus(records: Sequence[Dict], stream: TextIO) -> None:
    """Write ``records`` as JSONL, one conversation per line, keeping CJK text unescaped."""
    for record in records:
        stream.write(json.dumps(record, ensure_ascii=False) + '\n')
