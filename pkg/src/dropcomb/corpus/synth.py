"""Synthetic two-speaker dialogues with controlled pronoun transitions.

Every conversation opens with an overt 我 or 你. Each later utterance follows
one dialogue transition relative to the last pronoun-bearing utterance:

* expansion: same speaker continues, the same pronoun is dropped;
* reply: the other speaker answers, 我 and 你 swap;
* acknowledgment: the other speaker opens with an interjection, no pronoun
  is dropped and the pronoun state carries over.

Utterance-initial filler words are drawn independently of the label, so
initial dropped pronouns are only recoverable through cross-utterance
dependencies. An optional object-position drop (他 after 告诉) gives the
horizontal chains something to learn.
"""
from typing import Dict, List, Sequence

import numpy as np

from ..errors import ConfigError

PATTERNS = ('reply', 'expansion', 'acknowledgment', 'mixed')
MIXED_WEIGHTS = {'reply': 0.35, 'expansion': 0.45, 'acknowledgment': 0.2}

FILLERS = ('去', '吃饭', '明天', '看', '电影', '知道', '那个', '很', '忙', '喜欢',
           '学校', '工作', '回家', '今天', '可以', '觉得', '不错', '还', '没', '买')
INTERJECTIONS = ('嗯', '哈哈')
SWAP = {'我': '你', '你': '我'}
OBJECT_VERB = '告诉'
OBJECT_PRONOUN = '他'
NONE = 'None'


def _filler_tokens(rng: np.random.Generator, low: int = 2, high: int = 4) -> List[str]:
    count = int(rng.integers(low, high + 1))
    return [FILLERS[int(i)] for i in rng.integers(0, len(FILLERS), size=count)]


def _content_turn(speaker: str, pronoun: str, rng: np.random.Generator,
                  object_rate: float) -> Dict:
    tokens = _filler_tokens(rng)
    labels = [NONE] * len(tokens)
    labels[0] = pronoun
    if rng.random() < object_rate:
        tokens += [OBJECT_VERB] + _filler_tokens(rng, 1, 2)
        labels += [NONE, OBJECT_PRONOUN] + [NONE] * (len(tokens) - len(labels) - 2)
    tokens.append('。')
    labels.append(NONE)
    return {'speaker': speaker, 'tokens': tokens, 'labels': labels}


def synthesize(pattern: str, n: int, rng: np.random.Generator, turns: int = 8,
               object_rate: float = 0.3) -> List[Dict]:
    """Generate ``n`` conversation records in the corpus JSONL schema.

    Args:
        pattern: One of reply, expansion, acknowledgment or mixed
        n: Number of conversations
        rng: Seeded generator
        turns: Turns per conversation
        object_rate: Probability that a content turn carries an object drop

    Raises:
        ConfigError: For an unknown pattern or non-positive sizes
    """
    if pattern not in PATTERNS:
        raise ConfigError(f"Unknown synthetic pattern '{pattern}' (choose from {PATTERNS})")
    if n < 1 or turns < 1:
        raise ConfigError("synthetic corpus needs n >= 1 and turns >= 1")

    kinds: Sequence[str] = tuple(MIXED_WEIGHTS)
    weights = np.array([MIXED_WEIGHTS[k] for k in kinds])
    records = []
    for index in range(n):
        speaker = 'A'
        pronoun = '我' if rng.random() < 0.5 else '你'
        opening = [pronoun] + _filler_tokens(rng) + ['。']
        conversation = [{'speaker': speaker, 'tokens': opening,
                         'labels': [NONE] * len(opening)}]
        for _ in range(turns - 1):
            kind = pattern
            if pattern == 'mixed':
                kind = kinds[int(rng.choice(len(kinds), p=weights))]
            other = 'B' if speaker == 'A' else 'A'
            if kind == 'acknowledgment':
                word = INTERJECTIONS[int(rng.integers(0, len(INTERJECTIONS)))]
                tokens = [word, '好', '。']
                conversation.append({'speaker': other, 'tokens': tokens,
                                     'labels': [NONE] * len(tokens)})
                continue
            if kind == 'reply':
                speaker, pronoun = other, SWAP[pronoun]
            conversation.append(_content_turn(speaker, pronoun, rng, object_rate))
        records.append({'id': f"synth-{pattern}-{index}", 'turns': conversation})
    return records
