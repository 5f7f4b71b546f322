"""Conversation corpus: labels, vocabulary, parsing, context and statistics."""
from .context import ContextWindow, attach_context, context_indices
from .labels import NONE_LABEL, LabelSet, load_label_set, save_label_set
from .reader import parse_corpus, read_corpus, serialize_corpus, write_corpus
from .stats import StatsReport, corpus_stats
from .synth import PATTERNS, synthesize
from .types import Snippet, Token, Utterance
from .vocab import SEP, UNK, Vocab, build_vocab

__all__ = [
    'ContextWindow', 'LabelSet', 'NONE_LABEL', 'PATTERNS', 'SEP', 'Snippet', 'StatsReport',
    'Token', 'UNK', 'Utterance', 'Vocab', 'attach_context', 'build_vocab', 'context_indices',
    'corpus_stats', 'load_label_set', 'parse_corpus', 'read_corpus', 'save_label_set',
    'serialize_corpus', 'synthesize', 'write_corpus',
]
