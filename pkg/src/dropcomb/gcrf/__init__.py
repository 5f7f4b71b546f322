"""Comb-structured general CRF: graph construction and exact inference."""
from .brute_force import BruteForceResult, brute_force
from .decoder_factory import MODES, DecoderFactory, GcrfDecoder, TokenDecoder
from .graph import (
    DEFAULT_PUNCTUATION,
    CombGraph,
    SpineEntry,
    build_graph,
    build_initial_graph,
    drop_spine,
    make_splitter,
    refine_interjections,
    refine_ovp,
    split_compound,
    validate_graph,
)
from .inference import (
    ChainMessage,
    Decoded,
    GcrfParams,
    LabelAssignment,
    add_transition_params,
    decode,
    dump_messages,
    horizontal_message,
    joint_score,
    log_partition,
    nll,
    score_tensor,
    token_argmax,
    token_nll,
)
from .lexicon import (
    InterjectionLexicon,
    PronounLexicon,
    load_interjections,
    load_pronoun_lexicon,
)

__all__ = [
    'BruteForceResult', 'ChainMessage', 'CombGraph', 'DEFAULT_PUNCTUATION', 'Decoded',
    'DecoderFactory', 'GcrfDecoder', 'GcrfParams', 'InterjectionLexicon', 'LabelAssignment',
    'MODES', 'PronounLexicon', 'SpineEntry', 'TokenDecoder', 'add_transition_params',
    'brute_force', 'build_graph', 'build_initial_graph', 'decode', 'drop_spine',
    'dump_messages', 'horizontal_message', 'joint_score', 'load_interjections',
    'load_pronoun_lexicon', 'log_partition', 'make_splitter', 'nll', 'refine_interjections',
    'refine_ovp', 'score_tensor', 'split_compound', 'token_argmax', 'token_nll',
    'validate_graph',
]
