"""Transformer emission network: context encoder, utterance decoder, logits head."""
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..autodiff.init import glorot_uniform
from ..autodiff.params import ParamStore
from ..autodiff.tensor import Tensor, concat, stack
from ..config import ModelConfig
from ..corpus.context import ContextWindow, attach_context
from ..corpus.types import Snippet, Utterance
from ..errors import CorpusError
from ..utils.logger import logger
from .embeddings import EmbeddingTables
from .transformer import AttentionTrace, Decoder, Encoder


@dataclass
class EmissionTable:
    """Emission scores of shape n x m_max x k; ``mask`` marks real tokens."""

    scores: Tensor
    mask: np.ndarray

    @property
    def lengths(self) -> Tuple[int, ...]:
        """Real token count of each utterance."""
        return tuple(int(row.sum()) for row in self.mask)


class EmissionHead:
    """Two-layer map W1 tanh(W2 s + b2) + b1 applied to every token state."""

    def __init__(self, store: ParamStore, prefix: str, d: int, hidden: int, k: int,
                 rng: np.random.Generator) -> None:
        self.w2 = store.add(f"{prefix}.W2", glorot_uniform(hidden, d, rng).data)
        self.b2 = store.add(f"{prefix}.b2", np.zeros(hidden))
        self.w1 = store.add(f"{prefix}.W1", glorot_uniform(k, hidden, rng).data)
        self.b1 = store.add(f"{prefix}.b1", np.zeros(k))

    def __call__(self, states: Tensor) -> Tensor:
        return (states @ self.w2.T + self.b2).tanh() @ self.w1.T + self.b1


@dataclass
class AttentionExport:
    """Interaction-attention weights for one utterance.

    ``layers[l][h]`` is a (target tokens x context tokens) matrix.
    """

    target_surfaces: Tuple[str, ...]
    context_surfaces: Tuple[str, ...]
    layers: List[AttentionTrace]


class TransformerEmitter:
    """Scores every token of a snippet against every label.

    Each utterance is encoded with its own context window; the per-utterance
    logit matrices are padded and stacked into one EmissionTable.
    """

    def __init__(self, store: ParamStore, config: ModelConfig, vocab_size: int,
                 num_speakers: int, k: int, rng: np.random.Generator,
                 sep_id: int = 1) -> None:
        self.config = config
        self.k = k
        self.sep_id = sep_id
        d = config.d_model
        self.context_embeddings = EmbeddingTables(store, 'embed', vocab_size, config.max_len,
                                                  num_speakers, d, rng)
        self.utterance_embeddings = self.context_embeddings
        if not config.share_embeddings:
            self.utterance_embeddings = EmbeddingTables(store, 'embed_dec', vocab_size,
                                                        config.max_len, num_speakers, d, rng)
        self.encoder = Encoder(store, 'encoder', config, rng)
        self.decoder = Decoder(store, 'decoder', config, rng)
        self.head = EmissionHead(store, 'head', d, config.head_hidden, k, rng)

    def encode_context(self, window: ContextWindow,
                       rng: Optional[np.random.Generator] = None) -> Optional[Tensor]:
        """H(L) for the delimiter-joined context; None when the window is empty."""
        if window.is_empty:
            return None
        h = self.context_embeddings.embed(window.token_ids, range(len(window)), window.speakers)
        return self.encoder(h, rng)

    def decode_utterance(self, utterance: Utterance, context: Optional[Tensor],
                         rng: Optional[np.random.Generator] = None
                         ) -> Tuple[Tensor, List[AttentionTrace]]:
        """S(L) for the utterance tokens, attending to ``context`` when present."""
        ids = [t.vocab_id for t in utterance.tokens]
        s = self.utterance_embeddings.embed(ids, range(len(ids)), [utterance.speaker] * len(ids))
        return self.decoder(s, context, rng)

    def emission_logits(self, states: Tensor) -> Tensor:
        return self.head(states)

    def context_window(self, snippet: Snippet, i: int) -> ContextWindow:
        """Context of utterance ``i``, checked against the position table.

        Raises:
            CorpusError: If the context or the utterance is longer than ``max_len``
        """
        window = attach_context(snippet, i, self.sep_id)
        longest = max(len(window), len(snippet.utterances[i]))
        if longest > self.config.max_len:
            raise CorpusError(f"snippet {snippet.snippet_id} utterance {i}: {longest} positions "
                              f"exceed model.max_len {self.config.max_len}")
        return window

    def utterance_logits(self, snippet: Snippet, i: int,
                         rng: Optional[np.random.Generator] = None) -> Tensor:
        window = self.context_window(snippet, i)
        states, _ = self.decode_utterance(snippet.utterances[i],
                                          self.encode_context(window, rng), rng)
        return self.emission_logits(states)

    def emit(self, snippet: Snippet, rng: Optional[np.random.Generator] = None) -> EmissionTable:
        """Assemble the n x m_max x k emission table for ``snippet``."""
        lengths = snippet.lengths
        m_max = max(lengths)
        rows = []
        for i, m in enumerate(lengths):
            logits = self.utterance_logits(snippet, i, rng)
            if m < m_max:
                logits = concat([logits, Tensor(np.zeros((m_max - m, self.k)))], axis=0)
            rows.append(logits)
        mask = np.array([[j < m for j in range(m_max)] for m in lengths], dtype=bool)
        return EmissionTable(stack(rows), mask)

    def export_attention(self, snippet: Snippet, i: int) -> AttentionExport:
        """Interaction-attention weights of utterance ``i``, per layer and head.

        Raises:
            IndexError: If ``i`` is not an utterance index of ``snippet``
        """
        window = self.context_window(snippet, i)
        utterance = snippet.utterances[i]
        if window.is_empty:
            logger.warning(f"Utterance {i} of {snippet.snippet_id} has no context to attend to")
        _, traces = self.decode_utterance(utterance, self.encode_context(window))
        return AttentionExport(utterance.surfaces, window.surfaces, traces)
