"""Word, position and speaker embedding tables."""
from typing import Sequence

import numpy as np

from ..autodiff.init import glorot_uniform
from ..autodiff.params import ParamStore
from ..autodiff.tensor import Tensor, embedding_lookup


class EmbeddingTables:
    """Three learned tables sharing width ``d``; a token embeds as their sum."""

    def __init__(self, store: ParamStore, prefix: str, vocab_size: int, max_len: int,
                 num_speakers: int, d: int, rng: np.random.Generator) -> None:
        self.prefix = prefix
        self.max_len = max_len
        self.word = store.add(f"{prefix}.word", glorot_uniform(vocab_size, d, rng).data)
        self.position = store.add(f"{prefix}.position", glorot_uniform(max_len, d, rng).data)
        self.speaker = store.add(f"{prefix}.speaker", glorot_uniform(num_speakers, d, rng).data)

    def embed(self, token_ids: Sequence[int], positions: Sequence[int],
              speakers: Sequence[int]) -> Tensor:
        """E(x) = WE(x) + POE(x) + PAE(x) for every token.

        Raises:
            ValueError: If a position reaches ``max_len``
        """
        if positions and max(positions) >= self.max_len:
            raise ValueError(f"position {max(positions)} exceeds max_len {self.max_len}")
        return (embedding_lookup(self.word, token_ids)
                + embedding_lookup(self.position, positions)
                + embedding_lookup(self.speaker, speakers))
