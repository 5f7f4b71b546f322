"""Context encoder and utterance decoder stacks."""
from typing import List, Optional, Tuple

import numpy as np

from ..autodiff.init import glorot_uniform
from ..autodiff.params import ParamStore
from ..autodiff.tensor import Tensor, dropout, layer_norm
from ..config import ModelConfig
from .attention import MultiHeadAttention

# One list of per-head (queries x keys) matrices per attention call.
AttentionTrace = List[np.ndarray]


class FeedForward:
    """Position-wise relu(x W1 + b1) W2 + b2."""

    def __init__(self, store: ParamStore, prefix: str, d: int, inner: int,
                 rng: np.random.Generator) -> None:
        self.w1 = store.add(f"{prefix}.w1", glorot_uniform(d, inner, rng).data)
        self.b1 = store.add(f"{prefix}.b1", np.zeros(inner))
        self.w2 = store.add(f"{prefix}.w2", glorot_uniform(inner, d, rng).data)
        self.b2 = store.add(f"{prefix}.b2", np.zeros(d))

    def __call__(self, x: Tensor) -> Tensor:
        return (x @ self.w1 + self.b1).relu() @ self.w2 + self.b2


class Sublayer:
    """Residual connection and post-normalization around one sub-layer."""

    def __init__(self, store: ParamStore, prefix: str, config: ModelConfig) -> None:
        self.residual = config.residual
        self.rate = config.dropout
        self.gain = self.bias = None
        if config.layer_norm:
            self.gain = store.add(f"{prefix}.gain", np.ones(config.d_model))
            self.bias = store.add(f"{prefix}.bias", np.zeros(config.d_model))

    def __call__(self, x: Tensor, y: Tensor, rng: Optional[np.random.Generator]) -> Tensor:
        y = dropout(y, self.rate, rng)
        z = x + y if self.residual else y
        if self.gain is not None:
            z = layer_norm(z, self.gain, self.bias)
        return z


class EncoderBlock:
    """Self-attention then feed-forward."""

    def __init__(self, store: ParamStore, prefix: str, config: ModelConfig,
                 rng: np.random.Generator) -> None:
        d = config.d_model
        self.attention = MultiHeadAttention(store, f"{prefix}.self", d, config.heads, rng)
        self.attention_out = Sublayer(store, f"{prefix}.self_norm", config)
        self.ffn = FeedForward(store, f"{prefix}.ffn", d, config.ffn_dim, rng)
        self.ffn_out = Sublayer(store, f"{prefix}.ffn_norm", config)

    def __call__(self, x: Tensor,
                 rng: Optional[np.random.Generator] = None) -> Tuple[Tensor, AttentionTrace]:
        attended, weights = self.attention(x, x)
        x = self.attention_out(x, attended, rng)
        return self.ffn_out(x, self.ffn(x), rng), weights


class DecoderBlock:
    """Bidirectional self-attention, interaction attention over the encoded
    context, then feed-forward."""

    def __init__(self, store: ParamStore, prefix: str, config: ModelConfig,
                 rng: np.random.Generator) -> None:
        d = config.d_model
        self.attention = MultiHeadAttention(store, f"{prefix}.self", d, config.heads, rng)
        self.attention_out = Sublayer(store, f"{prefix}.self_norm", config)
        self.interaction = MultiHeadAttention(store, f"{prefix}.cross", d, config.heads, rng)
        self.interaction_out = Sublayer(store, f"{prefix}.cross_norm", config)
        self.ffn = FeedForward(store, f"{prefix}.ffn", d, config.ffn_dim, rng)
        self.ffn_out = Sublayer(store, f"{prefix}.ffn_norm", config)

    def __call__(self, s: Tensor, context: Optional[Tensor],
                 rng: Optional[np.random.Generator] = None) -> Tuple[Tensor, AttentionTrace]:
        attended, _ = self.attention(s, s)
        s = self.attention_out(s, attended, rng)
        weights: AttentionTrace = []
        if context is not None:
            interacted, weights = self.interaction(s, context)
            s = self.interaction_out(s, interacted, rng)
        return self.ffn_out(s, self.ffn(s), rng), weights


class Encoder:
    """A stack of L encoder blocks."""

    def __init__(self, store: ParamStore, prefix: str, config: ModelConfig,
                 rng: np.random.Generator) -> None:
        self.blocks = [EncoderBlock(store, f"{prefix}.{layer}", config, rng)
                       for layer in range(config.layers)]

    def __call__(self, h: Tensor, rng: Optional[np.random.Generator] = None) -> Tensor:
        for block in self.blocks:
            h, _ = block(h, rng)
        return h


class Decoder:
    """A stack of L decoder blocks attending to the encoder output."""

    def __init__(self, store: ParamStore, prefix: str, config: ModelConfig,
                 rng: np.random.Generator) -> None:
        self.blocks = [DecoderBlock(store, f"{prefix}.{layer}", config, rng)
                       for layer in range(config.layers)]

    def __call__(self, s: Tensor, context: Optional[Tensor],
                 rng: Optional[np.random.Generator] = None) -> Tuple[Tensor, List[AttentionTrace]]:
        traces = []
        for block in self.blocks:
            s, weights = block(s, context, rng)
            traces.append(weights)
        return s, traces
