"""Scaled dot-product multi-head attention."""
import math
from typing import List, Tuple

import numpy as np

from ..autodiff.init import glorot_uniform
from ..autodiff.params import ParamStore
from ..autodiff.tensor import Tensor, concat, softmax
from ..errors import ShapeError


def multi_head_attention(query_src: Tensor, key_src: Tensor, value_src: Tensor,
                         wq: Tensor, wk: Tensor, wv: Tensor, wo: Tensor,
                         heads: int) -> Tuple[Tensor, List[np.ndarray]]:
    """Attend from ``query_src`` rows over ``key_src``/``value_src`` rows.

    Each head uses a d/h-wide slice of the projections and scales scores by
    1/sqrt(d/h); head outputs are concatenated and projected by ``wo``.

    Returns:
        The attended states and one (queries x keys) weight matrix per head
    """
    d = wq.shape[0]
    if d % heads:
        raise ShapeError('multi_head_attention', wq.shape, (heads,))
    for src in (query_src, key_src, value_src):
        if src.ndim != 2 or src.shape[1] != d:
            raise ShapeError('multi_head_attention', src.shape, wq.shape)
    if key_src.shape[0] != value_src.shape[0]:
        raise ShapeError('multi_head_attention', key_src.shape, value_src.shape)

    width = d // heads
    scale = 1.0 / math.sqrt(width)
    q, k, v = query_src @ wq, key_src @ wk, value_src @ wv
    outputs, weights = [], []
    for h in range(heads):
        cols = (slice(None), slice(h * width, (h + 1) * width))
        attn = softmax((q[cols] @ k[cols].T) * scale, axis=1)
        outputs.append(attn @ v[cols])
        weights.append(attn.data.copy())
    return concat(outputs, axis=1) @ wo, weights


class MultiHeadAttention:
    """Query/key/value/output projections, each d x d."""

    def __init__(self, store: ParamStore, prefix: str, d: int, heads: int,
                 rng: np.random.Generator) -> None:
        if d % heads:
            raise ShapeError('MultiHeadAttention', (d,), (heads,))
        self.heads = heads
        self.wq = store.add(f"{prefix}.wq", glorot_uniform(d, d, rng).data)
        self.wk = store.add(f"{prefix}.wk", glorot_uniform(d, d, rng).data)
        self.wv = store.add(f"{prefix}.wv", glorot_uniform(d, d, rng).data)
        self.wo = store.add(f"{prefix}.wo", glorot_uniform(d, d, rng).data)

    def __call__(self, queries: Tensor, memory: Tensor) -> Tuple[Tensor, List[np.ndarray]]:
        return multi_head_attention(queries, memory, memory, self.wq, self.wk, self.wv,
                                    self.wo, self.heads)
