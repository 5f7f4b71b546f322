"""Minimal reverse-mode autodiff substrate: tensors, parameters, Adam."""
from .checkpoint import load_params, save_params
from .gradcheck import GradCheckReport, finite_diff_check
from .init import glorot_bound, glorot_uniform, make_rng
from .optim import Adam, adam_step
from .params import ParamStore
from .tensor import (
    Tensor,
    TapeNode,
    add,
    as_tensor,
    concat,
    dropout,
    embedding_lookup,
    layer_norm,
    logsumexp,
    matmul,
    multiply,
    relu,
    reshape,
    scale,
    select,
    softmax,
    stack,
    tanh,
    transpose,
)

__all__ = [
    'Adam', 'GradCheckReport', 'ParamStore', 'TapeNode', 'Tensor', 'adam_step', 'add',
    'as_tensor', 'concat', 'dropout', 'embedding_lookup', 'finite_diff_check',
    'glorot_bound', 'glorot_uniform', 'layer_norm', 'load_params', 'logsumexp',
    'make_rng', 'matmul', 'multiply', 'relu', 'reshape', 'save_params', 'scale',
    'select', 'softmax', 'stack', 'tanh', 'transpose',
]
