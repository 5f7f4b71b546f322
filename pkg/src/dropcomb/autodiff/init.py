"""Seeded random generators and Glorot initialization.

All randomness goes through ``numpy.random.Generator`` with the PCG64 bit
generator, so a seed fully determines initialization, shuffling and
synthetic data.
"""
import math

import numpy as np

from .tensor import Tensor


def make_rng(seed: int) -> np.random.Generator:
    """Create a PCG64-backed generator for ``seed``."""
    return np.random.Generator(np.random.PCG64(seed))


def glorot_bound(rows: int, cols: int) -> float:
    return math.sqrt(6.0 / (rows + cols))


def glorot_uniform(rows: int, cols: int, rng: np.random.Generator) -> Tensor:
    """Sample a rows x cols matrix uniformly from +/- sqrt(6 / (rows + cols)).

    Raises:
        ValueError: If either dimension is below 1
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"glorot_uniform needs positive dims, got {rows}x{cols}")
    bound = glorot_bound(rows, cols)
    return Tensor(rng.uniform(-bound, bound, size=(rows, cols)))
