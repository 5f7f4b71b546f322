"""Exhaustive enumeration over every label assignment of a small graph.

Used as the reference for decoding and the log-partition. Assignments are
enumerated in lexicographic order (first token most significant), so on
ties the lexicographically smallest assignment wins.
"""
# pylint: disable=invalid-name
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from ..errors import InstanceTooLargeError
from .graph import CombGraph
from .inference import Emissions, GcrfParams, LabelAssignment, emission_tensor

MAX_TOKENS = 12
MAX_LABELS = 4
CHUNK = 1 << 16


@dataclass
class BruteForceResult:
    assignment: LabelAssignment
    max_score: float
    log_z: float


def brute_force(graph: CombGraph, P: Emissions, params: GcrfParams) -> BruteForceResult:
    """Enumerate all k^(sum m) assignments; observed spine labels stay clamped.

    Raises:
        InstanceTooLargeError: If the graph has more than 12 tokens or k > 4
    """
    k = params.k
    total = graph.token_count
    if total > MAX_TOKENS or k > MAX_LABELS:
        raise InstanceTooLargeError(
            f"brute force limited to {MAX_TOKENS} tokens and {MAX_LABELS} labels, "
            f"got {total} tokens and {k} labels"
        )
    scores = emission_tensor(P).data
    A1, A2 = params.A1.data, params.A2.data

    offsets = np.cumsum([0] + list(graph.lengths))
    emission_rows = np.concatenate([scores[i, :m] for i, m in enumerate(graph.lengths)])
    horizontal = [(offsets[i] + j, offsets[i] + j + 1)
                  for i, m in enumerate(graph.lengths) for j in range(m - 1)]
    left = np.array([a for a, _ in horizontal], dtype=np.int64)
    right = np.array([b for _, b in horizontal], dtype=np.int64)

    best_score, best_row, log_z = -np.inf, None, -np.inf
    count = k ** total
    for start in range(0, count, CHUNK):
        codes = np.arange(start, min(start + CHUNK, count))
        grid = np.stack(np.unravel_index(codes, (k,) * total), axis=1)
        chunk = emission_rows[np.arange(total), grid].sum(axis=1)
        if len(left):
            chunk = chunk + A1[grid[:, left], grid[:, right]].sum(axis=1)
        heads = [np.full(len(codes), e.label) if e.observed else grid[:, offsets[e.utterance]]
                 for e in graph.spine]
        for first, second in zip(heads, heads[1:]):
            chunk = chunk + A2[first, second]
        top = int(np.argmax(chunk))
        if chunk[top] > best_score:
            best_score, best_row = float(chunk[top]), grid[top]
        log_z = float(np.logaddexp(log_z, logsumexp(chunk)))

    rows = [best_row[offsets[i]:offsets[i + 1]].tolist() for i in range(graph.n)]
    return BruteForceResult(LabelAssignment.of(rows), best_score, log_z)
