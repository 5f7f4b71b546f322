"""Exact scoring, MAP decoding and log-partition over a comb graph.

Chain dynamic programs run from the tail toward the head so every chain
summarizes to a k-vector indexed by its head label. The spine then treats
those vectors as emissions, with observed pronoun nodes restricted to their
single label. Chains off the spine are handled on their own; the graph is a
forest, so the result is exact. Ties go to the lowest label index.
"""
# pylint: disable=invalid-name
import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..autodiff.params import ParamStore
from ..autodiff.tensor import Tensor, as_tensor, logsumexp, reshape
from ..errors import ShapeError
from .graph import CombGraph, SpineEntry

A1_NAME = 'gcrf.A1'
A2_NAME = 'gcrf.A2'

Emissions = Union[Tensor, np.ndarray, Any]


@dataclass
class GcrfParams:
    """Horizontal (A1) and vertical (A2) k x k transition scores."""

    A1: Tensor
    A2: Tensor

    def __post_init__(self) -> None:
        self.A1, self.A2 = as_tensor(self.A1), as_tensor(self.A2)
        k = self.A1.shape[0]
        if self.A1.shape != (k, k) or self.A2.shape != (k, k):
            raise ShapeError('GcrfParams', self.A1.shape, self.A2.shape)

    @property
    def k(self) -> int:
        return self.A1.shape[0]

    @classmethod
    def zeros(cls, k: int) -> 'GcrfParams':
        return cls(Tensor(np.zeros((k, k))), Tensor(np.zeros((k, k))))

    @classmethod
    def from_store(cls, store: ParamStore) -> 'GcrfParams':
        return cls(store[A1_NAME], store[A2_NAME])


def add_transition_params(store: ParamStore, k: int) -> GcrfParams:
    """Register zero-initialized transition matrices in ``store``."""
    return GcrfParams(store.add(A1_NAME, np.zeros((k, k))), store.add(A2_NAME, np.zeros((k, k))))


@dataclass(frozen=True)
class LabelAssignment:
    """One label sequence per utterance."""

    labels: Tuple[Tuple[int, ...], ...]

    @classmethod
    def of(cls, rows: Sequence[Sequence[int]]) -> 'LabelAssignment':
        return cls(tuple(tuple(int(y) for y in row) for row in rows))

    def check(self, lengths: Sequence[int], k: int) -> None:
        """Raise ValueError unless every token has a label in range."""
        if len(self.labels) != len(lengths):
            raise ValueError(f"assignment covers {len(self.labels)} utterances, "
                             f"graph has {len(lengths)}")
        for i, (row, m) in enumerate(zip(self.labels, lengths)):
            if len(row) != m or any(y is None for y in row):
                raise ValueError(f"assignment for utterance {i} is incomplete")
            if any(not 0 <= y < k for y in row):
                raise ValueError(f"assignment for utterance {i} has labels outside 0..{k - 1}")

    def flat(self) -> List[int]:
        return [y for row in self.labels for y in row]


@dataclass
class ChainMessage:
    """Head-indexed chain summary and head-to-tail backpointers."""

    scores: Union[np.ndarray, Tensor]
    backpointers: np.ndarray

    def trace(self, head: int) -> List[int]:
        """Labels of the whole chain given the head label."""
        path = [head]
        for row in self.backpointers:
            path.append(int(row[path[-1]]))
        return path


@dataclass
class Decoded:
    """A MAP assignment and its joint score."""

    assignment: LabelAssignment
    score: float


def emission_tensor(P: Emissions) -> Tensor:
    """Accept an EmissionTable, a Tensor or an array of shape n x m x k."""
    scores = getattr(P, 'scores', P)
    return as_tensor(scores)


def _check_shapes(graph: CombGraph, P: Tensor, params: GcrfParams) -> None:
    expected = (graph.n, max(graph.lengths, default=0), params.k)
    if P.ndim != 3:
        raise ShapeError('gcrf', P.shape, expected)
    n, m_max, k = P.shape
    if n < graph.n or m_max < max(graph.lengths, default=0) or k != params.k:
        raise ShapeError('gcrf', P.shape, expected)


def horizontal_message(P_i: Union[np.ndarray, Tensor], A1: Union[np.ndarray, Tensor],
                       mode: str = 'max') -> ChainMessage:
    """Summarize one chain, tail to head, as a vector over head labels.

    ``scores[l]`` is the best (mode ``max``) or log-summed (mode ``sum``)
    score of the chain with head label ``l``, head emission included.
    Max mode works on plain arrays and returns backpointers; sum mode keeps
    tensors on the tape.
    """
    if mode == 'max':
        emissions = P_i.data if isinstance(P_i, Tensor) else np.asarray(P_i, dtype=np.float64)
        trans = A1.data if isinstance(A1, Tensor) else np.asarray(A1, dtype=np.float64)
        k = trans.shape[0]
        message = emissions[-1].copy()
        pointers = []
        for j in range(emissions.shape[0] - 2, -1, -1):
            candidates = trans + message[None, :]
            best = candidates.argmax(axis=1)
            message = emissions[j] + candidates[np.arange(k), best]
            pointers.append(best)
        pointers.reverse()
        table = np.array(pointers, dtype=np.int64).reshape(len(pointers), k)
        return ChainMessage(message, table)
    if mode == 'sum':
        emissions, trans = as_tensor(P_i), as_tensor(A1)
        k = trans.shape[0]
        message = emissions[emissions.shape[0] - 1]
        for j in range(emissions.shape[0] - 2, -1, -1):
            message = emissions[j] + logsumexp(trans + reshape(message, (1, k)), axis=1)
        return ChainMessage(message, np.zeros((0, k), dtype=np.int64))
    raise ValueError(f"Unknown message mode '{mode}'")


def _allowed(entry: SpineEntry, k: int) -> np.ndarray:
    return np.array([entry.label]) if entry.observed else np.arange(k)


def score_tensor(graph: CombGraph, P: Emissions, params: GcrfParams,
                 assignment: LabelAssignment) -> Tensor:
    """Joint score of ``assignment`` as a tape tensor.

    Sum of every token's emission, every horizontal transition, and A2
    between consecutive spine entries, where an observed entry contributes
    its pronoun label and a latent one its chain head label.
    """
    P = emission_tensor(P)
    _check_shapes(graph, P, params)
    assignment.check(graph.lengths, params.k)
    rows = assignment.labels

    ii = [i for i, row in enumerate(rows) for _ in row]
    jj = [j for row in rows for j in range(len(row))]
    total = P[(np.array(ii), np.array(jj), np.array(assignment.flat()))].sum()

    left = [y for row in rows for y in row[:-1]]
    right = [y for row in rows for y in row[1:]]
    if left:
        total = total + params.A1[(np.array(left), np.array(right))].sum()

    heads = [e.label if e.observed else rows[e.utterance][0] for e in graph.spine]
    if len(heads) > 1:
        total = total + params.A2[(np.array(heads[:-1]), np.array(heads[1:]))].sum()
    return total


def joint_score(graph: CombGraph, P: Emissions, params: GcrfParams,
                assignment: LabelAssignment) -> float:
    """Joint score of ``assignment`` as a float.

    Args:
        graph: Comb graph the assignment labels
        P: Emission scores, n x m_max x k
        params: Transition matrices
        assignment: One label per token

    Returns:
        Emissions plus horizontal and spine transitions
    """
    return score_tensor(graph, P, params, assignment).item()


def chain_messages(graph: CombGraph, P: Emissions, params: GcrfParams,
                   mode: str = 'max') -> List[ChainMessage]:
    """One ``horizontal_message`` per utterance, in utterance order."""
    P = emission_tensor(P)
    _check_shapes(graph, P, params)
    source = P.data if mode == 'max' else P
    return [horizontal_message(source[i, :m], params.A1, mode)
            for i, m in enumerate(graph.lengths)]


def decode(graph: CombGraph, P: Emissions, params: GcrfParams) -> Decoded:
    """Exact MAP assignment: chain messages, spine Viterbi, then traceback.

    The spine pass runs last entry to first so the traceback fixes heads in
    utterance order. With the lowest index winning every max, ties resolve
    to the lexicographically smallest optimal assignment.

    Args:
        graph: A validated comb graph
        P: Emission scores, n x m_max x k
        params: Transition matrices

    Returns:
        The best assignment and its joint score
    """
    messages = chain_messages(graph, P, params, 'max')
    k = params.k
    A2 = params.A2.data
    heads: Dict[int, int] = {}

    if graph.spine:
        allowed = [_allowed(e, k) for e in graph.spine]
        emit = [np.zeros(1) if e.observed else messages[e.utterance].scores for e in graph.spine]
        beta = list(emit)
        for t in range(len(graph.spine) - 2, -1, -1):
            candidates = A2[np.ix_(allowed[t], allowed[t + 1])] + beta[t + 1][None, :]
            beta[t] = emit[t] + candidates.max(axis=1)
        position = int(beta[0].argmax())
        for t, entry in enumerate(graph.spine):
            if t > 0:
                previous = allowed[t - 1][position]
                position = int((A2[previous, allowed[t]] + beta[t]).argmax())
            if not entry.observed:
                heads[entry.utterance] = int(allowed[t][position])

    for i in graph.detached():
        heads[i] = int(np.argmax(messages[i].scores))

    assignment = LabelAssignment.of([messages[i].trace(heads[i]) for i in range(graph.n)])
    return Decoded(assignment, joint_score(graph, P, params, assignment))


def log_partition(graph: CombGraph, P: Emissions, params: GcrfParams) -> Tensor:
    """log Z as a tape tensor: forward algorithm along the spine plus
    the independent log-sums of detached chains."""
    messages = chain_messages(graph, P, params, 'sum')
    k = params.k
    terms: List[Tensor] = []

    if graph.spine:
        allowed = [_allowed(e, k) for e in graph.spine]
        first = graph.spine[0]
        alpha = Tensor(np.zeros(1)) if first.observed else messages[first.utterance].scores
        for t in range(1, len(graph.spine)):
            entry = graph.spine[t]
            pairwise = reshape(alpha, (len(allowed[t - 1]), 1)) \
                + params.A2[np.ix_(allowed[t - 1], allowed[t])]
            alpha = logsumexp(pairwise, axis=0)
            if not entry.observed:
                alpha = alpha + messages[entry.utterance].scores
        terms.append(logsumexp(alpha))

    for i in graph.detached():
        terms.append(logsumexp(messages[i].scores))

    total = terms[0]
    for term in terms[1:]:
        total = total + term
    return total


def nll(graph: CombGraph, P: Emissions, params: GcrfParams,
        gold: LabelAssignment) -> Tensor:
    """-log p(gold | snippet) = log Z - score(gold), on the tape.

    Raises:
        ValueError: If ``gold`` does not label every token
    """
    gold.check(graph.lengths, params.k)
    return log_partition(graph, P, params) - score_tensor(graph, P, params, gold)


def dump_messages(graph: CombGraph, P: Emissions, params: GcrfParams,
                  directory: Path, prefix: str = 'snippet') -> List[Path]:
    """Write max-mode chain messages and backpointers as CSV files."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for i, message in enumerate(chain_messages(graph, P, params, 'max')):
        path = directory / f"{prefix}_chain{i}.csv"
        with open(path, 'w', newline='', encoding='utf-8') as handle:
            writer = csv.writer(handle)
            writer.writerow(['row'] + [f"label{label}" for label in range(params.k)])
            writer.writerow(['message'] + [repr(float(v)) for v in message.scores])
            for j, row in enumerate(message.backpointers):
                writer.writerow([f"bp{j}"] + [int(v) for v in row])
        written.append(path)
    return written


def token_argmax(graph: CombGraph, P: Emissions) -> LabelAssignment:
    """Independent per-token argmax (lowest index on ties)."""
    scores = emission_tensor(P).data
    return LabelAssignment.of([scores[i, :m].argmax(axis=1) for i, m in enumerate(graph.lengths)])


def token_nll(graph: CombGraph, P: Emissions, gold: LabelAssignment,
              k: Optional[int] = None) -> Tensor:
    """Sum of per-token cross-entropies, ignoring all transitions."""
    P = emission_tensor(P)
    k = k if k is not None else P.shape[-1]
    gold.check(graph.lengths, k)
    total: Optional[Tensor] = None
    for i, row in enumerate(gold.labels):
        logits = P[i, :len(row)]
        picked = logits[(np.arange(len(row)), np.array(row))].sum()
        term = logsumexp(logits, axis=1).sum() - picked
        total = term if total is None else total + term
    return total if total is not None else Tensor(0.0)
