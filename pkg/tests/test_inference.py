"""Tests for comb-graph scoring, decoding and the log-partition."""
# pylint: disable=invalid-name
import csv
import math

import numpy as np
import pytest
from conftest import make_snippet
from scipy.special import logsumexp

from dropcomb.autodiff.gradcheck import finite_diff_check
from dropcomb.autodiff.params import ParamStore
from dropcomb.errors import CorpusError, InstanceTooLargeError
from dropcomb.gcrf.brute_force import brute_force
from dropcomb.gcrf.decoder_factory import DecoderFactory, GcrfDecoder, TokenDecoder
from dropcomb.gcrf.graph import CombGraph, SpineEntry, build_initial_graph
from dropcomb.gcrf.inference import (
    A1_NAME,
    A2_NAME,
    GcrfParams,
    LabelAssignment,
    decode,
    dump_messages,
    horizontal_message,
    joint_score,
    log_partition,
    nll,
    token_argmax,
    token_nll,
)


def _graph(lengths, spine=None):
    chains = tuple(tuple((i, j) for j in range(m)) for i, m in enumerate(lengths))
    if spine is None:
        spine = tuple(SpineEntry(i) for i in range(len(lengths)))
    return CombGraph(chains, tuple(spine), tuple('x' for _ in lengths))


def _random_instance(rng, binary=False, max_k=4):
    """Random graph with clamped and skipped spine entries, n, m <= 3 and k <= max_k.

    ``binary`` draws every score from {0, 1}, so optimal assignments tie often.
    """
    n = int(rng.integers(1, 4))
    lengths = [int(m) for m in rng.integers(1, 4, size=n)]
    k = int(rng.integers(1, max_k + 1))
    spine = []
    for i in range(n):
        draw = rng.random()
        if draw < 0.2:
            continue
        spine.append(SpineEntry(i, int(rng.integers(k))) if draw < 0.4 else SpineEntry(i))

    def scores(*shape):
        return rng.integers(0, 2, size=shape).astype(float) if binary else rng.normal(size=shape)

    P = scores(n, max(lengths), k)
    params = GcrfParams(scores(k, k), scores(k, k))
    return _graph(lengths, spine), P, params


def test_joint_score_zero():
    """Test all-zero scores give zero for any assignment."""
    graph = _graph([2, 1])
    params = GcrfParams.zeros(3)
    assert joint_score(graph, np.zeros((2, 2, 3)), params, LabelAssignment.of([[2, 1], [0]])) == 0


def test_joint_score_worked_example():
    """Test the two-utterance example: 0.1 + 0.4 + A2[0, 1]."""
    graph = _graph([1, 1])
    P = np.array([[[0.1, 0.2]], [[0.3, 0.4]]])
    params = GcrfParams(np.zeros((2, 2)), np.array([[0.0, 1.0], [1.0, 0.0]]))
    score = joint_score(graph, P, params, LabelAssignment.of([[0], [1]]))
    assert score == pytest.approx(1.5, abs=1e-12)


def test_joint_score_straight_line(rng):
    """Test joint_score against a term-by-term re-summation."""
    graph = _graph([3, 3, 3])
    P = rng.normal(size=(3, 3, 3))
    A1, A2 = rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
    rows = [[0, 2, 1], [1, 1, 0], [2, 0, 2]]
    expected = sum(P[i, j, y] for i, row in enumerate(rows) for j, y in enumerate(row))
    expected += sum(A1[row[j], row[j + 1]] for row in rows for j in range(2))
    expected += A2[rows[0][0], rows[1][0]] + A2[rows[1][0], rows[2][0]]
    score = joint_score(graph, P, GcrfParams(A1, A2), LabelAssignment.of(rows))
    assert score == pytest.approx(expected, abs=1e-12)


def test_joint_score_observed_entry():
    """Test an observed spine entry contributes its own label to A2."""
    graph = _graph([1, 1], [SpineEntry(0), SpineEntry(1, 1)])
    A2 = np.array([[0.0, 3.0], [0.0, 0.0]])
    params = GcrfParams(np.zeros((2, 2)), A2)
    # the chain head of utterance 1 is labeled 0 but the observed node carries 1
    assert joint_score(graph, np.zeros((2, 1, 2)), params, LabelAssignment.of([[0], [0]])) == 3.0


def test_horizontal_message_single_token():
    """Test the base case: the head emission and no backpointers."""
    message = horizontal_message(np.array([[0.5, -1.0]]), np.zeros((2, 2)))
    np.testing.assert_array_equal(message.scores, [0.5, -1.0])
    assert message.backpointers.shape == (0, 2)


def test_horizontal_message_two_tokens():
    """Test the two-token max message and its backpointers."""
    P = np.array([[0.0, 0.0], [1.0, 0.0]])
    A1 = np.array([[0.0, 2.0], [0.0, 0.0]])
    message = horizontal_message(P, A1, 'max')
    # head 0: max(0 + 1, 2 + 0); head 1: max(0 + 1, 0 + 0)
    np.testing.assert_array_equal(message.scores, [2.0, 1.0])
    np.testing.assert_array_equal(message.backpointers, [[1, 0]])
    assert message.trace(0) == [0, 1]
    assert message.trace(1) == [1, 0]


def test_horizontal_message_matches_enumeration(rng):
    """Test both modes on a length-4 chain against all k^4 sequences."""
    k = 3
    P, A1 = rng.normal(size=(4, k)), rng.normal(size=(k, k))
    grid = np.stack(np.unravel_index(np.arange(k ** 4), (k,) * 4), axis=1)
    totals = P[np.arange(4), grid].sum(axis=1) + sum(A1[grid[:, j], grid[:, j + 1]]
                                                     for j in range(3))
    best = [totals[grid[:, 0] == head].max() for head in range(k)]
    summed = [logsumexp(totals[grid[:, 0] == head]) for head in range(k)]
    np.testing.assert_allclose(horizontal_message(P, A1, 'max').scores, best, atol=1e-12)
    np.testing.assert_allclose(horizontal_message(P, A1, 'sum').scores.data, summed, atol=1e-12)
    message = horizontal_message(P, A1, 'max')
    for head in range(k):
        path = message.trace(head)
        assert totals[np.ravel_multi_index(path, (k,) * 4)] == pytest.approx(best[head])


def test_horizontal_message_bad_mode():
    """Test an unknown mode is rejected."""
    with pytest.raises(ValueError):
        horizontal_message(np.zeros((1, 2)), np.zeros((2, 2)), 'mean')


def test_decode_single_token():
    """Test argmax of a single node."""
    result = decode(_graph([1]), np.array([[[0.3, 0.7]]]), GcrfParams.zeros(2))
    assert result.assignment.labels == ((1,),)
    assert result.score == pytest.approx(0.7)


def test_decode_dominant_spine_transition():
    """Test a large A2[0, 0] pulls every head to label 0."""
    params = GcrfParams(np.zeros((2, 2)), np.array([[5.0, 0.0], [0.0, 0.0]]))
    result = decode(_graph([2, 2]), np.zeros((2, 2, 2)), params)
    assert result.assignment.labels == ((0, 0), (0, 0))
    assert result.score == 5.0


def test_decode_matches_brute_force():
    """Test decode and log_partition against enumeration on random instances."""
    rng = np.random.default_rng(2024)
    for _ in range(200):
        graph, P, params = _random_instance(rng)
        reference = brute_force(graph, P, params)
        result = decode(graph, P, params)
        assert result.score == pytest.approx(reference.max_score, abs=1e-9)
        assert result.assignment == reference.assignment
        log_z = log_partition(graph, P, params).item()
        assert log_z == pytest.approx(reference.log_z, rel=1e-9, abs=1e-9)


def test_decode_ties_match_brute_force():
    """Test tied optima resolve to the same assignment as enumeration."""
    rng = np.random.default_rng(77)
    for _ in range(300):
        graph, P, params = _random_instance(rng, binary=True, max_k=3)
        reference = brute_force(graph, P, params)
        result = decode(graph, P, params)
        assert result.score == reference.max_score
        assert result.assignment == reference.assignment


def test_decode_tie_prefers_lowest_first_head():
    """Test an all-zero instance decodes to label 0 everywhere."""
    graph = _graph([2, 1], spine=(SpineEntry(0), SpineEntry(1)))
    result = decode(graph, np.zeros((2, 2, 3)), GcrfParams.zeros(3))
    assert result.assignment.labels == ((0, 0), (0,))


def test_decode_tie_on_spine_keeps_earlier_head_low():
    """Test a tie between (0, 1) and (1, 0) head pairs picks (0, 1)."""
    params = GcrfParams(np.zeros((2, 2)), np.array([[0.0, 1.0], [1.0, 0.0]]))
    result = decode(_graph([1, 1]), np.zeros((2, 1, 2)), params)
    assert result.assignment.labels == ((0,), (1,))
    assert result.score == 1.0


def test_decode_score_is_rescored_exactly(rng):
    """Test the reported score equals joint_score of the decoded assignment."""
    for _ in range(20):
        graph, P, params = _random_instance(rng)
        result = decode(graph, P, params)
        assert result.score == joint_score(graph, P, params, result.assignment)


def test_decode_is_shift_invariant(rng):
    """Test a per-token constant added to every label leaves the decode unchanged."""
    graph = _graph([3, 2, 3])
    P = rng.normal(size=(3, 3, 4))
    params = GcrfParams(rng.normal(size=(4, 4)), rng.normal(size=(4, 4)))
    shifted = P + rng.normal(size=(3, 3, 1))
    assert decode(graph, shifted, params).assignment == decode(graph, P, params).assignment


def test_log_partition_single_node():
    """Test uniform and arbitrary single-node partitions."""
    graph = _graph([1])
    assert log_partition(graph, np.zeros((1, 1, 3)), GcrfParams.zeros(3)).item() == \
        pytest.approx(math.log(3))
    e = np.array([0.2, -1.3, 2.5])
    assert log_partition(graph, e.reshape(1, 1, 3), GcrfParams.zeros(3)).item() == \
        pytest.approx(logsumexp(e))


def test_nll_single_label():
    """Test a one-label inventory has zero loss."""
    graph = _graph([2, 1])
    P = np.array([[[0.4], [-2.0]], [[1.5], [0.0]]])
    gold = LabelAssignment.of([[0, 0], [0]])
    assert nll(graph, P, GcrfParams(np.ones((1, 1)), np.ones((1, 1))), gold).item() == \
        pytest.approx(0.0, abs=1e-12)


def test_nll_matches_brute_force(rng):
    """Test nll = logZ - score on a random 2 x 2 x 3 instance."""
    graph = _graph([2, 2])
    P = rng.normal(size=(2, 2, 3))
    params = GcrfParams(rng.normal(size=(3, 3)), rng.normal(size=(3, 3)))
    gold = LabelAssignment.of([[1, 2], [0, 0]])
    reference = brute_force(graph, P, params)
    expected = reference.log_z - joint_score(graph, P, params, gold)
    assert nll(graph, P, params, gold).item() == pytest.approx(expected, abs=1e-9)


@pytest.mark.parametrize('c', [-3.0, 0.5, 7.25])
def test_constant_shift_leaves_probability_unchanged(rng, c):
    """Test log Z moves by c per token and the loss stays put."""
    spine = (SpineEntry(0), SpineEntry(1, label=2), SpineEntry(3))
    graph = _graph([2, 3, 1, 2], spine=spine)
    P = rng.normal(size=(4, 3, 4))
    params = GcrfParams(rng.normal(size=(4, 4)), rng.normal(size=(4, 4)))
    gold = LabelAssignment.of([[1, 0], [2, 3, 3], [0], [1, 2]])

    log_z = log_partition(graph, P, params).item()
    shifted_log_z = log_partition(graph, P + c, params).item()
    assert shifted_log_z == pytest.approx(log_z + c * graph.token_count, abs=1e-9)
    assert nll(graph, P + c, params, gold).item() == \
        pytest.approx(nll(graph, P, params, gold).item(), abs=1e-9)


def test_nll_decreases_when_scores_sharpen(rng):
    """Test the loss of the MAP assignment shrinks as all scores are scaled up."""
    graph = _graph([2, 3])
    P = rng.normal(size=(2, 3, 3))
    A1, A2 = rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
    gold = decode(graph, P, GcrfParams(A1, A2)).assignment
    losses = [nll(graph, s * P, GcrfParams(s * A1, s * A2), gold).item() for s in (1, 2, 4)]
    assert losses[0] > losses[1] > losses[2] > -1e-9


def test_nll_incomplete_gold():
    """Test a gold assignment missing a token is rejected."""
    with pytest.raises(ValueError):
        nll(_graph([2]), np.zeros((1, 2, 2)), GcrfParams.zeros(2), LabelAssignment.of([[0]]))


def test_nll_gradients(rng):
    """Test nll gradients w.r.t. emissions and both transition matrices."""
    store = ParamStore()
    P = store.add('emissions', rng.normal(size=(2, 2, 3)))
    params = GcrfParams(store.add(A1_NAME, rng.normal(size=(3, 3))),
                        store.add(A2_NAME, rng.normal(size=(3, 3))))
    graph = _graph([2, 1], [SpineEntry(0), SpineEntry(1)])
    gold = LabelAssignment.of([[2, 0], [1]])
    report = finite_diff_check(lambda: nll(graph, P, params, gold), store, h=1e-5, tol=1e-6)
    assert report.passed, report.flagged


def test_log_partition_gradient_is_marginal(rng):
    """Test dlogZ/dP gives token marginals: one per token, none on padding."""
    store = ParamStore()
    P = store.add('emissions', rng.normal(size=(3, 3, 4)))
    params = GcrfParams(rng.normal(size=(4, 4)), rng.normal(size=(4, 4)))
    graph = _graph([3, 1, 2], [SpineEntry(0), SpineEntry(1, 2), SpineEntry(2)])
    log_partition(graph, P, params).backward()
    sums = P.grad.sum(axis=2)
    np.testing.assert_allclose(sums, [[1, 1, 1], [1, 0, 0], [1, 1, 0]], atol=1e-12)
    assert (P.grad >= 0).all()


def test_brute_force_guards_and_bounds(rng):
    """Test the size guard and max <= logZ <= max + N ln k."""
    with pytest.raises(InstanceTooLargeError):
        brute_force(_graph([7, 6]), np.zeros((2, 7, 2)), GcrfParams.zeros(2))
    with pytest.raises(InstanceTooLargeError):
        brute_force(_graph([1]), np.zeros((1, 1, 5)), GcrfParams.zeros(5))

    single = brute_force(_graph([1]), np.array([[[0.0, 0.0]]]), GcrfParams.zeros(2))
    assert single.log_z == pytest.approx(math.log(2))

    graph = _graph([2, 2], [SpineEntry(0, 1), SpineEntry(1)])
    P = rng.normal(size=(2, 2, 3))
    params = GcrfParams(rng.normal(size=(3, 3)), rng.normal(size=(3, 3)))
    result = brute_force(graph, P, params)
    assert result.max_score <= result.log_z <= result.max_score + 4 * math.log(3)


def test_brute_force_clamps_observed_entries():
    """Test A2 sees only the observed label of a clamped entry."""
    graph = _graph([1, 1], [SpineEntry(0, 0), SpineEntry(1)])
    A2 = np.array([[0.0, 4.0], [9.0, 0.0]])
    result = brute_force(graph, np.zeros((2, 1, 2)), GcrfParams(np.zeros((2, 2)), A2))
    # row 1 of A2 is unreachable from the observed label 0
    assert result.max_score == 4.0
    assert result.assignment.labels[1] == (1,)


def test_token_argmax_and_nll():
    """Test the independent per-token baseline."""
    graph = _graph([2, 1])
    P = np.array([[[0.0, 1.0], [2.0, 0.5]], [[0.3, 0.1], [9.0, 9.0]]])
    assert token_argmax(graph, P).labels == ((1, 0), (0,))
    gold = LabelAssignment.of([[1, 1], [0]])
    expected = sum(logsumexp(P[i, j]) - P[i, j, y]
                   for i, row in enumerate(gold.labels) for j, y in enumerate(row))
    assert token_nll(graph, P, gold).item() == pytest.approx(expected)


def test_dump_messages(tmp_path, rng):
    """Test one CSV per chain with message and backpointer rows."""
    graph = _graph([3, 1])
    written = dump_messages(graph, rng.normal(size=(2, 3, 2)), GcrfParams.zeros(2),
                            tmp_path, prefix='c1_0')
    assert [p.name for p in written] == ['c1_0_chain0.csv', 'c1_0_chain1.csv']
    with open(written[0], encoding='utf-8') as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ['row', 'label0', 'label1']
    assert [r[0] for r in rows[1:]] == ['message', 'bp0', 'bp1']


def test_decoder_factory_modes(pronouns, interjections):
    """Test each ablation mode builds the matching graph and decoder."""
    snippet = make_snippet([['我', 'a'], ['嗯'], ['b']])
    full = DecoderFactory.create_decoder('full', pronouns, interjections)
    assert isinstance(full, GcrfDecoder)
    assert [(e.utterance, e.observed) for e in full.graph(snippet).spine] == [(0, True), (2, False)]
    plain = DecoderFactory.create_decoder('no_refine', pronouns, interjections)
    assert plain.graph(snippet) == build_initial_graph(snippet)
    flat = DecoderFactory.create_decoder('no_vertical', pronouns, interjections)
    assert flat.graph(snippet).spine == ()
    assert isinstance(DecoderFactory.create_decoder('no_gcrf'), TokenDecoder)
    with pytest.raises(ValueError):
        DecoderFactory.create_decoder('no_transformer')


def test_gcrf_decoder_rejects_broken_graph(monkeypatch, pronouns, interjections):
    """Test a graph failing validation is reported with its snippet id."""
    broken = _graph([1, 1], spine=(SpineEntry(1), SpineEntry(0)))
    monkeypatch.setattr('dropcomb.gcrf.decoder_factory.build_graph',
                        lambda *args, **kwargs: broken)
    decoder = DecoderFactory.create_decoder('full', pronouns, interjections)
    with pytest.raises(CorpusError, match='spine not strictly increasing'):
        decoder.graph(make_snippet([['a'], ['b']], snippet_id='bad#0'))


def test_token_decoder_equals_argmax(rng):
    """Test no_gcrf predictions ignore the transitions entirely."""
    snippet = make_snippet([['a', 'b'], ['c']])
    decoder = DecoderFactory.create_decoder('no_gcrf')
    graph = decoder.graph(snippet)
    P = rng.normal(size=(2, 2, 3))
    params = GcrfParams(rng.normal(size=(3, 3)) * 10, rng.normal(size=(3, 3)) * 10)
    assert decoder.predict(graph, P, params) == token_argmax(graph, P)
