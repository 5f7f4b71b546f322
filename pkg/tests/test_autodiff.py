"""Tests for the tensor tape, initialization, Adam and checkpoints."""
import math

import numpy as np
import pytest

from dropcomb.autodiff.checkpoint import load_params, save_params
from dropcomb.autodiff.gradcheck import finite_diff_check
from dropcomb.autodiff.init import glorot_bound, glorot_uniform, make_rng
from dropcomb.autodiff.optim import Adam, adam_step
from dropcomb.autodiff.params import ParamStore
from dropcomb.autodiff.tensor import (
    Tensor,
    concat,
    embedding_lookup,
    layer_norm,
    logsumexp,
    softmax,
    stack,
    tanh,
)
from dropcomb.errors import CheckpointError, ShapeError


def _numeric_grad(fn, x, h=1e-5):
    grad = np.zeros_like(x)
    flat = x.reshape(-1)
    for pos in range(flat.size):
        original = flat[pos]
        flat[pos] = original + h
        plus = fn(x)
        flat[pos] = original - h
        minus = fn(x)
        flat[pos] = original
        grad.reshape(-1)[pos] = (plus - minus) / (2 * h)
    return grad


def _check_op(build, *shapes, seed=0):
    """Compare tape gradients of sum(w * build(...)) with central differences."""
    rng = np.random.default_rng(seed)
    arrays = [rng.normal(size=s) for s in shapes]
    out_shape = build(*[Tensor(a) for a in arrays]).shape
    weights = rng.normal(size=out_shape)

    leaves = [Tensor(a.copy(), requires_grad=True) for a in arrays]
    (build(*leaves) * Tensor(weights)).sum().backward()
    for index, leaf in enumerate(leaves):
        def value(x, index=index):
            inputs = [Tensor(a) for a in arrays]
            inputs[index] = Tensor(x)
            return float((build(*inputs).data * weights).sum())
        numeric = _numeric_grad(value, arrays[index].copy())
        assert np.allclose(leaf.grad, numeric, rtol=1e-6, atol=1e-8), build


def test_softmax_values():
    """Test softmax([0, ln 3]) = [0.25, 0.75]."""
    out = softmax(Tensor([0.0, math.log(3.0)]))
    assert np.allclose(out.data, [0.25, 0.75])


def test_softmax_rows_sum_to_one():
    """Test row normalization."""
    out = softmax(Tensor(np.random.default_rng(0).normal(size=(4, 6)) * 20), axis=1)
    assert np.allclose(out.data.sum(axis=1), 1.0, atol=1e-12)


def test_logsumexp_values_and_bounds():
    """Test logsumexp identity and its bounds."""
    assert logsumexp(Tensor([0.0, 0.0, 0.0])).item() == pytest.approx(math.log(3.0))
    x = np.random.default_rng(3).normal(size=7) * 50
    value = logsumexp(Tensor(x)).item()
    assert x.max() <= value <= x.max() + math.log(len(x))
    assert np.isfinite(logsumexp(Tensor([1000.0, 1000.0])).item())


def test_tanh_gradient_at_zero():
    """Test d tanh / dx at 0 is 1."""
    x = Tensor(0.0, requires_grad=True)
    tanh(x).backward()
    assert float(x.grad) == pytest.approx(1.0)


@pytest.mark.parametrize('build,shapes', [
    (lambda a, b: a @ b, [(3, 4), (4, 2)]),
    (lambda a, b: a + b, [(3, 4), (4,)]),
    (lambda a, b: a * b, [(3, 1), (3, 4)]),
    (lambda a: a * 2.5 - 1.0, [(2, 3)]),
    (lambda a: a.tanh(), [(3, 3)]),
    (lambda a: a.relu(), [(4, 5)]),
    (lambda a: a.softmax(axis=1), [(3, 4)]),
    (lambda a: a.logsumexp(axis=0), [(4, 3)]),
    (lambda a: a.logsumexp(), [(2, 3)]),
    (lambda a: a.T, [(2, 5)]),
    (lambda a: a.reshape(3, 2), [(2, 3)]),
    (lambda a: a[1:, ::2], [(3, 4)]),
    (lambda a: a.sum(axis=1), [(3, 4)]),
    (lambda a, g, b: layer_norm(a, g, b), [(3, 5), (5,), (5,)]),
    (lambda a, b: concat([a, b], axis=0), [(2, 3), (1, 3)]),
    (lambda a, b: stack([a, b]), [(2, 3), (2, 3)]),
])
def test_primitive_gradients(build, shapes):
    """Test every primitive's backward against central differences."""
    _check_op(build, *shapes)


def test_relu_gradient_away_from_kink():
    """Test relu gradient is the indicator of positive inputs."""
    x = Tensor([-1.0, 2.0, 0.5], requires_grad=True)
    x.relu().sum().backward()
    assert np.array_equal(x.grad, [0.0, 1.0, 1.0])


def test_fancy_select_accumulates():
    """Test repeated fancy indices accumulate gradient."""
    x = Tensor(np.arange(6.0).reshape(2, 3), requires_grad=True)
    x[(np.array([0, 0, 1]), np.array([1, 1, 2]))].sum().backward()
    assert np.array_equal(x.grad, [[0.0, 2.0, 0.0], [0.0, 0.0, 1.0]])


def test_embedding_lookup_accumulates():
    """Test repeated ids accumulate into the same table row."""
    table = Tensor(np.ones((4, 2)), requires_grad=True)
    out = embedding_lookup(table, [1, 1, 3])
    assert out.shape == (3, 2)
    out.sum().backward()
    assert np.array_equal(table.grad[:, 0], [0.0, 2.0, 0.0, 1.0])
    with pytest.raises(ShapeError):
        embedding_lookup(table, [4])


def test_shape_errors_name_op():
    """Test shape mismatches name the operation."""
    with pytest.raises(ShapeError) as excinfo:
        Tensor(np.zeros((2, 3))) @ Tensor(np.zeros((2, 3)))
    assert 'matmul' in str(excinfo.value)
    with pytest.raises(ShapeError):
        Tensor(np.zeros((2, 3))) + Tensor(np.zeros((4,)))
    with pytest.raises(ShapeError):
        Tensor(np.zeros(3)).item()


def test_disconnected_parameter_gets_zero():
    """Test a parameter absent from the loss keeps a zero gradient."""
    store = ParamStore()
    used = store.add('used', np.ones(3))
    store.add('unused', np.ones(2))
    (used * 2.0).sum().backward()
    grads = store.grads()
    assert np.array_equal(grads['unused'], np.zeros(2))
    assert np.array_equal(grads['used'], np.full(3, 2.0))


def test_shared_subexpression_backward_once():
    """Test a node reused twice contributes both paths."""
    x = Tensor(3.0, requires_grad=True)
    y = x * x
    (y + y).backward()
    assert float(x.grad) == pytest.approx(12.0)


@pytest.mark.parametrize('rows,cols,bound', [(3, 3, 1.0), (1, 5, 1.0), (10, 20, math.sqrt(0.2))])
def test_glorot_bounds(rows, cols, bound):
    """Test the Glorot bound formula and sample range."""
    assert glorot_bound(rows, cols) == pytest.approx(bound)
    sample = glorot_uniform(rows, cols, make_rng(0)).data
    assert sample.shape == (rows, cols)
    assert np.all(np.abs(sample) <= bound)


def test_glorot_is_seeded():
    """Test identical seeds give identical matrices."""
    first = glorot_uniform(4, 6, make_rng(42)).data
    second = glorot_uniform(4, 6, make_rng(42)).data
    assert np.array_equal(first, second)
    with pytest.raises(ValueError):
        glorot_uniform(0, 3, make_rng(0))


def test_param_store_names_unique():
    """Test duplicate names are refused."""
    store = ParamStore()
    store.add('w', np.zeros(2))
    with pytest.raises(KeyError):
        store.add('w', np.zeros(2))


def test_adam_zero_gradient():
    """Test a zero gradient leaves parameters alone and decays moments."""
    store = ParamStore()
    store.add('w', np.array([1.0, -2.0]))
    store.state['w'].first[:] = 0.5
    adam_step(store, {'w': np.zeros(2)}, lr=0.1)
    assert store.step_count == 1
    assert np.allclose(store.state['w'].first, 0.45)
    store = ParamStore()
    store.add('w', np.array([1.0, -2.0]))
    adam_step(store, {'w': np.zeros(2)}, lr=0.1)
    assert np.array_equal(store['w'].data, [1.0, -2.0])


def test_adam_first_step_moves_against_gradient():
    """Test the bias-corrected first step is about lr * sign(g)."""
    store = ParamStore()
    store.add('w', np.array([0.0, 0.0]))
    adam_step(store, {'w': np.array([0.3, -4.0])}, lr=0.01)
    assert np.allclose(store['w'].data, [-0.01, 0.01], atol=1e-9)


def test_adam_independent_and_frozen():
    """Test parameters update independently and frozen ones never move."""
    store = ParamStore()
    store.add('a', np.ones(2))
    store.add('b', np.ones(2))
    store.add('c', np.ones(2))
    store.freeze('c')
    adam_step(store, {'a': np.ones(2), 'b': np.zeros(2), 'c': np.ones(2)}, lr=0.1)
    assert np.all(store['a'].data < 1.0)
    assert np.array_equal(store['b'].data, np.ones(2))
    assert np.array_equal(store['c'].data, np.ones(2))


def test_adam_missing_gradient():
    """Test a missing gradient is an error."""
    store = ParamStore()
    store.add('a', np.ones(2))
    with pytest.raises(KeyError):
        adam_step(store, {})


def test_adam_wrapper_uses_tape_gradients():
    """Test Adam.step consumes accumulated gradients."""
    store = ParamStore()
    w = store.add('w', np.array([2.0]))
    optimizer = Adam(store, lr=0.5)
    (w * w).sum().backward()
    optimizer.step()
    optimizer.zero_grad()
    assert store['w'].data[0] == pytest.approx(1.5)
    assert np.array_equal(store['w'].grad, [0.0])


def test_gradcheck_quadratic():
    """Test loss = 0.5 * |theta|^2 passes at h = 1e-5."""
    store = ParamStore()
    theta = store.add('theta', np.array([1.0, -2.0, 0.5, 3.0, -1.5]))
    report = finite_diff_check(lambda: (theta * theta).sum() * 0.5, store, h=1e-5, tol=1e-8)
    assert report.passed
    assert report.worst < 1e-8


def test_gradcheck_logsumexp():
    """Test the gradient of logsumexp is softmax."""
    store = ParamStore()
    theta = store.add('theta', np.array([0.1, -0.5, 2.0]))
    report = finite_diff_check(lambda: logsumexp(theta), store)
    assert report.passed
    store.zero_grad()
    logsumexp(theta).backward()
    assert np.allclose(theta.grad, softmax(Tensor(theta.data)).data)


def test_gradcheck_flags_wrong_gradient():
    """Test a deliberately broken gradient is reported."""
    store = ParamStore()
    theta = store.add('theta', np.array([1.0, 2.0]))

    def broken():
        out = (theta * theta).sum()
        out.node.backward = lambda g: (np.full(theta.shape, 123.0),)
        return out

    report = finite_diff_check(broken, store)
    assert not report.passed
    assert report.flagged[0][0] == 'theta'


def test_checkpoint_round_trip(tmp_path):
    """Test parameters survive save and load bit-exactly."""
    store = ParamStore()
    store.add('layer.w', np.random.default_rng(1).normal(size=(3, 4)))
    store.add('layer.b', np.array([1e-300, -0.1, np.pi]))
    store.freeze('layer.b')
    save_params(store, tmp_path / 'ckpt', {'note': 'x'})
    loaded, metadata = load_params(tmp_path / 'ckpt')
    assert metadata == {'note': 'x'}
    assert loaded.names() == store.names()
    assert loaded.frozen == {'layer.b'}
    for name, tensor in store:
        assert loaded[name].data.tobytes() == tensor.data.tobytes()


def test_checkpoint_errors(tmp_path):
    """Test missing or truncated checkpoints raise CheckpointError."""
    with pytest.raises(CheckpointError):
        load_params(tmp_path / 'missing')
    store = ParamStore()
    store.add('w', np.zeros(4))
    save_params(store, tmp_path / 'ckpt')
    (tmp_path / 'ckpt' / 'w.bin').write_bytes(b'\x00' * 8)
    with pytest.raises(CheckpointError):
        load_params(tmp_path / 'ckpt')
