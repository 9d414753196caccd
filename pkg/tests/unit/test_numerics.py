# pyright: reportMissingParameterType=false
import numpy as np
import pytest

from src.numerics import (
    AdamState,
    AutogradError,
    DimensionError,
    Tensor,
    adam_step,
    current_tape,
    gradcheck,
    no_grad,
    ops,
)


def _param(rng, shape):
    return Tensor.parameter(rng.normal(size=shape))


# --- forward 예시 ---
def test_matmul_identity():
    a = Tensor(np.arange(6.0).reshape(2, 3))
    out = ops.matmul(Tensor(np.eye(2)), a)
    np.testing.assert_array_equal(out.numpy(), a.numpy())


def test_softmax_uniform_logits():
    out = ops.softmax(Tensor(np.zeros(3)), axis=0)
    np.testing.assert_allclose(out.numpy(), np.full(3, 1 / 3))


def test_relu_definition():
    out = ops.relu(Tensor([-1.0, 0.0, 2.0]))
    np.testing.assert_array_equal(out.numpy(), [0.0, 0.0, 2.0])


def test_shape_mismatch_names_op():
    with pytest.raises(DimensionError, match="add"):
        ops.add(Tensor(np.zeros((2, 3))), Tensor(np.zeros((3, 2))))


def test_matmul_rejects_inner_mismatch():
    with pytest.raises(DimensionError):
        ops.matmul(Tensor(np.zeros((2, 3))), Tensor(np.zeros((2, 3))))


# --- mse ---
def test_mse_identity_is_zero():
    a = Tensor([1.0, -2.0, 5.0])
    assert ops.mse(a, Tensor(a.numpy())).item() == 0.0


@pytest.mark.parametrize(("a", "b", "expected"), [((1.0, 2.0), (0.0, 2.0), 1.0), ((3.0, 4.0), (0.0, 0.0), 25.0)])
def test_mse_sum_examples(a, b, expected):
    assert ops.mse(Tensor(a), Tensor(b)).item() == pytest.approx(expected)


def test_mse_mean_divides_by_count():
    assert ops.mse(Tensor([3.0, 4.0]), Tensor([0.0, 0.0]), reduction="mean").item() == pytest.approx(12.5)


# --- backward ---
def test_backward_square():
    x = Tensor.parameter([3.0])
    ops.mse(x, Tensor([0.0])).backward()
    np.testing.assert_allclose(x.grad, [6.0])


def test_backward_linear_map(rng):
    u = _param(rng, (2, 3))
    x = Tensor(rng.normal(size=(3, 4)))
    ops.sum(ops.matmul(u, x)).backward()
    np.testing.assert_allclose(u.grad, np.ones((2, 4)) @ x.numpy().T)


def test_backward_accumulates_shared_input():
    x = Tensor.parameter([2.0])
    ops.sum(ops.add(x, x)).backward()
    np.testing.assert_allclose(x.grad, [2.0])


def test_backward_requires_scalar():
    x = Tensor.parameter(np.ones(3))
    with pytest.raises(AutogradError):
        ops.scale(x, 2.0).backward()
    current_tape().reset()


def test_no_grad_records_nothing():
    x = Tensor.parameter(np.ones(3))
    current_tape().reset()
    with no_grad():
        ops.sum(ops.mul(x, x))
    assert len(current_tape()) == 0


def test_backward_resets_tape():
    x = Tensor.parameter(np.ones(2))
    ops.sum(ops.tanh(x)).backward()
    assert len(current_tape()) == 0


# --- 수치 미분 대조 (모든 연산) ---
IDX = np.array([[0, 1], [1, 2]], dtype=np.intp)

UNARY_CASES = {
    "sigmoid": lambda a: ops.sigmoid(a),
    "tanh": lambda a: ops.tanh(a),
    "relu": lambda a: ops.relu(a),
    "softmax": lambda a: ops.softmax(a, axis=-1),
    "scale": lambda a: ops.scale(a, -1.7),
    "transpose": lambda a: ops.transpose(a),
    "reshape": lambda a: ops.reshape(a, (3, 2)),
    "broadcast_to": lambda a: ops.broadcast_to(ops.slice_axis(a, 0, 1, axis=0), (4, 3)),
    "slice": lambda a: ops.slice_axis(a, 1, 3, axis=1),
    "take": lambda a: ops.take(a, IDX, axis=1),
    "scatter_add": lambda a: ops.scatter_add(ops.take(a, IDX, axis=1), IDX, axis=1, size=3),
    "sum_axis": lambda a: ops.sum(a, axis=0),
    "mean": lambda a: ops.mean(a, axis=1),
}

BINARY_CASES = {
    "add": lambda a, b: ops.add(a, b),
    "sub": lambda a, b: ops.sub(a, b),
    "mul": lambda a, b: ops.mul(a, b),
    "matmul": lambda a, b: ops.matmul(a, ops.transpose(b)),
    "concat": lambda a, b: ops.concat([a, b], axis=0),
    "stack": lambda a, b: ops.stack([a, b], axis=1),
    "mse_sum": lambda a, b: ops.mse(a, b),
    "mse_mean": lambda a, b: ops.mse(a, b, reduction="mean"),
}


def _scalarize(out: Tensor, weights: np.ndarray) -> Tensor:
    # 임의 가중합으로 스칼라화해 모든 출력 원소의 기울기를 검사
    if out.size == 1:
        return out
    return ops.sum(ops.mul(out, Tensor(weights[: out.size].reshape(out.shape))))


INSTANCES = range(20)


@pytest.mark.parametrize("instance", INSTANCES)
@pytest.mark.parametrize("name", sorted(UNARY_CASES))
def test_gradcheck_unary(name, instance):
    rng = np.random.default_rng([instance, len(name)])
    a = _param(rng, (2, 3))
    weights = rng.normal(size=64)
    fn = UNARY_CASES[name]
    assert gradcheck(lambda: _scalarize(fn(a), weights), [a]) <= 1e-4


@pytest.mark.parametrize("instance", INSTANCES)
@pytest.mark.parametrize("name", sorted(BINARY_CASES))
def test_gradcheck_binary(name, instance):
    rng = np.random.default_rng([instance, len(name)])
    a, b = _param(rng, (2, 3)), _param(rng, (2, 3))
    weights = rng.normal(size=64)
    fn = BINARY_CASES[name]
    assert gradcheck(lambda: _scalarize(fn(a, b), weights), [a, b]) <= 1e-4


# --- ADAM ---
def test_adam_zero_gradient_keeps_params():
    w = Tensor.parameter([1.0, -2.0])
    w.grad = np.zeros(2)
    adam_step({"w": w}, AdamState(), lr=0.1)
    np.testing.assert_array_equal(w.numpy(), [1.0, -2.0])


def test_adam_moves_against_gradient_sign():
    w = Tensor.parameter([0.0, 0.0])
    state = AdamState()
    for _ in range(10):
        w.grad = np.array([1.0, -1.0])
        adam_step({"w": w}, state, lr=0.01)
    assert w.numpy()[0] < 0 < w.numpy()[1]


def test_adam_quadratic_converges():
    w = Tensor.parameter([0.0])
    state = AdamState()
    for _ in range(200):
        loss = ops.mse(w, Tensor([3.0]))
        loss.backward()
        adam_step({"w": w}, state, lr=0.1)
    assert abs(w.numpy()[0] - 3.0) < 0.1


def test_adam_missing_gradient():
    with pytest.raises(AutogradError):
        adam_step({"w": Tensor.parameter([1.0])}, AdamState(), lr=0.1)
