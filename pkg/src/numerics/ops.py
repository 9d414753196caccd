"""
미분 가능한 텐서 연산 모음
스칼라 배율(scale)과 명시적 broadcast_to 외에는 broadcasting 을 허용하지 않습니다.
shape 가 맞지 않으면 연산 이름과 shape 를 담은 DimensionError 를 던집니다.
"""
from __future__ import annotations

from collections.abc import Sequence
from typing import Literal

import numpy as np
from numpy.typing import NDArray

from .tensor import DimensionError, FloatArray, Tensor, record_op

IndexArray = NDArray[np.intp]


def _same_shape(op: str, a: Tensor, b: Tensor) -> None:
    if a.shape != b.shape:
        raise DimensionError(op, a.shape, b.shape)


def _norm_axis(op: str, axis: int, ndim: int) -> int:
    if not -ndim <= axis < ndim:
        raise DimensionError(op, (ndim,), detail=f"축 {axis} 범위 초과")
    return axis % ndim


def _unbroadcast(grad: FloatArray, shape: tuple[int, ...]) -> FloatArray:
    # broadcast 로 늘어난 축을 합쳐 원래 shape 로 되돌립니다
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    keep = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if keep:
        grad = grad.sum(axis=keep, keepdims=True)
    return grad.reshape(shape)


# ---------------------------------------------------------------------------
# 원소별 연산
# ---------------------------------------------------------------------------
def add(a: Tensor, b: Tensor) -> Tensor:
    _same_shape("add", a, b)
    return record_op("add", (a, b), a.data + b.data, lambda g: (g, g))


def sub(a: Tensor, b: Tensor) -> Tensor:
    _same_shape("sub", a, b)
    return record_op("sub", (a, b), a.data - b.data, lambda g: (g, -g))


def mul(a: Tensor, b: Tensor) -> Tensor:
    _same_shape("mul", a, b)
    return record_op("mul", (a, b), a.data * b.data, lambda g: (g * b.data, g * a.data))


def scale(a: Tensor, c: float) -> Tensor:
    return record_op("scale", (a,), a.data * c, lambda g: (g * c,))


def sigmoid(a: Tensor) -> Tensor:
    # tanh 형태가 큰 |x| 에서도 overflow 없이 안정적
    s = 0.5 * (1.0 + np.tanh(0.5 * a.data))
    return record_op("sigmoid", (a,), s, lambda g: (g * s * (1.0 - s),))


def tanh(a: Tensor) -> Tensor:
    t = np.tanh(a.data)
    return record_op("tanh", (a,), t, lambda g: (g * (1.0 - t * t),))


def relu(a: Tensor) -> Tensor:
    positive = a.data > 0
    return record_op("relu", (a,), np.where(positive, a.data, 0.0), lambda g: (g * positive,))


def softmax(a: Tensor, axis: int = -1) -> Tensor:
    ax = _norm_axis("softmax", axis, a.ndim)
    shifted = a.data - a.data.max(axis=ax, keepdims=True)
    e = np.exp(shifted)
    s = e / e.sum(axis=ax, keepdims=True)

    def _backward(g: FloatArray) -> tuple[FloatArray]:
        return (s * (g - (g * s).sum(axis=ax, keepdims=True)),)

    return record_op("softmax", (a,), s, _backward)


# ---------------------------------------------------------------------------
# 행렬 / shape 연산
# ---------------------------------------------------------------------------
def matmul(a: Tensor, b: Tensor) -> Tensor:
    """
    행렬곱. 2D@2D, 배치(ND)@2D, 2D@배치(ND), 같은 배치 차원의 ND@ND 를 지원합니다.
    """
    if a.ndim < 2 or b.ndim < 2 or a.shape[-1] != b.shape[-2]:
        raise DimensionError("matmul", a.shape, b.shape)
    if a.ndim > 2 and b.ndim > 2 and a.shape[:-2] != b.shape[:-2]:
        raise DimensionError("matmul", a.shape, b.shape, detail="배치 차원 불일치")

    def _backward(g: FloatArray) -> tuple[FloatArray, FloatArray]:
        ga = g @ np.swapaxes(b.data, -1, -2)
        gb = np.swapaxes(a.data, -1, -2) @ g
        return _unbroadcast(ga, a.shape), _unbroadcast(gb, b.shape)

    return record_op("matmul", (a, b), a.data @ b.data, _backward)


def transpose(a: Tensor, axes: Sequence[int] | None = None) -> Tensor:
    perm = tuple(reversed(range(a.ndim))) if axes is None else tuple(axes)
    if sorted(perm) != list(range(a.ndim)):
        raise DimensionError("transpose", a.shape, detail=f"잘못된 축 순서 {perm}")
    inverse = tuple(int(i) for i in np.argsort(perm))
    return record_op(
        "transpose", (a,), np.ascontiguousarray(np.transpose(a.data, perm)),
        lambda g: (np.transpose(g, inverse),),
    )


def reshape(a: Tensor, shape: Sequence[int]) -> Tensor:
    target = tuple(shape)
    try:
        out = a.data.reshape(target)
    except ValueError as e:
        raise DimensionError("reshape", a.shape, target) from e
    return record_op("reshape", (a,), out, lambda g: (g.reshape(a.shape),))


def broadcast_to(a: Tensor, shape: Sequence[int]) -> Tensor:
    target = tuple(shape)
    try:
        out = np.array(np.broadcast_to(a.data, target))
    except ValueError as e:
        raise DimensionError("broadcast_to", a.shape, target) from e
    return record_op("broadcast_to", (a,), out, lambda g: (_unbroadcast(g, a.shape),))


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    if not tensors:
        raise DimensionError("concat", detail="빈 입력")
    ax = _norm_axis("concat", axis, tensors[0].ndim)
    ref = tensors[0].shape
    for t in tensors[1:]:
        if t.ndim != len(ref) or any(t.shape[i] != ref[i] for i in range(len(ref)) if i != ax):
            raise DimensionError("concat", ref, t.shape)
    bounds = np.cumsum([t.shape[ax] for t in tensors])[:-1]
    return record_op(
        "concat", tuple(tensors), np.concatenate([t.data for t in tensors], axis=ax),
        lambda g: tuple(np.split(g, bounds, axis=ax)),
    )


def stack(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    if not tensors:
        raise DimensionError("stack", detail="빈 입력")
    for t in tensors[1:]:
        _same_shape("stack", tensors[0], t)
    ax = _norm_axis("stack", axis, tensors[0].ndim + 1)
    count = len(tensors)
    return record_op(
        "stack", tuple(tensors), np.stack([t.data for t in tensors], axis=ax),
        lambda g: tuple(np.take(g, i, axis=ax) for i in range(count)),
    )


def slice_axis(a: Tensor, start: int, stop: int, axis: int = -1) -> Tensor:
    ax = _norm_axis("slice", axis, a.ndim)
    if not 0 <= start <= stop <= a.shape[ax]:
        raise DimensionError("slice", a.shape, detail=f"구간 [{start}, {stop}) 이 축 {ax} 범위를 벗어납니다")
    index: list[slice] = [slice(None)] * a.ndim
    index[ax] = slice(start, stop)
    key = tuple(index)

    def _backward(g: FloatArray) -> tuple[FloatArray]:
        full = np.zeros(a.shape)
        full[key] = g
        return (full,)

    return record_op("slice", (a,), a.data[key].copy(), _backward)


def _scatter(values: FloatArray, idx: IndexArray, axis: int, size: int) -> FloatArray:
    # values 의 [axis, axis+idx.ndim) 축을 길이 size 의 단일 축으로 더해 넣습니다
    lead = values.shape[:axis]
    tail = values.shape[axis + idx.ndim:]
    out = np.zeros(lead + (size,) + tail)
    moved_out = np.moveaxis(out, axis, 0)
    src = np.moveaxis(values, tuple(range(axis, axis + idx.ndim)), tuple(range(idx.ndim)))
    np.add.at(moved_out, idx.reshape(-1), src.reshape((idx.size,) + lead + tail))
    return out


def take(a: Tensor, idx: IndexArray, axis: int = -1) -> Tensor:
    """축 axis 를 정수 인덱스 배열 idx 로 모읍니다 (결과 shape 에 idx.shape 가 들어갑니다)."""
    ax = _norm_axis("take", axis, a.ndim)
    index = np.asarray(idx, dtype=np.intp)
    n = a.shape[ax]
    if index.size and (index.min() < 0 or index.max() >= n):
        raise DimensionError("take", a.shape, detail=f"인덱스가 축 길이 {n} 을 벗어납니다")
    return record_op(
        "take", (a,), np.take(a.data, index, axis=ax),
        lambda g: (_scatter(g, index, ax, n),),
    )


def scatter_add(a: Tensor, idx: IndexArray, axis: int, size: int) -> Tensor:
    """take 의 수반(adjoint) 연산: idx 위치로 값을 더해 길이 size 축을 만듭니다."""
    index = np.asarray(idx, dtype=np.intp)
    if axis < 0:
        axis += a.ndim - index.ndim + 1
    if not 0 <= axis <= a.ndim - index.ndim or a.shape[axis:axis + index.ndim] != index.shape:
        raise DimensionError("scatter_add", a.shape, index.shape)
    if index.size and (index.min() < 0 or index.max() >= size):
        raise DimensionError("scatter_add", a.shape, detail=f"인덱스가 출력 길이 {size} 을 벗어납니다")
    return record_op(
        "scatter_add", (a,), _scatter(a.data, index, axis, size),
        lambda g: (np.take(g, index, axis=axis),),
    )


# ---------------------------------------------------------------------------
# 축약 연산
# ---------------------------------------------------------------------------
def sum(a: Tensor, axis: int | None = None) -> Tensor:  # noqa: A001
    if axis is None:
        return record_op("sum", (a,), np.asarray(a.data.sum()), lambda g: (np.full(a.shape, float(g)),))
    ax = _norm_axis("sum", axis, a.ndim)
    return record_op(
        "sum", (a,), a.data.sum(axis=ax),
        lambda g: (np.array(np.broadcast_to(np.expand_dims(g, ax), a.shape)),),
    )


def mean(a: Tensor, axis: int | None = None) -> Tensor:
    count = a.size if axis is None else a.shape[_norm_axis("mean", axis, a.ndim)]
    return scale(sum(a, axis), 1.0 / max(count, 1))


def mse(a: Tensor, b: Tensor, reduction: Literal["sum", "mean"] = "sum") -> Tensor:
    """
    제곱 오차. reduction="sum" 은 Σ(a-b)², "mean" 은 원소 수로 나눈 값입니다.
    분해/복원 손실은 sum 변형을 사용합니다.
    """
    _same_shape("mse", a, b)
    diff = a.data - b.data
    factor = 1.0 if reduction == "sum" else 1.0 / max(a.size, 1)
    value = np.asarray(float((diff * diff).sum()) * factor)

    def _backward(g: FloatArray) -> tuple[FloatArray, FloatArray]:
        d = 2.0 * factor * float(g) * diff
        return d, -d

    return record_op(f"mse_{reduction}", (a, b), value, _backward)
